use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use plpo::interp::{interpret, EvalBudget, Interpretation};
use plpo::orientation::{
    canonical_rank_maps, check_trs, search_orientation, OrientationResult, SearchError,
    SearchSpace,
};
use plpo::orders::{lpo_gt, Certificate, OrderParams};
use plpo::rewrite::{derivation_length, normalize, DlOutcome, Limits, Normalization};
use plpo::schema::{compile, parse_schema};
use plpo::syntax::{parse_term, parse_trs, print_trs};
use plpo::term::Signature;
use plpo::trs::Trs;
use plpo_cli::{
    BoundDoc, CertDoc, CheckDoc, CompareDoc, CompileDoc, InterpDoc, OrientabilityDoc, ParamsDoc,
    RuleDoc, RunDoc, SearchDoc,
};

const EXIT_HOLDS: u8 = 0;
const EXIT_DOES_NOT_HOLD: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "plpo",
    version,
    about = "Termination orders with a normal/safe argument separation: \
             orientation checking and search, certificates, derivation \
             lengths, and a schema compiler"
)]
struct Cli {
    /// Emit one machine-readable JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VaryAxis {
    Rank,
    Lex,
    Sep,
}

#[derive(Subcommand)]
enum Command {
    /// Check every rule against the order induced by the file's declared
    /// precedence, lex flags and separation.
    Check {
        file: PathBuf,
        /// Print the certificate tree for each oriented rule.
        #[arg(long)]
        certificate: bool,
        /// Also try permutations of safe positions in the componentwise case.
        #[arg(long)]
        perm: bool,
    },
    /// Search ranks, lex sets and separations for an orienting assignment.
    Search {
        file: PathBuf,
        /// Vary all axes (the default when --vary is not given).
        #[arg(long, conflicts_with = "vary")]
        full: bool,
        /// Comma-separated axes to vary: rank, lex, sep.
        #[arg(long, value_delimiter = ',')]
        vary: Vec<VaryAxis>,
        /// Rank values range over 0..N; defaults to the signature size.
        #[arg(long)]
        max_rank: Option<usize>,
        /// Give up after this many seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// Also try permutations of safe positions in the componentwise case.
        #[arg(long)]
        perm: bool,
    },
    /// Derive the interpretation parameters and optionally attempt to
    /// interpret a ground term under a bit budget.
    Bound {
        file: PathBuf,
        /// Ground term to interpret.
        #[arg(long)]
        term: Option<String>,
        /// Cap on the bit length of any intermediate value.
        #[arg(long, default_value_t = 1_000_000)]
        budget_bits: u64,
    },
    /// Rewrite a ground term: longest derivation or innermost normal form.
    Run {
        file: PathBuf,
        #[arg(long)]
        term: String,
        /// Compute the longest derivation length (the default).
        #[arg(long, group = "mode")]
        dl: bool,
        /// Normalize leftmost-innermost instead.
        #[arg(long, group = "mode")]
        normalize: bool,
        /// Step budget for --normalize.
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Cap on distinct terms explored by --dl.
        #[arg(long, default_value_t = 100_000)]
        max_terms: usize,
        /// Cap on derivation depth explored by --dl.
        #[arg(long, default_value_t = 5_000)]
        max_depth: usize,
    },
    /// Compile a schema file's last definition to a rewrite system.
    Compile {
        schema: PathBuf,
        /// Write the system here instead of printing it.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report orientability under the predicative order versus the plain
    /// lexicographic path order.
    Compare { file: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn limit(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_LIMIT,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Check {
            file,
            certificate,
            perm,
        } => cmd_check(cli.json, file, *certificate, *perm),
        Command::Search {
            file,
            full,
            vary,
            max_rank,
            timeout,
            perm,
        } => cmd_search(cli.json, file, *full, vary, *max_rank, *timeout, *perm),
        Command::Bound {
            file,
            term,
            budget_bits,
        } => cmd_bound(cli.json, file, term.as_deref(), *budget_bits),
        Command::Run {
            file,
            term,
            dl,
            normalize,
            max_steps,
            max_terms,
            max_depth,
        } => cmd_run(
            cli.json, file, term, *dl, *normalize, *max_steps, *max_terms, *max_depth,
        ),
        Command::Compile { schema, output } => cmd_compile(cli.json, schema, output.as_deref()),
        Command::Compare { file } => cmd_compare(cli.json, file),
    }
}

fn load_trs(path: &Path) -> Result<Trs, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_trs(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit_json<T: serde::Serialize>(doc: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("documents serialize")
    );
}

fn params_doc(sig: &Signature, params: &OrderParams, separation: &[Vec<bool>]) -> ParamsDoc {
    let mut ranks = BTreeMap::new();
    let mut lex = Vec::new();
    let mut sep = BTreeMap::new();
    for (id, sym) in sig.iter() {
        ranks.insert(sym.name.clone(), params.rank[id.0]);
        if params.lex[id.0] {
            lex.push(sym.name.clone());
        }
        let normals: Vec<usize> = separation[id.0]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i + 1)
            .collect();
        sep.insert(sym.name.clone(), normals);
    }
    ParamsDoc {
        ranks,
        lex,
        separation: sep,
        permutation_extension: params.permutation_extension,
    }
}

fn cert_doc(cert: &Certificate, sig: &Signature) -> CertDoc {
    CertDoc {
        judgment: cert.judgment.to_string(),
        case: cert.case.to_string(),
        lhs: cert.lhs.display(sig).to_string(),
        rhs: cert.rhs.display(sig).to_string(),
        children: cert.children.iter().map(|c| cert_doc(c, sig)).collect(),
    }
}

fn rule_docs(trs: &Trs, result: &OrientationResult, with_certs: bool) -> Vec<RuleDoc> {
    trs.rules
        .iter()
        .zip(&result.per_rule)
        .enumerate()
        .map(|(index, (rule, cert))| RuleDoc {
            index,
            lhs: rule.lhs.display(&trs.signature).to_string(),
            rhs: rule.rhs.display(&trs.signature).to_string(),
            oriented: cert.is_some(),
            certificate: if with_certs {
                cert.as_ref().map(|c| cert_doc(c, &trs.signature))
            } else {
                None
            },
        })
        .collect()
}

fn params_text(sig: &Signature, params: &OrderParams, separation: &[Vec<bool>]) -> String {
    let mut out = String::new();
    for (id, sym) in sig.iter() {
        out.push_str(&format!("rank({}) = {}\n", sym.name, params.rank[id.0]));
    }
    let lex: Vec<&str> = sig
        .iter()
        .filter(|(id, _)| params.lex[id.0])
        .map(|(_, s)| s.name.as_str())
        .collect();
    out.push_str(&format!("lex: {{{}}}\n", lex.join(", ")));
    for (id, sym) in sig.iter() {
        let normals: Vec<String> = separation[id.0]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        out.push_str(&format!(
            "separation({}) = {};{} (normal positions: [{}])\n",
            sym.name,
            separation[id.0].iter().filter(|&&b| b).count(),
            separation[id.0].iter().filter(|&&b| !b).count(),
            normals.join(", ")
        ));
    }
    out
}

fn cmd_check(json: bool, file: &Path, certificate: bool, perm: bool) -> Result<u8, Failure> {
    let trs = load_trs(file)?;
    let mut params = OrderParams::from_trs(&trs);
    params.permutation_extension = perm;
    let result = check_trs(&trs, &params).map_err(|e| usage(e.to_string()))?;
    let oriented_rules = result.per_rule.iter().filter(|c| c.is_some()).count();
    if json {
        emit_json(&CheckDoc {
            command: "check".into(),
            file: file.display().to_string(),
            oriented: result.oriented,
            oriented_rules,
            total_rules: trs.rules.len(),
            rules: rule_docs(&trs, &result, certificate),
            params: params_doc(&trs.signature, &params, &result.separation),
        });
    } else {
        println!("oriented: {}/{} rules", oriented_rules, trs.rules.len());
        for (i, (rule, cert)) in trs.rules.iter().zip(&result.per_rule).enumerate() {
            let sig = &trs.signature;
            match cert {
                Some(c) => println!(
                    "rule {i}: {} -> {}  [{}]",
                    rule.lhs.display(sig),
                    rule.rhs.display(sig),
                    c.case
                ),
                None => println!(
                    "rule {i}: {} -> {}  [not oriented]",
                    rule.lhs.display(sig),
                    rule.rhs.display(sig)
                ),
            }
        }
        if certificate {
            for cert in result.per_rule.iter().flatten() {
                print!("{}", cert.render(&trs.signature));
            }
        }
    }
    Ok(if result.oriented {
        EXIT_HOLDS
    } else {
        EXIT_DOES_NOT_HOLD
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    json: bool,
    file: &Path,
    full: bool,
    vary: &[VaryAxis],
    max_rank: Option<usize>,
    timeout: Option<f64>,
    perm: bool,
) -> Result<u8, Failure> {
    let trs = load_trs(file)?;
    let everything = full || vary.is_empty();
    let space = SearchSpace {
        max_rank,
        vary_rank: everything || vary.contains(&VaryAxis::Rank),
        vary_lex: everything || vary.contains(&VaryAxis::Lex),
        vary_separation: everything || vary.contains(&VaryAxis::Sep),
        permutation_extension: perm,
        timeout: timeout.map(Duration::from_secs_f64),
    };
    let report = search_orientation(&trs, &space).map_err(|e| match e {
        SearchError::Timeout { candidates } => {
            limit(format!("search timed out after {candidates} candidates"))
        }
    })?;
    match report.found {
        Some(result) => {
            if json {
                emit_json(&SearchDoc {
                    command: "search".into(),
                    file: file.display().to_string(),
                    outcome: "found".into(),
                    candidates: report.candidates,
                    params: Some(params_doc(&trs.signature, &result.params, &result.separation)),
                    rules: Some(rule_docs(&trs, &result, false)),
                });
            } else {
                println!("orientation found after {} candidates", report.candidates);
                print!("{}", params_text(&trs.signature, &result.params, &result.separation));
            }
            Ok(EXIT_HOLDS)
        }
        None => {
            if json {
                emit_json(&SearchDoc {
                    command: "search".into(),
                    file: file.display().to_string(),
                    outcome: "exhausted".into(),
                    candidates: report.candidates,
                    params: None,
                    rules: None,
                });
            } else {
                println!(
                    "search space exhausted after {} candidates: not orientable within the varied space",
                    report.candidates
                );
            }
            Ok(EXIT_DOES_NOT_HOLD)
        }
    }
}

fn cmd_bound(
    json: bool,
    file: &Path,
    term: Option<&str>,
    budget_bits: u64,
) -> Result<u8, Failure> {
    let trs = load_trs(file)?;
    let params = plpo::interp::derive_params(&trs);
    let budget = EvalBudget::bits(budget_bits);
    let sig = &trs.signature;

    let mut ranks = BTreeMap::new();
    for (id, sym) in sig.iter() {
        ranks.insert(sym.name.clone(), params.rank[id.0]);
    }

    let mut code = EXIT_HOLDS;
    let mut interp_doc = None;
    let mut term_text = None;
    let mut lines = format!("ℓ = {}\nK = {}\nd = {}\n", params.ell, params.k_max, params.d);
    for (id, sym) in sig.iter() {
        lines.push_str(&format!("rank({}) = {}\n", sym.name, params.rank[id.0]));
    }
    if let Some(text) = term {
        let t = parse_term(sig, text).map_err(|e| usage(e.to_string()))?;
        if !t.is_ground() {
            return Err(usage("--term must be ground"));
        }
        term_text = Some(t.display(sig).to_string());
        match interpret(&t, sig, &params, &budget).map_err(|e| usage(e.to_string()))? {
            Interpretation::Value(v) => {
                lines.push_str(&format!("interpretation: {v}\n"));
                interp_doc = Some(InterpDoc {
                    outcome: "value".into(),
                    budget_bits,
                    bits: Some(v.bits()),
                    value: Some(v.to_string()),
                    overflow_at: None,
                });
            }
            Interpretation::Overflow { at } => {
                lines.push_str(&format!(
                    "interpretation: exceeds the {budget_bits}-bit budget (deepest subterm reached: {})\n",
                    at.display(sig)
                ));
                interp_doc = Some(InterpDoc {
                    outcome: "overflow".into(),
                    budget_bits,
                    bits: None,
                    value: None,
                    overflow_at: Some(at.display(sig).to_string()),
                });
                code = EXIT_LIMIT;
            }
        }
    }
    if json {
        emit_json(&BoundDoc {
            command: "bound".into(),
            file: file.display().to_string(),
            ell: params.ell,
            k: params.k_max,
            d: params.d,
            ranks,
            term: term_text,
            interpretation: interp_doc,
        });
    } else {
        print!("{lines}");
    }
    Ok(code)
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    json: bool,
    file: &Path,
    term: &str,
    _dl: bool,
    do_normalize: bool,
    max_steps: u64,
    max_terms: usize,
    max_depth: usize,
) -> Result<u8, Failure> {
    let trs = load_trs(file)?;
    let sig = &trs.signature;
    let t = parse_term(sig, term).map_err(|e| usage(e.to_string()))?;
    if !t.is_ground() {
        return Err(usage("--term must be ground"));
    }
    let term_text = t.display(sig).to_string();
    let mut doc = RunDoc {
        command: "run".into(),
        file: file.display().to_string(),
        term: term_text.clone(),
        mode: if do_normalize { "normalize" } else { "dl" }.into(),
        outcome: String::new(),
        length: None,
        explored: None,
        cycle: None,
        normal_form: None,
        steps: None,
    };
    let text;
    let mut code = EXIT_HOLDS;
    if do_normalize {
        match normalize(&t, &trs, max_steps).map_err(|e| usage(e.to_string()))? {
            Normalization::Normal(nf, steps) => {
                doc.outcome = "normal_form".into();
                doc.normal_form = Some(nf.display(sig).to_string());
                doc.steps = Some(steps);
                text = format!("normal form: {} ({steps} steps)\n", nf.display(sig));
            }
            Normalization::StepLimit => {
                doc.outcome = "step_limit".into();
                text = format!("no normal form within {max_steps} steps\n");
                code = EXIT_LIMIT;
            }
        }
    } else {
        let limits = Limits {
            max_terms,
            max_depth,
        };
        let report = derivation_length(&t, &trs, limits).map_err(|e| usage(e.to_string()))?;
        doc.explored = Some(report.explored);
        match report.outcome {
            DlOutcome::Length(n) => {
                doc.outcome = "length".into();
                doc.length = Some(n);
                text = format!(
                    "derivation length: {n} (explored {} distinct terms)\n",
                    report.explored
                );
            }
            DlOutcome::Cycle(w) => {
                doc.outcome = "cycle".into();
                let printed: Vec<String> =
                    w.iter().map(|u| u.display(sig).to_string()).collect();
                text = format!("nonterminating: cycle {}\n", printed.join(" -> "));
                doc.cycle = Some(printed);
            }
            DlOutcome::DepthLimit => {
                doc.outcome = "depth_limit".into();
                text = format!("derivation depth limit {max_depth} exceeded\n");
                code = EXIT_LIMIT;
            }
            DlOutcome::TermsLimit => {
                doc.outcome = "terms_limit".into();
                text = format!("distinct-term limit {max_terms} exceeded\n");
                code = EXIT_LIMIT;
            }
        }
    }
    if json {
        emit_json(&doc);
    } else {
        print!("{text}");
    }
    Ok(code)
}

fn cmd_compile(json: bool, schema: &Path, output: Option<&Path>) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(schema)
        .map_err(|e| usage(format!("cannot read {}: {e}", schema.display())))?;
    let defs = parse_schema(&text).map_err(|e| usage(format!("{}: {e}", schema.display())))?;
    let Some((name, program)) = defs.last() else {
        return Err(usage("schema file contains no definitions"));
    };
    let compiled = compile(program).map_err(|e| usage(e.to_string()))?;
    let trs_text = print_trs(&compiled.trs).expect("compiled systems use prefix separations");
    if let Some(path) = output {
        std::fs::write(path, &trs_text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if json {
        emit_json(&CompileDoc {
            command: "compile".into(),
            schema: schema.display().to_string(),
            definition: name.clone(),
            symbols: compiled.trs.signature.len(),
            rules: compiled.trs.rules.len(),
            output: output.map(|p| p.display().to_string()),
            trs: trs_text,
        });
    } else {
        println!(
            "compiled `{name}`: {} symbols, {} rules",
            compiled.trs.signature.len(),
            compiled.trs.rules.len()
        );
        if output.is_none() {
            print!("{trs_text}");
        }
    }
    Ok(EXIT_HOLDS)
}

fn cmd_compare(json: bool, file: &Path) -> Result<u8, Failure> {
    let trs = load_trs(file)?;
    let declared = OrderParams::from_trs(&trs);

    // Predicative side: declared parameters first, then the full space.
    let plpo_doc = {
        let check = check_trs(&trs, &declared).map_err(|e| usage(e.to_string()))?;
        if check.oriented {
            OrientabilityDoc {
                orientable: true,
                via: "declared".into(),
                candidates: None,
            }
        } else {
            let report = search_orientation(&trs, &SearchSpace::full()).map_err(|e| match e {
                SearchError::Timeout { candidates } => {
                    limit(format!("search timed out after {candidates} candidates"))
                }
            })?;
            OrientabilityDoc {
                orientable: report.found.is_some(),
                via: if report.found.is_some() {
                    "search".into()
                } else {
                    "none".into()
                },
                candidates: Some(report.candidates),
            }
        }
    };

    // Reference side: declared ranks first, then all canonical rank maps.
    let lpo_doc = {
        let sig = &trs.signature;
        let oriented_under = |params: &OrderParams| {
            trs.rules
                .iter()
                .all(|r| lpo_gt(sig, params, &r.lhs, &r.rhs).is_some())
        };
        if oriented_under(&declared) {
            OrientabilityDoc {
                orientable: true,
                via: "declared".into(),
                candidates: None,
            }
        } else {
            // The reference order ignores lex flags and separations, so
            // only the rank maps need to be searched.
            let n = sig.len();
            let mut found = false;
            let mut candidates = 0u64;
            for rank in canonical_rank_maps(n, n) {
                candidates += 1;
                let params = OrderParams {
                    rank,
                    lex: vec![false; n],
                    permutation_extension: false,
                };
                if oriented_under(&params) {
                    found = true;
                    break;
                }
            }
            OrientabilityDoc {
                orientable: found,
                via: if found { "search".into() } else { "none".into() },
                candidates: Some(candidates),
            }
        }
    };

    if json {
        emit_json(&CompareDoc {
            command: "compare".into(),
            file: file.display().to_string(),
            plpo: plpo_doc,
            lpo: lpo_doc,
        });
    } else {
        let render = |name: &str, doc: &OrientabilityDoc| match (doc.orientable, doc.via.as_str())
        {
            (true, "declared") => println!("{name}: orientable (declared parameters)"),
            (true, _) => println!(
                "{name}: orientable (found by search after {} candidates)",
                doc.candidates.unwrap_or(0)
            ),
            (false, _) => println!(
                "{name}: not orientable (search exhausted after {} candidates)",
                doc.candidates.unwrap_or(0)
            ),
        };
        render("PLPO", &plpo_doc);
        render("LPO", &lpo_doc);
    }
    Ok(EXIT_HOLDS)
}
