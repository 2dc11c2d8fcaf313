//! Property suites for the core modules: equivalence laws, inclusion
//! chains, order irreflexivity and compatibility, search completeness at
//! desk scale, and agreement of the derivation-length analysis with a
//! brute-force path enumerator.

mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{fixture, random_signature, random_term, rng_from};
use plpo::interp::{f_m, EvalBudget, Eval};
use plpo::orders::{aux_gt, aux_gt_bounded, lpo_gt, plpo_gt, OrderParams};
use plpo::orientation::{check_trs, search_orientation, SearchSpace};
use plpo::replay::replay;
use plpo::rewrite::{successors, DerivationAnalyzer, Limits};
use plpo::schema::{decode_numeral, numeral, parse_schema};
use plpo::syntax::{parse_trs, print_trs};
use plpo::term::{equiv, FunctionSymbol, Signature, Term};
use plpo::trs::{Precedence, Rule, Trs};

#[test]
fn equiv_is_an_equivalence_and_preserves_size() {
    let mut rng = rng_from(1);
    for _ in 0..40 {
        let (sig, params) = random_signature(&mut rng);
        let terms: Vec<Term> = (0..12).map(|_| random_term(&mut rng, &sig, 3)).collect();
        for s in &terms {
            assert!(equiv(&sig, &params.rank, s, s), "reflexive");
            for t in &terms {
                let st = equiv(&sig, &params.rank, s, t);
                assert_eq!(st, equiv(&sig, &params.rank, t, s), "symmetric");
                if st {
                    assert_eq!(s.size(), t.size(), "equivalents have equal size");
                }
                for u in &terms {
                    if st && equiv(&sig, &params.rank, t, u) {
                        assert!(equiv(&sig, &params.rank, s, u), "transitive");
                    }
                }
            }
        }
    }
}

#[test]
fn orders_are_irreflexive_on_samples() {
    let mut rng = rng_from(2);
    for _ in 0..40 {
        let (sig, params) = random_signature(&mut rng);
        for _ in 0..25 {
            let t = random_term(&mut rng, &sig, 3);
            assert!(plpo_gt(&sig, &params, &t, &t).is_none());
            assert!(lpo_gt(&sig, &params, &t, &t).is_none());
            assert!(aux_gt(&sig, &params, &t, &t).is_none());
        }
    }
}

#[test]
fn bounded_relations_grow_with_the_budget() {
    let mut rng = rng_from(3);
    for _ in 0..30 {
        let (sig, params) = random_signature(&mut rng);
        for _ in 0..40 {
            let s = random_term(&mut rng, &sig, 3);
            let t = random_term(&mut rng, &sig, 3);
            for ell in 2..=4u32 {
                let at = aux_gt_bounded(&sig, &params, &s, &t, ell).unwrap();
                let next = aux_gt_bounded(&sig, &params, &s, &t, ell + 1).unwrap();
                if at.is_some() {
                    assert!(next.is_some(), "budget {ell} subset of {}", ell + 1);
                    assert!(aux_gt(&sig, &params, &s, &t).is_some(), "bounded subset of unbounded");
                }
            }
        }
    }
}

#[test]
fn equivalence_compatible_pairs_decide_alike() {
    let mut rng = rng_from(4);
    let mut exercised = 0usize;
    for _ in 0..30 {
        let (sig, params) = random_signature(&mut rng);
        let terms: Vec<Term> = (0..10).map(|_| random_term(&mut rng, &sig, 3)).collect();
        for s in &terms {
            for s2 in &terms {
                if !equiv(&sig, &params.rank, s, s2) {
                    continue;
                }
                for t in &terms {
                    for t2 in &terms {
                        if !equiv(&sig, &params.rank, t, t2) {
                            continue;
                        }
                        let a = plpo_gt(&sig, &params, s, t).is_some();
                        let b = plpo_gt(&sig, &params, s2, t2).is_some();
                        assert_eq!(a, b, "equivalence-compatible decisions");
                        if s != s2 || t != t2 {
                            exercised += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(exercised > 50, "nontrivial pairs exercised: {exercised}");
}

#[test]
fn golden_files_round_trip_through_the_printer() {
    for name in ["r_pr", "r_prp", "r_umr", "r_snr", "ackermann", "gsnr1", "gsnr2", "loop"] {
        let trs = fixture(name);
        let printed = print_trs(&trs).unwrap();
        let reparsed = parse_trs(&printed).unwrap();
        assert_eq!(trs, reparsed, "{name}");
    }
}

/// Independent brute-force orientability decision: enumerates every rank
/// vector (not just canonical ones), lex subset and separation assignment,
/// deciding each rule with the certificate-building prover.
fn brute_force_orientable(trs: &Trs) -> bool {
    let n = trs.signature.len();
    let defined: Vec<usize> = trs
        .signature
        .iter()
        .filter(|(_, s)| s.is_defined())
        .map(|(id, _)| id.0)
        .collect();
    let arities: Vec<usize> = trs.signature.iter().map(|(_, s)| s.arity()).collect();

    let mut ranks = vec![0usize; n];
    loop {
        for lex_bits in 0u64..(1 << defined.len()) {
            let mut lex = vec![false; n];
            for (j, &idx) in defined.iter().enumerate() {
                lex[idx] = lex_bits >> j & 1 == 1;
            }
            let params = OrderParams {
                rank: ranks.clone(),
                lex,
                permutation_extension: false,
            };
            let mut masks: Vec<u64> = vec![0; n];
            loop {
                let mut sig = trs.signature.clone();
                for (i, &m) in masks.iter().enumerate() {
                    let mask: Vec<bool> = (0..arities[i]).map(|j| m >> j & 1 == 1).collect();
                    sig.set_separation(plpo::term::SymbolId(i), &mask).unwrap();
                }
                if trs
                    .rules
                    .iter()
                    .all(|r| plpo_gt(&sig, &params, &r.lhs, &r.rhs).is_some())
                {
                    return true;
                }
                // Mixed-radix increment over the separation masks.
                let mut i = n;
                let mut carried = true;
                while carried && i > 0 {
                    i -= 1;
                    masks[i] += 1;
                    if masks[i] < (1 << arities[i]) {
                        carried = false;
                    } else {
                        masks[i] = 0;
                    }
                }
                if carried {
                    break;
                }
            }
        }
        // Plain odometer over {0..n-1}^n.
        let mut i = n;
        let mut carried = true;
        while carried && i > 0 {
            i -= 1;
            ranks[i] += 1;
            if ranks[i] < n {
                carried = false;
            } else {
                ranks[i] = 0;
            }
        }
        if carried {
            return false;
        }
    }
}

#[test]
fn search_matches_brute_force_on_small_systems() {
    let mut rng = rng_from(5);
    let mut orientable = 0usize;
    let mut unorientable = 0usize;
    for _ in 0..24 {
        // Small signature: constant, unary constructor, two defined symbols.
        let mut sig = Signature::new();
        let zero = sig.add(FunctionSymbol::constructor("o", 0, 0)).unwrap();
        let s = sig.add(FunctionSymbol::constructor("k", 0, 1)).unwrap();
        let f = sig.add(FunctionSymbol::defined("f", false, 0, 2)).unwrap();
        let g = sig.add(FunctionSymbol::defined("g", false, 0, 1)).unwrap();
        let _ = (zero, s);

        // One or two rules with variable left-hand sides and random right
        // sides over the same variables.
        let lhs1 = Term::app(f, vec![Term::var("x"), Term::var("y")]);
        let rhs1 = random_rule_rhs(&mut rng, &sig, 4);
        let mut rules = vec![Rule {
            lhs: lhs1,
            rhs: rhs1,
        }];
        if rng.gen_bool(0.5) {
            rules.push(Rule {
                lhs: Term::app(g, vec![Term::var("x")]),
                rhs: random_rule_rhs(&mut rng, &mut sig.clone(), 3),
            });
        }
        let Ok(trs) = Trs::new(sig, Precedence::default(), rules) else {
            continue;
        };
        let report = search_orientation(&trs, &SearchSpace::full()).unwrap();
        let brute = brute_force_orientable(&trs);
        assert_eq!(report.found.is_some(), brute);
        if brute {
            orientable += 1;
            let result = report.found.unwrap();
            // The found assignment replays rule by rule.
            let mut sig = trs.signature.clone();
            for (i, mask) in result.separation.iter().enumerate() {
                sig.set_separation(plpo::term::SymbolId(i), mask).unwrap();
            }
            for cert in result.per_rule.iter().flatten() {
                replay(&sig, &result.params, cert).unwrap();
            }
        } else {
            unorientable += 1;
        }
    }
    assert!(orientable > 0, "sampled systems include orientable ones");
    assert!(unorientable > 0, "sampled systems include unorientable ones");
}

fn random_rule_rhs(rng: &mut rand_chacha::ChaCha8Rng, sig: &Signature, depth: usize) -> Term {
    // Right-hand sides over the left-hand variables x, y only.
    let t = random_term(rng, sig, depth);
    rename_z(&t)
}

fn rename_z(t: &Term) -> Term {
    match t {
        Term::Var(v) if v == "z" => Term::var("x"),
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(*f, args.iter().map(rename_z).collect()),
    }
}

/// Brute-force longest path by full enumeration of derivations.
fn brute_longest_path(t: &Term, trs: &Trs, fuel: usize) -> u64 {
    assert!(fuel > 0, "fuel exhausted; graph deeper than expected");
    successors(t, trs)
        .iter()
        .map(|step| 1 + brute_longest_path(&step.target, trs, fuel - 1))
        .max()
        .unwrap_or(0)
}

#[test]
fn derivation_length_agrees_with_brute_force() {
    // The enumerator re-walks every derivation, so it is exponential in
    // the graph; keep the branching fixtures a size smaller.
    for (name, size) in [("r_pr", 6), ("r_prp", 5), ("r_umr", 4), ("r_snr", 4)] {
        let trs = fixture(name);
        let mut analyzer = DerivationAnalyzer::new(&trs, Limits::default());
        for t in plpo::rewrite::enumerate_ground_terms(&trs.signature, size) {
            let fast = analyzer.length(&t).expect("terminating fixture");
            let brute = brute_longest_path(&t, &trs, 64);
            assert_eq!(fast, brute, "{name}: {}", t.display(&trs.signature));
        }
    }
}

#[test]
fn oriented_fixtures_replay_under_checker() {
    for name in ["r_pr", "r_prp", "r_umr", "r_snr", "gsnr1"] {
        let trs = fixture(name);
        let params = OrderParams::from_trs(&trs);
        let result = check_trs(&trs, &params).unwrap();
        assert!(result.oriented, "{name}");
        for cert in result.per_rule.iter().flatten() {
            replay(&trs.signature, &params, cert).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        cases: 64,
        ..ProptestConfig::default()
    })]

    #[test]
    fn level_zero_matches_naive_power(x in 0u64..200, d in 2u64..6) {
        let budget = EvalBudget::default();
        let big_x = num_bigint::BigUint::from(x);
        let result = f_m(0, &big_x, d, &budget).unwrap();
        let mut naive = num_bigint::BigUint::from(1u32);
        for _ in 0..=x {
            naive *= d;
        }
        prop_assert_eq!(result, Eval::Value(naive));
    }

    #[test]
    fn numerals_round_trip(n in 0u64..300) {
        let compiled = plpo::schema::compile(&plpo::schema::addition()).unwrap();
        let sig = &compiled.trs.signature;
        prop_assert_eq!(decode_numeral(sig, &numeral(sig, n)).unwrap(), n);
    }
}

#[test]
fn schema_defs_accept_references() {
    let defs = parse_schema(
        "def id = proj(1,1)\ndef двойное = comp(succ; comp(succ; id))\n",
    );
    // Non-ASCII identifiers are not part of the token set.
    assert!(defs.is_err());

    let defs = parse_schema("def id = proj(1,1)\ndef twice = comp(succ; comp(succ; id))\n")
        .unwrap();
    assert_eq!(plpo::schema::eval_oracle(&defs[1].1, &[5]).unwrap(), 7);
}

#[test]
fn decider_and_prover_agree_on_random_pairs() {
    let mut rng = rng_from(6);
    for _ in 0..25 {
        let (sig, params) = random_signature(&mut rng);
        let terms: Vec<Term> = (0..16).map(|_| random_term(&mut rng, &sig, 3)).collect();
        // The decider is internal; drive it through the search by building
        // one-rule systems would be heavy, so compare via the public
        // surface instead: bounded and unbounded provers on both routes.
        for s in &terms {
            for t in &terms {
                let unbounded = plpo_gt(&sig, &params, s, t);
                if let Some(cert) = &unbounded {
                    replay(&sig, &params, cert).unwrap();
                    let ell = (t.size() as u32).max(2);
                    let bounded = plpo_gt_bounded_ok(&sig, &params, s, t, ell);
                    assert!(bounded, "bounded at max(2, |t|) must hold");
                }
            }
        }
    }
}

fn plpo_gt_bounded_ok(
    sig: &Signature,
    params: &OrderParams,
    s: &Term,
    t: &Term,
    ell: u32,
) -> bool {
    plpo::orders::plpo_gt_bounded(sig, params, s, t, ell)
        .unwrap()
        .is_some()
}
