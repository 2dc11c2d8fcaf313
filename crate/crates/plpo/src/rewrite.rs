//! Exhaustive rewriting over ground terms: one-step successors, longest
//! derivations, a desk-scale termination probe, and innermost
//! normalization.
//!
//! Derivation lengths are longest paths in the reachable rewrite graph,
//! computed with a shared memo table and a cycle detector; a cycle anywhere
//! reachable means the start term admits an infinite derivation.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::term::{Signature, Substitution, Term};
use crate::trs::Trs;

/// A single rewrite: `source` at `position` (source-order argument path)
/// by rule `rule_index` gives `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub source: Term,
    pub target: Term,
    pub rule_index: usize,
    pub position: Vec<usize>,
}

/// Syntactic matching of a pattern against a ground subject.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    fn go(pattern: &Term, subject: &Term, sub: &mut Substitution) -> bool {
        match pattern {
            Term::Var(v) => match sub.get(v) {
                Some(bound) => bound == subject,
                None => sub.bind(v.clone(), subject.clone()).is_ok(),
            },
            Term::App(f, pargs) => match subject {
                Term::App(g, sargs) if f == g && pargs.len() == sargs.len() => pargs
                    .iter()
                    .zip(sargs)
                    .all(|(p, s)| go(p, s, sub)),
                _ => false,
            },
        }
    }
    let mut sub = Substitution::new();
    if go(pattern, subject, &mut sub) {
        Some(sub)
    } else {
        None
    }
}

fn replace_at(t: &Term, path: &[usize], replacement: &Term) -> Term {
    match path.split_first() {
        None => replacement.clone(),
        Some((&i, rest)) => match t {
            Term::Var(_) => unreachable!("path into a variable"),
            Term::App(f, args) => {
                let mut args = args.clone();
                args[i] = replace_at(&args[i], rest, replacement);
                Term::App(*f, args)
            }
        },
    }
}

fn positions(t: &Term) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        if let Term::App(_, args) = t {
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                go(a, path, out);
                path.pop();
            }
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

/// All one-step rewrites of a ground term, positions in preorder and rules
/// in index order within a position.
pub fn successors(t: &Term, trs: &Trs) -> Vec<RewriteStep> {
    let mut out = Vec::new();
    for path in positions(t) {
        let sub = t.subterm_at(&path).expect("enumerated position");
        for (i, rule) in trs.rules.iter().enumerate() {
            if let Some(binding) = match_term(&rule.lhs, sub) {
                let image = binding
                    .apply_ground(&rule.rhs)
                    .expect("rule variables are bound by the match");
                out.push(RewriteStep {
                    source: t.clone(),
                    target: replace_at(t, &path, &image),
                    rule_index: i,
                    position: path.clone(),
                });
            }
        }
    }
    out
}

/// Exploration limits for the rewrite graph.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Cap on distinct terms visited.
    pub max_terms: usize,
    /// Cap on the depth of any explored derivation.
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_terms: 100_000,
            max_depth: 5_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DlOutcome {
    /// Exact longest derivation length.
    Length(u64),
    /// An infinite derivation exists; the witness is one loop of it.
    Cycle(Vec<Term>),
    /// Exploration hit the depth limit before settling.
    DepthLimit,
    /// Exploration hit the distinct-term limit before settling.
    TermsLimit,
}

#[derive(Debug, Clone)]
pub struct DerivationReport {
    pub start: Term,
    pub outcome: DlOutcome,
    /// Distinct terms explored.
    pub explored: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("term must be ground")]
    NonGround,
}

enum Stop {
    Cycle(Vec<Term>),
    Depth,
    Terms,
}

/// Longest-path analysis over the rewrite graph of a system, with a memo
/// table shared across start terms.
pub struct DerivationAnalyzer<'a> {
    trs: &'a Trs,
    limits: Limits,
    memo: HashMap<Term, u64>,
    on_path: HashSet<Term>,
    path: Vec<Term>,
}

impl<'a> DerivationAnalyzer<'a> {
    pub fn new(trs: &'a Trs, limits: Limits) -> Self {
        DerivationAnalyzer {
            trs,
            limits,
            memo: HashMap::new(),
            on_path: HashSet::new(),
            path: Vec::new(),
        }
    }

    pub fn explored(&self) -> usize {
        self.memo.len()
    }

    /// Exact longest derivation length of a ground term, or the reason it
    /// has none.
    pub fn length(&mut self, t: &Term) -> Result<u64, DlOutcome> {
        match self.visit(t) {
            Ok(n) => Ok(n),
            Err(Stop::Cycle(w)) => Err(DlOutcome::Cycle(w)),
            Err(Stop::Depth) => Err(DlOutcome::DepthLimit),
            Err(Stop::Terms) => Err(DlOutcome::TermsLimit),
        }
    }

    fn visit(&mut self, t: &Term) -> Result<u64, Stop> {
        if let Some(&n) = self.memo.get(t) {
            return Ok(n);
        }
        if self.on_path.contains(t) {
            let start = self
                .path
                .iter()
                .position(|u| u == t)
                .expect("term is on the current path");
            return Err(Stop::Cycle(self.path[start..].to_vec()));
        }
        if self.path.len() >= self.limits.max_depth {
            return Err(Stop::Depth);
        }
        if self.memo.len() + self.on_path.len() >= self.limits.max_terms {
            return Err(Stop::Terms);
        }
        self.on_path.insert(t.clone());
        self.path.push(t.clone());
        let mut best = 0u64;
        let mut result = Ok(());
        for step in successors(t, self.trs) {
            match self.visit(&step.target) {
                Ok(n) => best = best.max(n + 1),
                Err(stop) => {
                    result = Err(stop);
                    break;
                }
            }
        }
        self.path.pop();
        self.on_path.remove(t);
        result.map(|()| {
            self.memo.insert(t.clone(), best);
            best
        })
    }
}

/// Longest derivation starting from one ground term.
pub fn derivation_length(
    t: &Term,
    trs: &Trs,
    limits: Limits,
) -> Result<DerivationReport, RewriteError> {
    if !t.is_ground() {
        return Err(RewriteError::NonGround);
    }
    let mut analyzer = DerivationAnalyzer::new(trs, limits);
    let outcome = match analyzer.length(t) {
        Ok(n) => DlOutcome::Length(n),
        Err(o) => o,
    };
    Ok(DerivationReport {
        start: t.clone(),
        outcome,
        explored: analyzer.explored().max(1),
    })
}

/// All ground terms over the signature up to `max_size` nodes, ordered by
/// size and then by printed form, so probe reports are reproducible.
pub fn enumerate_ground_terms(sig: &Signature, max_size: usize) -> Vec<Term> {
    // by_size[n] holds all terms of exactly n nodes.
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    for size in 1..=max_size {
        let mut bucket = Vec::new();
        for (id, sym) in sig.iter() {
            let arity = sym.arity();
            if arity == 0 {
                if size == 1 {
                    bucket.push(Term::constant(id));
                }
                continue;
            }
            if size < 1 + arity {
                continue;
            }
            // Distribute size - 1 nodes over the arguments.
            let mut parts = Vec::new();
            compositions(size - 1, arity, &mut Vec::new(), &mut parts);
            for comp in parts {
                let mut choices: Vec<Vec<Term>> = vec![Vec::new()];
                for &n in &comp {
                    let mut next = Vec::new();
                    for prefix in &choices {
                        for arg in &by_size[n] {
                            let mut ext = prefix.clone();
                            ext.push(arg.clone());
                            next.push(ext);
                        }
                    }
                    choices = next;
                }
                for args in choices {
                    bucket.push(Term::App(id, args));
                }
            }
        }
        by_size[size] = bucket;
    }
    let mut out: Vec<Term> = Vec::new();
    for size in 1..=max_size {
        let mut bucket = std::mem::take(&mut by_size[size]);
        bucket.sort_by_key(|t| t.display(sig).to_string());
        out.extend(bucket);
    }
    out
}

fn compositions(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        if total >= 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    for first in 1..=total.saturating_sub(parts - 1) {
        cur.push(first);
        compositions(total - first, parts - 1, cur, out);
        cur.pop();
    }
}

/// One finding of the termination probe.
#[derive(Debug, Clone)]
pub struct ProbeFinding {
    pub start: Term,
    pub outcome: DlOutcome,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub starts_checked: usize,
    /// Start terms with an infinite derivation.
    pub nonterminating: Vec<ProbeFinding>,
    /// Start terms whose analysis hit a limit.
    pub limited: Vec<ProbeFinding>,
    /// Largest finite derivation length seen.
    pub max_length: u64,
}

/// Runs the derivation-length analysis on every ground term up to
/// `size_bound`, reporting any nontermination and any limit hits.
pub fn termination_probe(trs: &Trs, size_bound: usize, limits: Limits) -> ProbeReport {
    let mut analyzer = DerivationAnalyzer::new(trs, limits);
    let mut report = ProbeReport {
        starts_checked: 0,
        nonterminating: Vec::new(),
        limited: Vec::new(),
        max_length: 0,
    };
    for t in enumerate_ground_terms(&trs.signature, size_bound) {
        report.starts_checked += 1;
        match analyzer.length(&t) {
            Ok(n) => report.max_length = report.max_length.max(n),
            Err(outcome @ DlOutcome::Cycle(_)) => {
                report.nonterminating.push(ProbeFinding { start: t, outcome });
            }
            Err(outcome) => {
                report.limited.push(ProbeFinding { start: t, outcome });
            }
        }
    }
    report
}

/// Result of innermost normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalization {
    /// Normal form and the number of steps taken.
    Normal(Term, u64),
    /// The step budget ran out.
    StepLimit,
}

/// Leftmost-innermost reduction to normal form.
pub fn normalize(t: &Term, trs: &Trs, max_steps: u64) -> Result<Normalization, RewriteError> {
    if !t.is_ground() {
        return Err(RewriteError::NonGround);
    }
    struct Budget {
        left: u64,
    }
    fn reduce(t: &Term, trs: &Trs, budget: &mut Budget) -> Option<Term> {
        match t {
            Term::Var(_) => unreachable!("ground term"),
            Term::App(f, args) => {
                let args = args
                    .iter()
                    .map(|a| reduce(a, trs, budget))
                    .collect::<Option<Vec<_>>>()?;
                let mut cur = Term::App(*f, args);
                loop {
                    let mut fired = false;
                    for rule in &trs.rules {
                        if let Some(binding) = match_term(&rule.lhs, &cur) {
                            if budget.left == 0 {
                                return None;
                            }
                            budget.left -= 1;
                            let image = binding
                                .apply_ground(&rule.rhs)
                                .expect("rule variables bound");
                            // The contractum may contain fresh redexes below
                            // the root; go innermost again.
                            cur = reduce(&image, trs, budget)?;
                            fired = true;
                            break;
                        }
                    }
                    if !fired {
                        return Some(cur);
                    }
                }
            }
        }
    }
    let mut budget = Budget { left: max_steps };
    match reduce(t, trs, &mut budget) {
        Some(nf) => Ok(Normalization::Normal(nf, max_steps - budget.left)),
        None => Ok(Normalization::StepLimit),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_trs};

    const R_PR: &str = "\
signature
  0 : constructor 0;0
  s : constructor 0;1
  f : defined 0;2
  g : defined 0;1
  h : defined 0;3
precedence
  f > g
  f > h
rules
  f(; 0, y) -> g(; y)
  f(; s(; x), y) -> h(; x, y, f(; x, y))
";

    const LOOP: &str = "\
signature
  c : constructor 0;0
  a : defined 0;0
rules
  a -> a
";

    fn t(trs: &Trs, s: &str) -> Term {
        parse_term(&trs.signature, s).unwrap()
    }

    #[test]
    fn successor_examples() {
        let trs = parse_trs(R_PR).unwrap();
        let steps = successors(&t(&trs, "f(; 0, 0)"), &trs);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].target, t(&trs, "g(; 0)"));
        assert_eq!(steps[0].rule_index, 0);
        assert_eq!(steps[0].position, Vec::<usize>::new());

        assert!(successors(&t(&trs, "0"), &trs).is_empty());

        let steps = successors(&t(&trs, "f(; s(; 0), 0)"), &trs);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].target, t(&trs, "h(; 0, 0, f(; 0, 0))"));
        assert_eq!(steps[0].rule_index, 1);
    }

    #[test]
    fn successors_stay_ground() {
        let trs = parse_trs(R_PR).unwrap();
        let start = t(&trs, "f(; s(; s(; 0)), s(; 0))");
        let mut frontier = vec![start];
        for _ in 0..4 {
            let mut next = Vec::new();
            for u in &frontier {
                for step in successors(u, &trs) {
                    assert!(step.target.is_ground());
                    next.push(step.target);
                }
            }
            frontier = next;
        }
    }

    #[test]
    fn derivation_lengths_match_recursion_depth() {
        let trs = parse_trs(R_PR).unwrap();
        for n in 0..=6u32 {
            let mut term = String::from("0");
            for _ in 0..n {
                term = format!("s(; {term})");
            }
            let start = t(&trs, &format!("f(; {term}, 0)"));
            let report = derivation_length(&start, &trs, Limits::default()).unwrap();
            assert_eq!(report.outcome, DlOutcome::Length(n as u64 + 1), "n = {n}");
        }
        // Normal forms have no derivation.
        let report = derivation_length(&t(&trs, "0"), &trs, Limits::default()).unwrap();
        assert_eq!(report.outcome, DlOutcome::Length(0));
    }

    #[test]
    fn self_loop_is_a_cycle_witness() {
        let trs = parse_trs(LOOP).unwrap();
        let a = t(&trs, "a");
        let report = derivation_length(&a, &trs, Limits::default()).unwrap();
        assert_eq!(report.outcome, DlOutcome::Cycle(vec![a]));
    }

    #[test]
    fn growing_system_hits_limits() {
        let trs = parse_trs(
            "\
signature
  c : constructor 0;0
  w : constructor 0;1
  a : defined 0;1
rules
  a(; x) -> a(; w(; x))
",
        )
        .unwrap();
        let start = t(&trs, "a(; c)");
        let report = derivation_length(
            &start,
            &trs,
            Limits {
                max_terms: 100_000,
                max_depth: 50,
            },
        )
        .unwrap();
        assert_eq!(report.outcome, DlOutcome::DepthLimit);
        let report = derivation_length(
            &start,
            &trs,
            Limits {
                max_terms: 10,
                max_depth: 5_000,
            },
        )
        .unwrap();
        assert_eq!(report.outcome, DlOutcome::TermsLimit);
    }

    #[test]
    fn probe_finds_loops_and_clears_terminating_systems() {
        let trs = parse_trs(R_PR).unwrap();
        let report = termination_probe(&trs, 8, Limits::default());
        assert!(report.nonterminating.is_empty());
        assert!(report.limited.is_empty());
        assert!(report.starts_checked > 100);

        let looping = parse_trs(LOOP).unwrap();
        let report = termination_probe(&looping, 1, Limits::default());
        assert_eq!(report.nonterminating.len(), 1);
    }

    #[test]
    fn ground_enumeration_is_sorted_and_complete() {
        let trs = parse_trs(LOOP).unwrap();
        let terms = enumerate_ground_terms(&trs.signature, 1);
        let printed: Vec<String> = terms
            .iter()
            .map(|t| t.display(&trs.signature).to_string())
            .collect();
        assert_eq!(printed, vec!["a", "c"]);

        let trs = parse_trs(R_PR).unwrap();
        let terms = enumerate_ground_terms(&trs.signature, 3);
        // Sizes 1..3 over 0, s, g (f and h need more room).
        assert!(terms.contains(&t(&trs, "s(; s(; 0))")));
        assert!(terms.contains(&t(&trs, "g(; g(; 0))")));
        assert!(terms.iter().all(|u| u.size() <= 3));
        let mut seen = std::collections::HashSet::new();
        assert!(terms.iter().all(|u| seen.insert(u.clone())), "no duplicates");
    }

    #[test]
    fn normalize_examples() {
        let trs = parse_trs(LOOP).unwrap();
        assert_eq!(
            normalize(&t(&trs, "a"), &trs, 100).unwrap(),
            Normalization::StepLimit
        );
        assert_eq!(
            normalize(&t(&trs, "c"), &trs, 100).unwrap(),
            Normalization::Normal(t(&trs, "c"), 0)
        );
    }
}
