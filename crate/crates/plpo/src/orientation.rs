//! Orientation of a whole system: check a given parameterization, validate
//! parameters against the declared precedence, and search the parameter
//! space exhaustively.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::orders::{plpo_gt, Certificate, Decider, DecisionMemo, OrderParams};
use crate::term::{Signature, SymbolId};
use crate::trs::Trs;

/// Per-rule outcome of a compatibility check.
#[derive(Debug, Clone)]
pub struct OrientationResult {
    /// True iff every rule carries a certificate.
    pub oriented: bool,
    /// One entry per rule, in rule order.
    pub per_rule: Vec<Option<Certificate>>,
    /// The parameters the check ran with.
    pub params: OrderParams,
    /// The separation the check ran with: one mask per symbol
    /// (`true` = normal position), in symbol order.
    pub separation: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RankMapLength { expected: usize, got: usize },
    LexMapLength { expected: usize, got: usize },
    StrictPairViolated { above: String, below: String },
    EqualPairViolated { left: String, right: String },
    LexOnConstructor { symbol: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RankMapLength { expected, got } => {
                write!(f, "rank map covers {got} symbols, signature has {expected}")
            }
            Violation::LexMapLength { expected, got } => {
                write!(f, "lex map covers {got} symbols, signature has {expected}")
            }
            Violation::StrictPairViolated { above, below } => {
                write!(f, "declared `{above} > {below}` not reflected by the ranks")
            }
            Violation::EqualPairViolated { left, right } => {
                write!(f, "declared `{left} = {right}` not reflected by the ranks")
            }
            Violation::LexOnConstructor { symbol } => {
                write!(f, "constructor `{symbol}` cannot be compared lexicographically")
            }
        }
    }
}

#[derive(Debug, Error)]
#[error("order parameters are inconsistent with the system: {}",
        .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidParams(pub Vec<Violation>);

/// Checks that `params` respects the declared precedence (every declared
/// strict pair drops in rank, every declared equality shares a rank), that
/// the lex set contains only defined symbols, and that the maps cover the
/// signature. Violations come back as data.
pub fn validate_params(trs: &Trs, params: &OrderParams) -> Vec<Violation> {
    let sig = &trs.signature;
    let n = sig.len();
    let mut out = Vec::new();
    if params.rank.len() != n {
        out.push(Violation::RankMapLength {
            expected: n,
            got: params.rank.len(),
        });
    }
    if params.lex.len() != n {
        out.push(Violation::LexMapLength {
            expected: n,
            got: params.lex.len(),
        });
    }
    if params.rank.len() != n || params.lex.len() != n {
        return out;
    }
    for &(a, b) in &trs.precedence.strict {
        if params.rank[a.0] <= params.rank[b.0] {
            out.push(Violation::StrictPairViolated {
                above: sig.name(a).to_string(),
                below: sig.name(b).to_string(),
            });
        }
    }
    for &(a, b) in &trs.precedence.equal {
        if params.rank[a.0] != params.rank[b.0] {
            out.push(Violation::EqualPairViolated {
                left: sig.name(a).to_string(),
                right: sig.name(b).to_string(),
            });
        }
    }
    for (id, sym) in sig.iter() {
        if params.lex[id.0] && sym.is_constructor() {
            out.push(Violation::LexOnConstructor {
                symbol: sym.name.clone(),
            });
        }
    }
    out
}

/// Checks every rule of the system against the order induced by `params`
/// and the signature's current separation.
pub fn check_trs(trs: &Trs, params: &OrderParams) -> Result<OrientationResult, InvalidParams> {
    let violations = validate_params(trs, params);
    if !violations.is_empty() {
        return Err(InvalidParams(violations));
    }
    let sig = &trs.signature;
    let per_rule: Vec<Option<Certificate>> = trs
        .rules
        .iter()
        .map(|r| plpo_gt(sig, params, &r.lhs, &r.rhs))
        .collect();
    let oriented = per_rule.iter().all(Option::is_some);
    Ok(OrientationResult {
        oriented,
        per_rule,
        params: params.clone(),
        separation: sig.iter().map(|(_, s)| s.mask().to_vec()).collect(),
    })
}

/// What the search may vary; anything not varied is taken from the file.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    /// Rank values range over `0..max_rank`; defaults to the signature size,
    /// which loses no generality (see [`search_orientation`]).
    pub max_rank: Option<usize>,
    pub vary_rank: bool,
    pub vary_lex: bool,
    pub vary_separation: bool,
    pub permutation_extension: bool,
    pub timeout: Option<Duration>,
}

impl SearchSpace {
    /// Vary everything: ranks, lex sets and separations.
    pub fn full() -> Self {
        SearchSpace {
            max_rank: None,
            vary_rank: true,
            vary_lex: true,
            vary_separation: true,
            permutation_extension: false,
            timeout: None,
        }
    }

    pub fn fixed() -> Self {
        SearchSpace {
            max_rank: None,
            vary_rank: false,
            vary_lex: false,
            vary_separation: false,
            permutation_extension: false,
            timeout: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search timed out after {candidates} candidates")]
    Timeout { candidates: u64 },
}

/// Search result plus how much of the space was visited.
#[derive(Debug)]
pub struct SearchReport {
    pub found: Option<OrientationResult>,
    pub candidates: u64,
}

/// Exhaustive search for an orienting assignment.
///
/// Candidates are enumerated ranks-major, then lex sets, then separations,
/// each axis lexicographically, and the first success is returned, so the
/// result is deterministic. Rank maps are restricted to those whose used
/// values form a downward-closed set `{0..r}`: the order only consults
/// rank comparisons, so any successful rank map compresses to such a map
/// without changing any comparison, and the compression is
/// lexicographically no larger than the original. Exhausting the space
/// therefore proves that no rank map (of any magnitude), lex set and
/// separation assignment within the varied axes orients the system.
pub fn search_orientation(
    trs: &Trs,
    space: &SearchSpace,
) -> Result<SearchReport, SearchError> {
    let n = trs.signature.len();
    let max_rank = space.max_rank.unwrap_or(n).max(1);
    let deadline = space.timeout.map(|d| Instant::now() + d);

    // Rule indices by ascending right-hand side size: cheap failures first.
    let mut rule_order: Vec<usize> = (0..trs.rules.len()).collect();
    rule_order.sort_by_key(|&i| trs.rules[i].rhs.size());

    let declared_ranks = trs.canonical_ranks();
    let declared_lex: Vec<bool> = trs.signature.iter().map(|(_, s)| s.lex).collect();

    let lex_choices: Vec<Vec<bool>> = if space.vary_lex {
        lex_subsets(&trs.signature)
    } else {
        vec![declared_lex]
    };

    let mut sig = trs.signature.clone();
    let mut memo = DecisionMemo::default();
    let mut candidates: u64 = 0;

    let mut rank_iter = RankMaps::new(n, max_rank, space.vary_rank, declared_ranks);
    while rank_iter.advance() {
        for lex in &lex_choices {
            let params = OrderParams {
                rank: rank_iter.current().to_vec(),
                lex: lex.clone(),
                permutation_extension: space.permutation_extension,
            };
            let mut sep_iter = SeparationMaps::new(&trs.signature, space.vary_separation);
            while sep_iter.advance() {
                candidates += 1;
                if candidates % 4096 == 0 {
                    if let Some(d) = deadline {
                        if Instant::now() > d {
                            return Err(SearchError::Timeout { candidates });
                        }
                    }
                }
                let masks = sep_iter.current();
                for (i, mask) in masks.iter().enumerate() {
                    sig.set_separation(SymbolId(i), mask)
                        .expect("mask lengths match arities");
                }
                memo.clear();
                let mut dec = Decider::new(&sig, &params, &mut memo);
                let all = rule_order
                    .iter()
                    .all(|&i| dec.plpo(&trs.rules[i].lhs, &trs.rules[i].rhs));
                if all {
                    let per_rule: Vec<Option<Certificate>> = trs
                        .rules
                        .iter()
                        .map(|r| plpo_gt(&sig, &params, &r.lhs, &r.rhs))
                        .collect();
                    debug_assert!(per_rule.iter().all(Option::is_some));
                    return Ok(SearchReport {
                        found: Some(OrientationResult {
                            oriented: true,
                            per_rule,
                            params,
                            separation: masks.to_vec(),
                        }),
                        candidates,
                    });
                }
            }
        }
    }

    Ok(SearchReport {
        found: None,
        candidates,
    })
}

/// All subsets of the defined symbols, as full-signature boolean maps, in
/// ascending bitmask order over the defined symbols.
fn lex_subsets(sig: &Signature) -> Vec<Vec<bool>> {
    let defined: Vec<usize> = sig
        .iter()
        .filter(|(_, s)| s.is_defined())
        .map(|(id, _)| id.0)
        .collect();
    let mut out = Vec::with_capacity(1 << defined.len());
    for bits in 0u64..(1u64 << defined.len()) {
        let mut v = vec![false; sig.len()];
        for (j, &idx) in defined.iter().enumerate() {
            if bits >> j & 1 == 1 {
                v[idx] = true;
            }
        }
        out.push(v);
    }
    out
}

/// Lexicographic odometer over rank vectors in `{0..max}^n`, filtered to
/// maps whose used values are downward closed; or a single fixed map.
/// Call [`RankMaps::advance`] to step, then read [`RankMaps::current`].
struct RankMaps {
    vary: bool,
    current: Vec<usize>,
    max: usize,
    started: bool,
    done: bool,
}

impl RankMaps {
    fn new(n: usize, max: usize, vary: bool, declared: Vec<usize>) -> Self {
        RankMaps {
            vary,
            current: if vary { vec![0; n] } else { declared },
            max,
            started: false,
            done: false,
        }
    }

    fn current(&self) -> &[usize] {
        &self.current
    }

    fn advance(&mut self) -> bool {
        if !self.vary {
            let first = !self.started;
            self.started = true;
            return first;
        }
        loop {
            if self.done {
                return false;
            }
            if !self.started {
                self.started = true;
            } else if !self.step() {
                return false;
            }
            if is_downward_closed(&self.current) {
                return true;
            }
        }
    }

    fn step(&mut self) -> bool {
        for i in (0..self.current.len()).rev() {
            if self.current[i] + 1 < self.max {
                self.current[i] += 1;
                for v in &mut self.current[i + 1..] {
                    *v = 0;
                }
                return true;
            }
        }
        self.done = true;
        false
    }
}

fn is_downward_closed(v: &[usize]) -> bool {
    let max = v.iter().copied().max().unwrap_or(0);
    (0..=max).all(|r| v.contains(&r))
}

/// All rank maps the search considers, in its enumeration order: vectors
/// in `{0..max}^n` whose used values are downward closed. Every rank map
/// is equivalent to exactly one of these.
pub fn canonical_rank_maps(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut it = RankMaps::new(n, max.max(1), true, Vec::new());
    while it.advance() {
        out.push(it.current().to_vec());
    }
    out
}

/// Mixed-radix odometer over per-symbol separation masks (bit `j` set means
/// position `j` is normal), or the single declared assignment. Same
/// advance/current protocol as [`RankMaps`].
struct SeparationMaps {
    vary: bool,
    arities: Vec<usize>,
    counters: Vec<u64>,
    masks: Vec<Vec<bool>>,
    started: bool,
    done: bool,
}

impl SeparationMaps {
    fn new(sig: &Signature, vary: bool) -> Self {
        let arities: Vec<usize> = sig.iter().map(|(_, s)| s.arity()).collect();
        let masks = if vary {
            arities.iter().map(|&a| vec![false; a]).collect()
        } else {
            sig.iter().map(|(_, s)| s.mask().to_vec()).collect()
        };
        SeparationMaps {
            vary,
            counters: vec![0; arities.len()],
            arities,
            masks,
            started: false,
            done: false,
        }
    }

    fn current(&self) -> &[Vec<bool>] {
        &self.masks
    }

    fn advance(&mut self) -> bool {
        if !self.vary {
            let first = !self.started;
            self.started = true;
            return first;
        }
        if self.done {
            return false;
        }
        if self.started {
            // Advance the mixed-radix counter, last symbol fastest.
            let mut i = self.counters.len();
            loop {
                if i == 0 {
                    self.done = true;
                    return false;
                }
                i -= 1;
                self.counters[i] += 1;
                if self.counters[i] < (1u64 << self.arities[i]) {
                    break;
                }
                self.counters[i] = 0;
            }
        } else {
            self.started = true;
        }
        for (i, &c) in self.counters.iter().enumerate() {
            for j in 0..self.arities[i] {
                self.masks[i][j] = c >> j & 1 == 1;
            }
        }
        true
    }
}
