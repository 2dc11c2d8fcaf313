//! The fast-growing function hierarchy, parameter derivation, and the
//! budgeted numeric interpretation of ground terms.
//!
//! All arithmetic is exact over arbitrary-precision naturals. Every
//! intermediate value is checked against a bit-length budget; blowing the
//! budget is a first-class [`Eval::Overflow`] outcome, never an
//! approximation. At any parameters admitted here the interpretation of a
//! ground term is astronomically large, so interpreting real terms
//! reports overflow by design; the hierarchy functions themselves are
//! numerically checkable at small inputs.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::term::{Signature, Term};
use crate::trs::Trs;

/// Cap on the bit length of any intermediate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_bits: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { max_bits: 1_000_000 }
    }
}

impl EvalBudget {
    pub fn bits(max_bits: u64) -> Self {
        EvalBudget { max_bits }
    }
}

/// Outcome of a budgeted evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eval {
    Value(BigUint),
    Overflow,
}

impl Eval {
    pub fn value(&self) -> Option<&BigUint> {
        match self {
            Eval::Value(v) => Some(v),
            Eval::Overflow => None,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, Eval::Overflow)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("the base d must be at least 2, got {0}")]
    BaseTooSmall(u64),
    #[error("the depth parameter must be at least 2, got {0}")]
    EllTooSmall(u64),
    #[error("the hierarchy needs at least one argument")]
    NoArguments,
    #[error("interpretation requires a ground term")]
    NonGround,
}

/// Marker for budget exhaustion inside the evaluators.
struct Overflowed;

type R = Result<BigUint, Overflowed>;

fn checked(v: BigUint, budget: &EvalBudget) -> R {
    if v.bits() > budget.max_bits {
        Err(Overflowed)
    } else {
        Ok(v)
    }
}

/// `d^e` under the budget. The exponent is itself an intermediate value.
fn pow_budget(d: u64, e: &BigUint, budget: &EvalBudget) -> R {
    if e.bits() > budget.max_bits {
        return Err(Overflowed);
    }
    // d >= 2, so the result has at least e + 1 bits; anything whose
    // exponent exceeds the budget overflows without being materialized.
    let Some(e64) = u64::try_from(e).ok() else {
        return Err(Overflowed);
    };
    if e64 >= budget.max_bits {
        return Err(Overflowed);
    }
    // Square-and-multiply with a budget check per step.
    let mut base = checked(BigUint::from(d), budget)?;
    let mut acc = BigUint::one();
    let mut exp = e64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = checked(acc * &base, budget)?;
        }
        exp >>= 1;
        if exp > 0 {
            base = checked(&base * &base, budget)?;
        }
    }
    Ok(acc)
}

/// Applies `f` `count` times to `start`. The iteration count may be huge;
/// it only needs to fit the budget because the iterated functions at least
/// exponentiate, so the value side trips the budget after a handful of
/// rounds regardless.
fn iterate(
    count: &BigUint,
    start: BigUint,
    budget: &EvalBudget,
    f: &mut impl FnMut(BigUint) -> R,
) -> R {
    if count.bits() > budget.max_bits {
        return Err(Overflowed);
    }
    let mut i = BigUint::zero();
    let mut v = start;
    while &i < count {
        v = f(v)?;
        i += 1u32;
    }
    Ok(v)
}

fn fm_rec(m: u64, x: &BigUint, d: u64, budget: &EvalBudget) -> R {
    if m == 0 {
        let e = checked(x + 1u32, budget)?;
        return pow_budget(d, &e, budget);
    }
    let count = checked((x + 1u32) * d, budget)?;
    iterate(&count, x.clone(), budget, &mut |v| {
        fm_rec(m - 1, &v, d, budget)
    })
}

/// Level `m` of the hierarchy at `x`: level 0 is `d^(x+1)`, level `m+1`
/// iterates level `m` exactly `d * (1 + x)` times on `x`.
pub fn f_m(m: u64, x: &BigUint, d: u64, budget: &EvalBudget) -> Result<Eval, InterpError> {
    if d < 2 {
        return Err(InterpError::BaseTooSmall(d));
    }
    Ok(match fm_rec(m, x, d, budget) {
        Ok(v) => Eval::Value(v),
        Err(Overflowed) => Eval::Overflow,
    })
}

/// Multi-argument stage: stage 0 is constant 0; stage `n+1` iterates level
/// `m` on a prefix sum of the arguments, the iteration count fed by stage
/// `n` plus `d * (1 + x_{n+1})` while arguments remain, plus a flat `d`
/// once they are used up.
fn fmn_rec(m: u64, n: u64, xs: &[BigUint], d: u64, budget: &EvalBudget) -> R {
    let k = xs.len() as u64;
    let mut cur = BigUint::zero();
    for j in 0..n {
        let (count, base) = if j < k {
            let xj = &xs[j as usize];
            let count = checked(&cur + (xj + 1u32) * d, budget)?;
            let base = xs[..=j as usize].iter().sum();
            (count, base)
        } else {
            let count = checked(&cur + d, budget)?;
            let base = xs.iter().sum();
            (count, base)
        };
        cur = iterate(&count, base, budget, &mut |v| fm_rec(m, &v, d, budget))?;
    }
    Ok(cur)
}

/// Stage `n` of the multi-argument hierarchy over `xs` (at least one
/// argument; symbols without normal positions are handled inside
/// [`interpret`] with an empty argument sum).
pub fn f_mn(
    m: u64,
    n: u64,
    xs: &[BigUint],
    d: u64,
    budget: &EvalBudget,
) -> Result<Eval, InterpError> {
    if d < 2 {
        return Err(InterpError::BaseTooSmall(d));
    }
    if xs.is_empty() {
        return Err(InterpError::NoArguments);
    }
    Ok(match fmn_rec(m, n, xs, d, budget) {
        Ok(v) => Eval::Value(v),
        Err(Overflowed) => Eval::Overflow,
    })
}

/// Parameters of the interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpParams {
    pub ell: u64,
    pub d: u64,
    /// Upper bound on normal arities, never below 2.
    pub k_max: u64,
    pub rank: Vec<usize>,
}

impl InterpParams {
    pub fn new(ell: u64, d: u64, k_max: u64, rank: Vec<usize>) -> Result<Self, InterpError> {
        if ell < 2 {
            return Err(InterpError::EllTooSmall(ell));
        }
        if d < 2 {
            return Err(InterpError::BaseTooSmall(d));
        }
        Ok(InterpParams {
            ell,
            d,
            k_max: k_max.max(2),
            rank,
        })
    }
}

/// Derives interpretation parameters from a system:
/// the depth is the largest right-hand side size (at least 2), the arity
/// bound is the largest normal arity (at least 2), and the base dominates
/// every arity plus one, `ell * (k_max + 2) + 2`, and every right-hand
/// side size plus one.
pub fn derive_params(trs: &Trs) -> InterpParams {
    let ell = trs
        .rules
        .iter()
        .map(|r| r.rhs.size() as u64)
        .max()
        .unwrap_or(0)
        .max(2);
    let k_max = trs
        .signature
        .iter()
        .map(|(_, s)| s.normal_arity() as u64)
        .max()
        .unwrap_or(0)
        .max(2);
    let arities = trs.signature.iter().map(|(_, s)| s.arity() as u64 + 1);
    let rhs_sizes = trs.rules.iter().map(|r| r.rhs.size() as u64 + 1);
    let d = arities
        .chain(rhs_sizes)
        .chain(std::iter::once(ell * (k_max + 2) + 2))
        .max()
        .expect("nonempty");
    InterpParams {
        ell,
        d,
        k_max,
        rank: trs.canonical_ranks(),
    }
}

/// Outcome of interpreting a ground term. On overflow, `at` is the deepest
/// subterm whose own arguments all evaluated but whose value blew the
/// budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interpretation {
    Value(BigUint),
    Overflow { at: Term },
}

impl Interpretation {
    pub fn is_overflow(&self) -> bool {
        matches!(self, Interpretation::Overflow { .. })
    }
}

fn interp_rec(
    t: &Term,
    sig: &Signature,
    params: &InterpParams,
    budget: &EvalBudget,
) -> Result<BigUint, Term> {
    let Term::App(f, _) = t else { unreachable!("ground term") };
    let (tn, ts) = t.split_args(sig).expect("application");
    let mut normal_values = Vec::with_capacity(tn.len());
    for a in tn {
        normal_values.push(interp_rec(a, sig, params, budget)?);
    }
    let mut safe_sum = BigUint::zero();
    for a in ts {
        safe_sum += interp_rec(a, sig, params, budget)?;
    }
    let m = params.rank[f.0] as u64 + params.ell;
    let expo = fmn_rec(m, params.k_max + 1, &normal_values, params.d, budget)
        .map_err(|Overflowed| t.clone())?;
    let power = pow_budget(params.d, &expo, budget).map_err(|Overflowed| t.clone())?;
    checked(power * (safe_sum + 1u32), budget).map_err(|Overflowed| t.clone())
}

/// Budgeted interpretation of a ground term: each application maps to
/// `d^(stage(K+1) over the normal arguments) * (sum of safe arguments + 1)`,
/// evaluated bottom-up.
pub fn interpret(
    t: &Term,
    sig: &Signature,
    params: &InterpParams,
    budget: &EvalBudget,
) -> Result<Interpretation, InterpError> {
    if !t.is_ground() {
        return Err(InterpError::NonGround);
    }
    Ok(match interp_rec(t, sig, params, budget) {
        Ok(v) => Interpretation::Value(v),
        Err(at) => Interpretation::Overflow { at },
    })
}

/// Diagnostic: the stage-`n` exponent of a ground term's root, i.e. the
/// multi-argument hierarchy at the root's level over the interpreted
/// normal arguments.
pub fn j_n(
    t: &Term,
    n: u64,
    sig: &Signature,
    params: &InterpParams,
    budget: &EvalBudget,
) -> Result<Interpretation, InterpError> {
    if !t.is_ground() {
        return Err(InterpError::NonGround);
    }
    let Term::App(f, _) = t else {
        return Err(InterpError::NonGround);
    };
    let (tn, _) = t.split_args(sig).expect("application");
    let mut normal_values = Vec::with_capacity(tn.len());
    for a in tn {
        match interp_rec(a, sig, params, budget) {
            Ok(v) => normal_values.push(v),
            Err(at) => return Ok(Interpretation::Overflow { at }),
        }
    }
    let m = params.rank[f.0] as u64 + params.ell;
    Ok(
        match fmn_rec(m, n, &normal_values, params.d, budget) {
            Ok(v) => Interpretation::Value(v),
            Err(Overflowed) => Interpretation::Overflow { at: t.clone() },
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_trs};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn level_zero_is_the_power() {
        let budget = EvalBudget::default();
        assert_eq!(
            f_m(0, &big(3), 2, &budget).unwrap(),
            Eval::Value(big(16))
        );
        assert_eq!(f_m(0, &big(0), 3, &budget).unwrap(), Eval::Value(big(3)));
        assert_eq!(f_m(0, &big(0), 1, &budget), Err(InterpError::BaseTooSmall(1)));
    }

    #[test]
    fn level_one_small_points() {
        let budget = EvalBudget::default();
        // Two applications of x -> 2^(x+1) starting from 0: 0, 2, 8.
        assert_eq!(f_m(1, &big(0), 2, &budget).unwrap(), Eval::Value(big(8)));
        // Three applications of x -> 3^(x+1) starting from 0: 3, 81, 3^82.
        let expect = BigUint::from(3u32).pow(82);
        assert_eq!(
            f_m(1, &big(0), 3, &budget).unwrap(),
            Eval::Value(expect)
        );
        // The fourth iterate of x -> 2^(x+1) on 1 is 2^(2^33 + 1), which
        // has far more than a million bits.
        assert_eq!(f_m(1, &big(1), 2, &budget).unwrap(), Eval::Overflow);
        assert_eq!(f_m(2, &big(1), 2, &budget).unwrap(), Eval::Overflow);
        assert_eq!(f_m(2, &big(0), 2, &budget).unwrap(), Eval::Overflow);
    }

    #[test]
    fn stage_zero_is_zero() {
        let budget = EvalBudget::default();
        for m in 0..4 {
            assert_eq!(
                f_mn(m, 0, &[big(7), big(9)], 2, &budget).unwrap(),
                Eval::Value(big(0))
            );
        }
        assert_eq!(
            f_mn(0, 1, &[], 2, &budget),
            Err(InterpError::NoArguments)
        );
    }

    #[test]
    fn stage_one_spot_check() {
        let budget = EvalBudget::default();
        // Two applications of x -> 2^(x+1) on 0.
        assert_eq!(
            f_mn(0, 1, &[big(0)], 2, &budget).unwrap(),
            Eval::Value(big(8))
        );
        // Matches the single-argument level above it at this point.
        assert_eq!(f_m(1, &big(0), 2, &budget).unwrap(), Eval::Value(big(8)));
        // Extra arguments beyond the stage do not change stage 1.
        assert_eq!(
            f_mn(0, 1, &[big(0), big(5)], 2, &budget).unwrap(),
            Eval::Value(big(8))
        );
    }

    #[test]
    fn derive_params_formulas() {
        let trs = parse_trs(
            "\
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
",
        )
        .unwrap();
        let p = derive_params(&trs);
        assert_eq!(p.ell, 6);
        assert_eq!(p.k_max, 2);
        assert_eq!(p.d, 26);
        let f = trs.signature.id_of("f").unwrap();
        assert_eq!(p.rank[f.0], 1);

        // A single rule with a two-node right side and unary symbols.
        let small = parse_trs(
            "\
signature
  c : constructor 0;0
  u : defined 0;1
  v : defined 0;1
precedence
  u > v
rules
  u(; x) -> v(; x)
",
        )
        .unwrap();
        let p2 = derive_params(&small);
        assert_eq!((p2.ell, p2.k_max, p2.d), (2, 2, 10));

        // Constants only: the arity bound still floors at 2.
        let consts = parse_trs("signature\n  c : constructor 0;0\nrules\n").unwrap();
        let p3 = derive_params(&consts);
        assert_eq!(p3.k_max, 2);
        assert_eq!(p3.ell, 2);
    }

    #[test]
    fn interpretation_overflows_at_real_parameters() {
        let trs = parse_trs(
            "\
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
",
        )
        .unwrap();
        let params = derive_params(&trs);
        let budget = EvalBudget::default();
        let zero = parse_term(&trs.signature, "0").unwrap();
        let out = interpret(&zero, &trs.signature, &params, &budget).unwrap();
        assert!(out.is_overflow());

        // Even artificially small parameters overflow on a constant.
        let minimal = InterpParams::new(2, 2, 2, vec![0; trs.signature.len()]).unwrap();
        let out2 = interpret(&zero, &trs.signature, &minimal, &budget).unwrap();
        match out2 {
            Interpretation::Overflow { at } => assert_eq!(at, zero),
            other => panic!("expected overflow, got {other:?}"),
        }

        // Stage 0 of the exponent is still computable.
        let j0 = j_n(&zero, 0, &trs.signature, &params, &budget).unwrap();
        assert_eq!(j0, Interpretation::Value(BigUint::zero()));

        let open = parse_term(&trs.signature, "s(; x)").unwrap();
        assert_eq!(
            interpret(&open, &trs.signature, &params, &budget),
            Err(InterpError::NonGround)
        );
    }

    #[test]
    fn overflow_verdicts_are_deterministic() {
        let trs = parse_trs(
            "signature\n  0 : constructor 0;0\n  s : constructor 0;1\nrules\n",
        )
        .unwrap();
        let params = InterpParams::new(2, 2, 2, vec![0, 0]).unwrap();
        let budget = EvalBudget::default();
        let t = parse_term(&trs.signature, "s(; s(; 0))").unwrap();
        let a = interpret(&t, &trs.signature, &params, &budget).unwrap();
        let b = interpret(&t, &trs.signature, &params, &budget).unwrap();
        assert_eq!(a, b);
        assert!(a.is_overflow());
    }
}
