//! Independent certificate checker.
//!
//! Walks a certificate tree and re-tests every case's side conditions
//! from scratch: symbol kinds, ranks, child counts, which term each child
//! relates, and the budget bookkeeping of the bounded judgments. It never
//! calls the decision procedures, and uses its own structural equivalence
//! test, so a certificate accepted here stands on its own.

use thiserror::Error;

use crate::orders::{Case, Certificate, Judgment, OrderParams};
use crate::term::{Signature, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid certificate: {0}")]
pub struct ReplayError(pub String);

fn reject<T>(msg: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError(msg.into()))
}

/// Validates a certificate against a signature and order parameters.
/// Bounded judgments at the root must carry a budget of at least 2.
pub fn replay(sig: &Signature, params: &OrderParams, cert: &Certificate) -> Result<(), ReplayError> {
    match cert.judgment {
        Judgment::AuxBounded(b) | Judgment::PlpoBounded(b) if b < 2 => {
            return reject(format!("root budget {b} is below 2"));
        }
        _ => {}
    }
    check(sig, params, cert)
}

/// Structural equivalence, local to the replayer: equal variables, or
/// rank-equal roots with matching arities and pairwise equivalent
/// arguments in display order.
fn eq_terms(sig: &Signature, params: &OrderParams, s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(a), Term::Var(b)) => a == b,
        (Term::App(f, _), Term::App(g, _)) => {
            let (fs, gs) = (sig.symbol(*f), sig.symbol(*g));
            if params.rank[f.0] != params.rank[g.0]
                || fs.normal_arity() != gs.normal_arity()
                || fs.safe_arity() != gs.safe_arity()
            {
                return false;
            }
            let (sn, ss) = s.split_args(sig).expect("application");
            let (tn, ts) = t.split_args(sig).expect("application");
            sn.iter().zip(&tn).all(|(a, b)| eq_terms(sig, params, a, b))
                && ss.iter().zip(&ts).all(|(a, b)| eq_terms(sig, params, a, b))
        }
        _ => false,
    }
}

/// Child-judgment expectations, per parent judgment.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Expect {
    /// Exactly the given judgment.
    Only(Judgment),
    /// The given judgment or an equivalence leaf.
    OrEquiv(Judgment),
}

fn matches_expect(j: Judgment, e: Expect) -> bool {
    match e {
        Expect::Only(x) => j == x,
        Expect::OrEquiv(x) => j == x || j == Judgment::Equiv,
    }
}

fn check_child(
    sig: &Signature,
    params: &OrderParams,
    child: &Certificate,
    expect: Expect,
    lhs: &Term,
    rhs: &Term,
) -> Result<(), ReplayError> {
    if !matches_expect(child.judgment, expect) {
        return reject(format!("child judgment {} not admissible here", child.judgment));
    }
    if child.lhs != *lhs {
        return reject("child relates the wrong left-hand term");
    }
    if child.rhs != *rhs {
        return reject("child relates the wrong right-hand term");
    }
    check(sig, params, child)
}

/// One-child descent cases: the child's left side must be one of the
/// allowed argument terms.
fn check_descent_child(
    sig: &Signature,
    params: &OrderParams,
    child: &Certificate,
    expect: Expect,
    allowed: &[&Term],
    rhs: &Term,
) -> Result<(), ReplayError> {
    if !matches_expect(child.judgment, expect) {
        return reject(format!("child judgment {} not admissible here", child.judgment));
    }
    if !allowed.iter().any(|a| **a == child.lhs) {
        return reject("descent child does not start from an argument");
    }
    if child.rhs != *rhs {
        return reject("descent child relates the wrong right-hand term");
    }
    check(sig, params, child)
}

fn the_only_child(cert: &Certificate) -> Result<&Certificate, ReplayError> {
    match cert.children.as_slice() {
        [c] => Ok(c),
        other => reject(format!("expected exactly one child, found {}", other.len())),
    }
}

fn check(sig: &Signature, params: &OrderParams, cert: &Certificate) -> Result<(), ReplayError> {
    let s = &cert.lhs;
    let t = &cert.rhs;
    match cert.judgment {
        Judgment::Equiv => {
            if cert.case != Case::Equiv {
                return reject("equivalence node with a non-equivalence case");
            }
            if !cert.children.is_empty() {
                return reject("equivalence nodes carry no children");
            }
            if !eq_terms(sig, params, s, t) {
                return reject("terms are not equivalent");
            }
            Ok(())
        }
        Judgment::Aux | Judgment::AuxBounded(_) => check_aux(sig, params, cert),
        Judgment::Plpo | Judgment::PlpoBounded(_) => check_plpo(sig, params, cert),
        Judgment::Lpo => check_lpo(sig, params, cert),
    }
}

fn check_aux(sig: &Signature, params: &OrderParams, cert: &Certificate) -> Result<(), ReplayError> {
    let s = &cert.lhs;
    let t = &cert.rhs;
    let Term::App(f, _) = s else {
        return reject("left-hand side of an auxiliary judgment must be an application");
    };
    let fsym = sig.symbol(*f);
    let same = Expect::OrEquiv(cert.judgment);
    let (sn, ss) = s.split_args(sig).expect("application");
    match &cert.case {
        Case::Aux1 => {
            if !fsym.is_constructor() {
                return reject("Def1-Case1 requires a constructor root");
            }
            let mut allowed = sn.clone();
            allowed.extend(ss.iter().copied());
            check_descent_child(sig, params, the_only_child(cert)?, same, &allowed, t)
        }
        Case::Aux2 => {
            if !fsym.is_defined() {
                return reject("Def1-Case2 requires a defined root");
            }
            check_descent_child(sig, params, the_only_child(cert)?, same, &sn, t)
        }
        Case::Aux3 => {
            if !fsym.is_defined() {
                return reject("Def1-Case3 requires a defined root");
            }
            let Term::App(g, _) = t else {
                return reject("Def1-Case3 requires an application on the right");
            };
            if params.rank[f.0] <= params.rank[g.0] {
                return reject("Def1-Case3 requires a strict rank drop");
            }
            let inner = match cert.judgment {
                Judgment::Aux => Judgment::Aux,
                Judgment::AuxBounded(b) => {
                    if b < 1 {
                        return reject("rank descent with an exhausted budget");
                    }
                    Judgment::AuxBounded(b - 1)
                }
                _ => unreachable!(),
            };
            let targs = t.display_args(sig);
            if cert.children.len() != targs.len() {
                return reject("Def1-Case3 needs one child per argument of the right-hand side");
            }
            for (child, tj) in cert.children.iter().zip(targs) {
                check_child(sig, params, child, Expect::Only(inner), s, tj)?;
            }
            Ok(())
        }
        other => reject(format!("case {other} does not justify an auxiliary judgment")),
    }
}

fn check_plpo(sig: &Signature, params: &OrderParams, cert: &Certificate) -> Result<(), ReplayError> {
    let s = &cert.lhs;
    let t = &cert.rhs;
    let Term::App(f, _) = s else {
        return reject("left-hand side of a path-order judgment must be an application");
    };
    let fsym = sig.symbol(*f);
    let aux_j = match cert.judgment {
        Judgment::Plpo => Judgment::Aux,
        Judgment::PlpoBounded(l) => Judgment::AuxBounded(l),
        _ => unreachable!(),
    };
    let same = cert.judgment;
    let (sn, ss) = s.split_args(sig).expect("application");
    match &cert.case {
        Case::Plpo1 => check_child(sig, params, the_only_child(cert)?, Expect::Only(aux_j), s, t),
        Case::Plpo2 => {
            let mut allowed = sn.clone();
            allowed.extend(ss.iter().copied());
            check_descent_child(
                sig,
                params,
                the_only_child(cert)?,
                Expect::OrEquiv(same),
                &allowed,
                t,
            )
        }
        Case::Plpo3 => {
            if !fsym.is_defined() {
                return reject("Def2-Case3 requires a defined root");
            }
            let Term::App(g, _) = t else {
                return reject("Def2-Case3 requires an application on the right");
            };
            if params.rank[f.0] <= params.rank[g.0] {
                return reject("Def2-Case3 requires a strict rank drop");
            }
            let (tn, ts) = t.split_args(sig).expect("application");
            if cert.children.len() != tn.len() + ts.len() {
                return reject("Def2-Case3 needs one child per argument of the right-hand side");
            }
            // Normal positions are justified by the auxiliary relation,
            // safe positions by the order itself.
            for (i, (child, tj)) in cert
                .children
                .iter()
                .zip(tn.iter().chain(ts.iter()))
                .enumerate()
            {
                let expect = if i < tn.len() {
                    Expect::Only(aux_j)
                } else {
                    Expect::Only(same)
                };
                check_child(sig, params, child, expect, s, tj)?;
            }
            Ok(())
        }
        Case::Plpo4 | Case::Plpo4Perm(_) => {
            if !fsym.is_defined() || params.is_lex(*f) {
                return reject("Def2-Case4 requires a defined, non-lex root");
            }
            let Term::App(g, _) = t else {
                return reject("Def2-Case4 requires an application on the right");
            };
            if params.rank[f.0] != params.rank[g.0] {
                return reject("Def2-Case4 requires rank-equal roots");
            }
            let (tn, ts) = t.split_args(sig).expect("application");
            if sn.len() != tn.len() || ss.len() != ts.len() {
                return reject("Def2-Case4 requires matching arities");
            }
            let pi: Vec<usize> = match &cert.case {
                Case::Plpo4 => (0..ts.len()).collect(),
                Case::Plpo4Perm(pi) => {
                    if !params.permutation_extension {
                        return reject("permutation variant used but not enabled");
                    }
                    let mut seen = vec![false; ts.len()];
                    if pi.len() != ts.len() || pi.iter().any(|&j| j >= ts.len() || std::mem::replace(&mut seen[j], true)) {
                        return reject("recorded permutation is not a permutation");
                    }
                    pi.clone()
                }
                _ => unreachable!(),
            };
            if cert.children.len() != sn.len() + ss.len() {
                return reject("Def2-Case4 needs one child per position");
            }
            for (j, child) in cert.children.iter().enumerate() {
                let (lhs, rhs) = if j < sn.len() {
                    (sn[j], tn[j])
                } else {
                    (ss[j - sn.len()], ts[pi[j - sn.len()]])
                };
                check_child(sig, params, child, Expect::OrEquiv(same), lhs, rhs)?;
            }
            let strict_safe = cert.children[sn.len()..]
                .iter()
                .any(|c| c.judgment == same);
            if !strict_safe {
                return reject("Def2-Case4 requires a strict safe position");
            }
            Ok(())
        }
        Case::Plpo5 { i0 } => {
            if !fsym.is_defined() || !params.is_lex(*f) {
                return reject("Def2-Case5 requires a lex defined root");
            }
            let Term::App(g, _) = t else {
                return reject("Def2-Case5 requires an application on the right");
            };
            if params.rank[f.0] != params.rank[g.0] {
                return reject("Def2-Case5 requires rank-equal roots");
            }
            let (tn, ts) = t.split_args(sig).expect("application");
            let i0 = *i0;
            if i0 < 1 || i0 > sn.len().min(tn.len()) {
                return reject("Def2-Case5 position out of range");
            }
            if cert.children.len() != tn.len() + ts.len() {
                return reject("Def2-Case5 child count mismatch");
            }
            for (j, child) in cert.children.iter().enumerate() {
                if j < i0 - 1 {
                    check_child(sig, params, child, Expect::Only(Judgment::Equiv), sn[j], tn[j])?;
                } else if j == i0 - 1 {
                    check_child(sig, params, child, Expect::Only(same), sn[j], tn[j])?;
                } else if j < tn.len() {
                    check_child(sig, params, child, Expect::Only(aux_j), s, tn[j])?;
                } else {
                    check_child(sig, params, child, Expect::Only(same), s, ts[j - tn.len()])?;
                }
            }
            Ok(())
        }
        other => reject(format!("case {other} does not justify a path-order judgment")),
    }
}

fn check_lpo(sig: &Signature, params: &OrderParams, cert: &Certificate) -> Result<(), ReplayError> {
    let s = &cert.lhs;
    let t = &cert.rhs;
    let Term::App(f, _) = s else {
        return reject("left-hand side of an LPO judgment must be an application");
    };
    let sargs = s.display_args(sig);
    match &cert.case {
        Case::Lpo1 => check_descent_child(
            sig,
            params,
            the_only_child(cert)?,
            Expect::OrEquiv(Judgment::Lpo),
            &sargs,
            t,
        ),
        Case::Lpo2 => {
            let Term::App(g, _) = t else {
                return reject("LPO-Case2 requires an application on the right");
            };
            if params.rank[f.0] <= params.rank[g.0] {
                return reject("LPO-Case2 requires a strict rank drop");
            }
            let targs = t.display_args(sig);
            if cert.children.len() != targs.len() {
                return reject("LPO-Case2 needs one child per argument");
            }
            for (child, tj) in cert.children.iter().zip(targs) {
                check_child(sig, params, child, Expect::Only(Judgment::Lpo), s, tj)?;
            }
            Ok(())
        }
        Case::Lpo3 { i0 } => {
            let Term::App(g, _) = t else {
                return reject("LPO-Case3 requires an application on the right");
            };
            if params.rank[f.0] != params.rank[g.0] {
                return reject("LPO-Case3 requires rank-equal roots");
            }
            let targs = t.display_args(sig);
            let i0 = *i0;
            if i0 < 1 || i0 > sargs.len().min(targs.len()) {
                return reject("LPO-Case3 position out of range");
            }
            if cert.children.len() != targs.len() {
                return reject("LPO-Case3 child count mismatch");
            }
            for (j, child) in cert.children.iter().enumerate() {
                if j < i0 - 1 {
                    check_child(sig, params, child, Expect::Only(Judgment::Equiv), sargs[j], targs[j])?;
                } else if j == i0 - 1 {
                    check_child(sig, params, child, Expect::Only(Judgment::Lpo), sargs[j], targs[j])?;
                } else {
                    check_child(sig, params, child, Expect::Only(Judgment::Lpo), s, targs[j])?;
                }
            }
            Ok(())
        }
        other => reject(format!("case {other} does not justify an LPO judgment")),
    }
}
