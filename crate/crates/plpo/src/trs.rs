//! Rewrite systems: rules, the declared precedence and its canonical rank
//! map.
//!
//! A precedence is a quasi-order on the signature given by declared strict
//! pairs `f > g` and equivalence pairs `f = g`. Its strict part must be
//! well-founded, i.e. no cycle of declared pairs may pass through a strict
//! one. The canonical rank map assigns each equivalence class of the
//! condensation the length of the longest strict chain below it, which
//! yields consecutive ranks starting at 0 that respect every declared pair.

use thiserror::Error;

use crate::term::{equiv, Signature, SignatureError, SymbolId, Term, TermError};

/// A rewrite rule `lhs -> rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

/// Declared precedence pairs, kept in declaration order so files
/// round-trip verbatim.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Precedence {
    pub strict: Vec<(SymbolId, SymbolId)>,
    pub equal: Vec<(SymbolId, SymbolId)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrsError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("strict precedence cycle through `{0}`")]
    PrecedenceCycle(String),
    #[error("rule {0}: left-hand side is a variable")]
    LhsVariable(usize),
    #[error("rule {index}: left-hand side root `{symbol}` is not a defined symbol")]
    LhsNotDefined { index: usize, symbol: String },
    #[error("rule {index}: right-hand side variable `{var}` does not occur on the left")]
    UnboundRhsVar { index: usize, var: String },
}

/// A term rewrite system: signature, declared precedence and rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trs {
    pub signature: Signature,
    pub precedence: Precedence,
    pub rules: Vec<Rule>,
}

impl Trs {
    /// Builds a system and enforces all well-formedness conditions:
    /// signature invariants, arity-correct terms, defined non-variable
    /// left-hand sides, the variable condition, and well-foundedness of
    /// the strict precedence.
    pub fn new(
        signature: Signature,
        precedence: Precedence,
        rules: Vec<Rule>,
    ) -> Result<Self, TrsError> {
        signature.validate()?;
        canonical_ranks(&signature, &precedence)?;
        for (i, rule) in rules.iter().enumerate() {
            rule.lhs.check_arities(&signature)?;
            rule.rhs.check_arities(&signature)?;
            match &rule.lhs {
                Term::Var(_) => return Err(TrsError::LhsVariable(i)),
                Term::App(f, _) => {
                    let sym = signature.symbol(*f);
                    if !sym.is_defined() {
                        return Err(TrsError::LhsNotDefined {
                            index: i,
                            symbol: sym.name.clone(),
                        });
                    }
                }
            }
            let lhs_vars = rule.lhs.vars();
            for v in rule.rhs.vars() {
                if !lhs_vars.contains(v) {
                    return Err(TrsError::UnboundRhsVar {
                        index: i,
                        var: v.to_string(),
                    });
                }
            }
        }
        Ok(Trs {
            signature,
            precedence,
            rules,
        })
    }

    /// Canonical ranks induced by the declared precedence.
    pub fn canonical_ranks(&self) -> Vec<usize> {
        canonical_ranks(&self.signature, &self.precedence)
            .expect("precedence was validated at construction")
    }

    /// Term equivalence under the canonical ranks.
    pub fn equiv(&self, s: &Term, t: &Term) -> bool {
        let ranks = self.canonical_ranks();
        equiv(&self.signature, &ranks, s, t)
    }
}

/// Computes the canonical rank map of a declared precedence, or reports a
/// cycle through a strict pair.
///
/// Symbols in the same strongly connected component of the declared pairs
/// (strict pairs read as edges, equivalence pairs as edges both ways)
/// share a rank; a strict pair inside one component is a well-foundedness
/// violation. Component ranks are longest-path depths in the condensation,
/// so the used ranks are exactly `0..=max`.
pub fn canonical_ranks(sig: &Signature, prec: &Precedence) -> Result<Vec<usize>, TrsError> {
    let n = sig.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &prec.strict {
        adj[a.0].push(b.0);
    }
    for &(a, b) in &prec.equal {
        adj[a.0].push(b.0);
        adj[b.0].push(a.0);
    }

    let comp = scc(&adj);
    for &(a, b) in &prec.strict {
        if comp[a.0] == comp[b.0] {
            return Err(TrsError::PrecedenceCycle(sig.name(a).to_string()));
        }
    }

    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut cadj: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            if comp[u] != comp[v] {
                cadj[comp[u]].push(comp[v]);
            }
        }
    }
    for outs in &mut cadj {
        outs.sort_unstable();
        outs.dedup();
    }

    // Longest strict chain below each component; the condensation is acyclic.
    let mut depth = vec![usize::MAX; ncomp];
    fn depth_of(c: usize, cadj: &[Vec<usize>], depth: &mut [usize]) -> usize {
        if depth[c] != usize::MAX {
            return depth[c];
        }
        depth[c] = 0; // acyclic, so no revisit along the current path
        let d = cadj[c]
            .iter()
            .map(|&b| depth_of(b, cadj, depth) + 1)
            .max()
            .unwrap_or(0);
        depth[c] = d;
        d
    }
    let mut ranks = vec![0usize; n];
    for u in 0..n {
        ranks[u] = depth_of(comp[u], &cadj, &mut depth);
    }
    Ok(ranks)
}

/// Tarjan strongly connected components; returns a component index per node.
fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<usize>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comp: Vec<usize>,
        ncomp: usize,
    }
    const UNSET: usize = usize::MAX;
    fn visit(st: &mut State, u: usize) {
        st.index[u] = st.next;
        st.low[u] = st.next;
        st.next += 1;
        st.stack.push(u);
        st.on_stack[u] = true;
        for i in 0..st.adj[u].len() {
            let v = st.adj[u][i];
            if st.index[v] == UNSET {
                visit(st, v);
                st.low[u] = st.low[u].min(st.low[v]);
            } else if st.on_stack[v] {
                st.low[u] = st.low[u].min(st.index[v]);
            }
        }
        if st.low[u] == st.index[u] {
            loop {
                let v = st.stack.pop().expect("nonempty SCC stack");
                st.on_stack[v] = false;
                st.comp[v] = st.ncomp;
                if v == u {
                    break;
                }
            }
            st.ncomp += 1;
        }
    }
    let n = adj.len();
    let mut st = State {
        adj,
        index: vec![UNSET; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comp: vec![0; n],
        ncomp: 0,
    };
    for u in 0..n {
        if st.index[u] == UNSET {
            visit(&mut st, u);
        }
    }
    st.comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::FunctionSymbol;

    fn small_sig() -> (Signature, SymbolId, SymbolId, SymbolId) {
        let mut sig = Signature::new();
        let zero = sig.add(FunctionSymbol::constructor("0", 0, 0)).unwrap();
        let f = sig.add(FunctionSymbol::defined("f", false, 0, 1)).unwrap();
        let g = sig.add(FunctionSymbol::defined("g", false, 0, 1)).unwrap();
        (sig, zero, f, g)
    }

    #[test]
    fn ranks_respect_strict_pairs() {
        let (sig, _, f, g) = small_sig();
        let prec = Precedence {
            strict: vec![(f, g)],
            equal: vec![],
        };
        let ranks = canonical_ranks(&sig, &prec).unwrap();
        assert!(ranks[f.0] > ranks[g.0]);
        assert_eq!(ranks[g.0], 0);
        assert_eq!(ranks[f.0], 1);
    }

    #[test]
    fn equal_pairs_share_rank() {
        let (sig, zero, f, g) = small_sig();
        let prec = Precedence {
            strict: vec![(f, zero)],
            equal: vec![(f, g)],
        };
        let ranks = canonical_ranks(&sig, &prec).unwrap();
        assert_eq!(ranks[f.0], ranks[g.0]);
        assert!(ranks[f.0] > ranks[zero.0]);
    }

    #[test]
    fn strict_cycle_rejected() {
        let (sig, _, f, g) = small_sig();
        let prec = Precedence {
            strict: vec![(f, g), (g, f)],
            equal: vec![],
        };
        assert!(matches!(
            canonical_ranks(&sig, &prec),
            Err(TrsError::PrecedenceCycle(_))
        ));
        // An equivalence closing a strict edge into a cycle is also a violation.
        let prec2 = Precedence {
            strict: vec![(f, g)],
            equal: vec![(g, f)],
        };
        assert!(canonical_ranks(&sig, &prec2).is_err());
    }

    #[test]
    fn rule_wellformedness() {
        let (sig, zero, f, _) = small_sig();
        let ok = Trs::new(
            sig.clone(),
            Precedence::default(),
            vec![Rule {
                lhs: Term::app(f, vec![Term::var("x")]),
                rhs: Term::var("x"),
            }],
        );
        assert!(ok.is_ok());

        let lhs_var = Trs::new(
            sig.clone(),
            Precedence::default(),
            vec![Rule {
                lhs: Term::var("x"),
                rhs: Term::var("x"),
            }],
        );
        assert!(matches!(lhs_var, Err(TrsError::LhsVariable(0))));

        let lhs_ctor = Trs::new(
            sig.clone(),
            Precedence::default(),
            vec![Rule {
                lhs: Term::constant(zero),
                rhs: Term::constant(zero),
            }],
        );
        assert!(matches!(lhs_ctor, Err(TrsError::LhsNotDefined { .. })));

        let unbound = Trs::new(
            sig,
            Precedence::default(),
            vec![Rule {
                lhs: Term::app(f, vec![Term::var("x")]),
                rhs: Term::var("y"),
            }],
        );
        assert!(matches!(unbound, Err(TrsError::UnboundRhsVar { .. })));
    }
}
