//! Decision procedures for the auxiliary relation, the predicative
//! lexicographic path order (plain and depth-bounded) and a reference
//! lexicographic path order, each producing a replayable certificate.
//!
//! Case search follows the definitional order and records the first case
//! that succeeds, so certificates are deterministic. Within a `>=`-style
//! side condition, equivalence is tried before the strict relation.
//! Argument lists are always compared in display order (normal positions
//! first); for prefix separations this is the source order.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::term::{equiv, Signature, SymbolId, Term};
use crate::trs::Trs;

/// Parameters of one order instance: a rank per symbol, the set of
/// lexicographically compared defined symbols, and whether the safe-tuple
/// comparison may permute positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderParams {
    pub rank: Vec<usize>,
    pub lex: Vec<bool>,
    pub permutation_extension: bool,
}

impl OrderParams {
    /// Canonical ranks from the declared precedence and the declared lex
    /// flags.
    pub fn from_trs(trs: &Trs) -> Self {
        OrderParams {
            rank: trs.canonical_ranks(),
            lex: trs.signature.iter().map(|(_, s)| s.lex).collect(),
            permutation_extension: false,
        }
    }

    pub fn rank_of(&self, id: SymbolId) -> usize {
        self.rank[id.0]
    }

    pub fn is_lex(&self, id: SymbolId) -> bool {
        self.lex[id.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Judgment {
    Aux,
    AuxBounded(u32),
    Plpo,
    PlpoBounded(u32),
    Lpo,
    Equiv,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Aux => write!(f, "AUX"),
            Judgment::AuxBounded(b) => write!(f, "AUX[{b}]"),
            Judgment::Plpo => write!(f, "PLPO"),
            Judgment::PlpoBounded(l) => write!(f, "PLPO[{l}]"),
            Judgment::Lpo => write!(f, "LPO"),
            Judgment::Equiv => write!(f, "EQUIV"),
        }
    }
}

/// The definitional case justifying one certificate node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Case {
    Aux1,
    Aux2,
    Aux3,
    Plpo1,
    Plpo2,
    Plpo3,
    Plpo4,
    /// Safe-tuple comparison after the recorded permutation (0-based,
    /// entry `j` gives the safe position of the right-hand term compared
    /// against safe position `j` of the left-hand term).
    Plpo4Perm(Vec<usize>),
    Plpo5 {
        i0: usize,
    },
    Lpo1,
    Lpo2,
    Lpo3 {
        i0: usize,
    },
    Equiv,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Aux1 => write!(f, "Def1-Case1"),
            Case::Aux2 => write!(f, "Def1-Case2"),
            Case::Aux3 => write!(f, "Def1-Case3"),
            Case::Plpo1 => write!(f, "Def2-Case1"),
            Case::Plpo2 => write!(f, "Def2-Case2"),
            Case::Plpo3 => write!(f, "Def2-Case3"),
            Case::Plpo4 => write!(f, "Def2-Case4"),
            Case::Plpo4Perm(pi) => {
                write!(f, "Def2-Case4-perm(")?;
                for (i, p) in pi.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", p + 1)?;
                }
                write!(f, ")")
            }
            Case::Plpo5 { i0 } => write!(f, "Def2-Case5(i0={i0})"),
            Case::Lpo1 => write!(f, "LPO-Case1"),
            Case::Lpo2 => write!(f, "LPO-Case2"),
            Case::Lpo3 { i0 } => write!(f, "LPO-Case3(i0={i0})"),
            Case::Equiv => write!(f, "Equiv"),
        }
    }
}

/// A proof tree: each node names the case that fired and carries one child
/// per side condition, in the order the definition lists them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub judgment: Judgment,
    pub lhs: Term,
    pub rhs: Term,
    pub case: Case,
    pub children: Vec<Certificate>,
}

impl Certificate {
    pub fn equivalence(s: &Term, t: &Term) -> Self {
        Certificate {
            judgment: Judgment::Equiv,
            lhs: s.clone(),
            rhs: t.clone(),
            case: Case::Equiv,
            children: Vec::new(),
        }
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self, sig: &Signature) -> String {
        fn go(c: &Certificate, sig: &Signature, depth: usize, out: &mut String) {
            let rel = if c.judgment == Judgment::Equiv { "=" } else { ">" };
            out.push_str(&"  ".repeat(depth));
            out.push_str(&format!(
                "{}  {} {} {}  [{}]\n",
                c.judgment,
                c.lhs.display(sig),
                rel,
                c.rhs.display(sig),
                c.case
            ));
            for ch in &c.children {
                go(ch, sig, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, sig, 0, &mut out);
        out
    }

    /// Nodes in the tree, including this one.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Certificate::node_count).sum::<usize>()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("depth budget must be at least 2, got {0}")]
    BudgetTooSmall(u32),
}

/// `None` is the unbounded relation; `Some(b)` bounds the remaining
/// rank-descent depth of the auxiliary relation.
type Bound = Option<u32>;

fn bound_allows_descent(b: Bound) -> bool {
    b.map_or(true, |x| x >= 1)
}

fn dec(b: Bound) -> Bound {
    b.map(|x| x - 1)
}

fn enc(b: Bound) -> u64 {
    b.map_or(u64::MAX, u64::from)
}

const TAG_AUX: u8 = 0;
const TAG_PLPO: u8 = 1;
const TAG_LPO: u8 = 2;

struct Prover<'a> {
    sig: &'a Signature,
    params: &'a OrderParams,
    /// Budget for bounded judgments; the auxiliary relation decrements it
    /// on rank descent while the path order passes it along unchanged.
    ell: Bound,
    memo: HashMap<(u8, u64, Term, Term), Option<Rc<Certificate>>>,
}

impl<'a> Prover<'a> {
    fn new(sig: &'a Signature, params: &'a OrderParams, ell: Bound) -> Self {
        Prover {
            sig,
            params,
            ell,
            memo: HashMap::new(),
        }
    }

    fn rank(&self, id: SymbolId) -> usize {
        self.params.rank[id.0]
    }

    fn equivalent(&self, s: &Term, t: &Term) -> bool {
        equiv(self.sig, &self.params.rank, s, t)
    }

    fn aux_judgment(&self, b: Bound) -> Judgment {
        match b {
            None => Judgment::Aux,
            Some(x) => Judgment::AuxBounded(x),
        }
    }

    fn plpo_judgment(&self) -> Judgment {
        match self.ell {
            None => Judgment::Plpo,
            Some(l) => Judgment::PlpoBounded(l),
        }
    }

    fn mk(
        &self,
        judgment: Judgment,
        s: &Term,
        t: &Term,
        case: Case,
        children: Vec<Rc<Certificate>>,
    ) -> Rc<Certificate> {
        Rc::new(Certificate {
            judgment,
            lhs: s.clone(),
            rhs: t.clone(),
            case,
            children: children.iter().map(|c| (**c).clone()).collect(),
        })
    }

    fn aux(&mut self, s: &Term, t: &Term, b: Bound) -> Option<Rc<Certificate>> {
        if !matches!(s, Term::App(..)) {
            return None;
        }
        let key = (TAG_AUX, enc(b), s.clone(), t.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.aux_cases(s, t, b);
        self.memo.insert(key, result.clone());
        result
    }

    fn aux_cases(&mut self, s: &Term, t: &Term, b: Bound) -> Option<Rc<Certificate>> {
        let Term::App(f, _) = s else { return None };
        let fsym = self.sig.symbol(*f);
        let judgment = self.aux_judgment(b);
        let (normals, safes) = s.split_args(self.sig).expect("application");

        // Cases 1 and 2: descend into an argument of s; constructors may
        // use any position, defined symbols only normal ones.
        let (case, descend): (Case, Vec<&Term>) = if fsym.is_constructor() {
            let mut all = normals.clone();
            all.extend(safes.iter().copied());
            (Case::Aux1, all)
        } else {
            (Case::Aux2, normals)
        };
        for si in descend {
            if self.equivalent(si, t) {
                let child = Rc::new(Certificate::equivalence(si, t));
                return Some(self.mk(judgment, s, t, case, vec![child]));
            }
            if let Some(c) = self.aux(si, t, b) {
                return Some(self.mk(judgment, s, t, case, vec![c]));
            }
        }

        // Case 3: rank descent into every argument of t.
        if fsym.is_defined() {
            if let Term::App(g, _) = t {
                if self.rank(*f) > self.rank(*g) && bound_allows_descent(b) {
                    let inner = dec(b);
                    let targs = t.display_args(self.sig);
                    let mut children = Vec::with_capacity(targs.len());
                    let mut ok = true;
                    for tj in targs {
                        match self.aux(s, tj, inner) {
                            Some(c) => children.push(c),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        return Some(self.mk(judgment, s, t, Case::Aux3, children));
                    }
                }
            }
        }
        None
    }

    fn plpo(&mut self, s: &Term, t: &Term) -> Option<Rc<Certificate>> {
        if !matches!(s, Term::App(..)) {
            return None;
        }
        let key = (TAG_PLPO, enc(self.ell), s.clone(), t.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.plpo_cases(s, t);
        self.memo.insert(key, result.clone());
        result
    }

    fn plpo_cases(&mut self, s: &Term, t: &Term) -> Option<Rc<Certificate>> {
        let Term::App(f, _) = s else { return None };
        let judgment = self.plpo_judgment();

        // Case 1: the auxiliary relation.
        if let Some(c) = self.aux(s, t, self.ell) {
            return Some(self.mk(judgment, s, t, Case::Plpo1, vec![c]));
        }

        // Case 2: some argument of s is >= t.
        for si in s.display_args(self.sig) {
            if self.equivalent(si, t) {
                let child = Rc::new(Certificate::equivalence(si, t));
                return Some(self.mk(judgment, s, t, Case::Plpo2, vec![child]));
            }
            if let Some(c) = self.plpo(si, t) {
                return Some(self.mk(judgment, s, t, Case::Plpo2, vec![c]));
            }
        }

        let fsym = self.sig.symbol(*f);
        let Term::App(g, _) = t else { return None };
        if !fsym.is_defined() {
            return None;
        }
        let (tn, ts) = t.split_args(self.sig).expect("application");

        // Case 3: strict rank descent.
        if self.rank(*f) > self.rank(*g) {
            if let Some(children) = self.case3_children(s, &tn, &ts) {
                return Some(self.mk(judgment, s, t, Case::Plpo3, children));
            }
        }

        if self.rank(*f) == self.rank(*g) {
            let (sn, ss) = s.split_args(self.sig).expect("application");
            if !self.params.is_lex(*f) && sn.len() == tn.len() && ss.len() == ts.len() {
                // Case 4: componentwise comparison, strict somewhere among
                // the safe positions.
                let identity: Vec<usize> = (0..ts.len()).collect();
                if let Some(children) = self.case4_children(&sn, &ss, &tn, &ts, &identity) {
                    return Some(self.mk(judgment, s, t, Case::Plpo4, children));
                }
                if self.params.permutation_extension {
                    for pi in permutations(ts.len()) {
                        if pi == identity {
                            continue;
                        }
                        if let Some(children) = self.case4_children(&sn, &ss, &tn, &ts, &pi) {
                            return Some(self.mk(
                                judgment,
                                s,
                                t,
                                Case::Plpo4Perm(pi),
                                children,
                            ));
                        }
                    }
                }
            }
            if self.params.is_lex(*f) {
                // Case 5: lexicographic descent on the normal arguments.
                let mut prefix: Vec<Rc<Certificate>> = Vec::new();
                let bound = sn.len().min(tn.len());
                for i0 in 1..=bound {
                    let (si, ti) = (sn[i0 - 1], tn[i0 - 1]);
                    if let Some(c0) = self.plpo(si, ti) {
                        let mut children = prefix.clone();
                        children.push(c0);
                        let mut ok = true;
                        for tj in &tn[i0..] {
                            match self.aux(s, tj, self.ell) {
                                Some(c) => children.push(c),
                                None => {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if ok {
                            for tj in &ts {
                                match self.plpo(s, tj) {
                                    Some(c) => children.push(c),
                                    None => {
                                        ok = false;
                                        break;
                                    }
                                }
                            }
                        }
                        if ok {
                            return Some(self.mk(judgment, s, t, Case::Plpo5 { i0 }, children));
                        }
                    }
                    if !self.equivalent(si, ti) {
                        break;
                    }
                    prefix.push(Rc::new(Certificate::equivalence(si, ti)));
                }
            }
        }
        None
    }

    fn case3_children(
        &mut self,
        s: &Term,
        tn: &[&Term],
        ts: &[&Term],
    ) -> Option<Vec<Rc<Certificate>>> {
        let mut children = Vec::with_capacity(tn.len() + ts.len());
        for tj in tn {
            children.push(self.aux(s, tj, self.ell)?);
        }
        for tj in ts {
            children.push(self.plpo(s, tj)?);
        }
        Some(children)
    }

    fn case4_children(
        &mut self,
        sn: &[&Term],
        ss: &[&Term],
        tn: &[&Term],
        ts: &[&Term],
        pi: &[usize],
    ) -> Option<Vec<Rc<Certificate>>> {
        let mut children = Vec::with_capacity(sn.len() + ss.len());
        for (sj, tj) in sn.iter().zip(tn) {
            children.push(self.ge_child(sj, tj)?);
        }
        let mut strict = false;
        for (j, sj) in ss.iter().enumerate() {
            let tj = ts[pi[j]];
            let child = self.ge_child(sj, tj)?;
            strict |= child.judgment != Judgment::Equiv;
            children.push(child);
        }
        if strict {
            Some(children)
        } else {
            None
        }
    }

    /// `>=` side condition: equivalence first, then the strict order.
    fn ge_child(&mut self, s: &Term, t: &Term) -> Option<Rc<Certificate>> {
        if self.equivalent(s, t) {
            return Some(Rc::new(Certificate::equivalence(s, t)));
        }
        self.plpo(s, t)
    }

    fn lpo(&mut self, s: &Term, t: &Term) -> Option<Rc<Certificate>> {
        if !matches!(s, Term::App(..)) {
            return None;
        }
        let key = (TAG_LPO, 0, s.clone(), t.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.lpo_cases(s, t);
        self.memo.insert(key, result.clone());
        result
    }

    fn lpo_cases(&mut self, s: &Term, t: &Term) -> Option<Rc<Certificate>> {
        let Term::App(f, _) = s else { return None };
        let sargs = s.display_args(self.sig);

        for si in &sargs {
            if self.equivalent(si, t) {
                let child = Rc::new(Certificate::equivalence(si, t));
                return Some(self.mk(Judgment::Lpo, s, t, Case::Lpo1, vec![child]));
            }
            if let Some(c) = self.lpo(si, t) {
                return Some(self.mk(Judgment::Lpo, s, t, Case::Lpo1, vec![c]));
            }
        }

        let Term::App(g, _) = t else { return None };
        let targs = t.display_args(self.sig);
        if self.rank(*f) > self.rank(*g) {
            let mut children = Vec::with_capacity(targs.len());
            for tj in &targs {
                children.push(self.lpo(s, tj)?);
            }
            return Some(self.mk(Judgment::Lpo, s, t, Case::Lpo2, children));
        }
        if self.rank(*f) == self.rank(*g) {
            let mut prefix: Vec<Rc<Certificate>> = Vec::new();
            let bound = sargs.len().min(targs.len());
            for i0 in 1..=bound {
                let (si, ti) = (sargs[i0 - 1], targs[i0 - 1]);
                if let Some(c0) = self.lpo(si, ti) {
                    let mut children = prefix.clone();
                    children.push(c0);
                    let mut ok = true;
                    for tj in &targs[i0..] {
                        match self.lpo(s, tj) {
                            Some(c) => children.push(c),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        return Some(self.mk(Judgment::Lpo, s, t, Case::Lpo3 { i0 }, children));
                    }
                }
                if !self.equivalent(si, ti) {
                    break;
                }
                prefix.push(Rc::new(Certificate::equivalence(si, ti)));
            }
        }
        None
    }
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

fn unwrap_rc(c: Rc<Certificate>) -> Certificate {
    Rc::try_unwrap(c).unwrap_or_else(|rc| (*rc).clone())
}

/// Auxiliary relation: does `s` dominate `t`?
pub fn aux_gt(sig: &Signature, params: &OrderParams, s: &Term, t: &Term) -> Option<Certificate> {
    let mut p = Prover::new(sig, params, None);
    p.aux(s, t, None).map(unwrap_rc)
}

/// Auxiliary relation with rank-descent depth bounded by `ell` (>= 2).
pub fn aux_gt_bounded(
    sig: &Signature,
    params: &OrderParams,
    s: &Term,
    t: &Term,
    ell: u32,
) -> Result<Option<Certificate>, OrderError> {
    if ell < 2 {
        return Err(OrderError::BudgetTooSmall(ell));
    }
    let mut p = Prover::new(sig, params, Some(ell));
    Ok(p.aux(s, t, Some(ell)).map(unwrap_rc))
}

/// The predicative lexicographic path order.
pub fn plpo_gt(sig: &Signature, params: &OrderParams, s: &Term, t: &Term) -> Option<Certificate> {
    let mut p = Prover::new(sig, params, None);
    p.plpo(s, t).map(unwrap_rc)
}

/// The path order induced by the bounded auxiliary relation at `ell` (>= 2).
pub fn plpo_gt_bounded(
    sig: &Signature,
    params: &OrderParams,
    s: &Term,
    t: &Term,
    ell: u32,
) -> Result<Option<Certificate>, OrderError> {
    if ell < 2 {
        return Err(OrderError::BudgetTooSmall(ell));
    }
    let mut p = Prover::new(sig, params, Some(ell));
    Ok(p.plpo(s, t).map(unwrap_rc))
}

/// Reference lexicographic path order over the same ranks. The argument
/// separation carries no weight here: every position is compared and all
/// symbols have lexicographic status.
pub fn lpo_gt(sig: &Signature, params: &OrderParams, s: &Term, t: &Term) -> Option<Certificate> {
    let mut p = Prover::new(sig, params, None);
    p.lpo(s, t).map(unwrap_rc)
}

/// Multiplicative hasher for the decision memo; the keys are a tag byte
/// and two pointers, so the generic byte path never runs in practice.
#[derive(Default, Clone)]
struct FxBuild;

struct FxHasher(u64);

impl std::hash::BuildHasher for FxBuild {
    type Hasher = FxHasher;
    fn build_hasher(&self) -> FxHasher {
        FxHasher(0)
    }
}

impl std::hash::Hasher for FxHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }
    fn write_u8(&mut self, v: u8) {
        self.write_u64(v as u64);
    }
    fn write_usize(&mut self, v: usize) {
        self.write_u64(v as u64);
    }
    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0.rotate_left(5) ^ v).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }
}

/// Memo table for [`Decider`]. Keys are subterm addresses, which are
/// stable for the lifetime of the rule terms being decided; clear it
/// whenever the parameters or the separation change.
#[derive(Default)]
pub(crate) struct DecisionMemo {
    map: HashMap<(u8, *const Term, *const Term), bool, FxBuild>,
}

impl DecisionMemo {
    pub(crate) fn clear(&mut self) {
        self.map.clear();
    }
}

/// Allocation-free yes/no path for the orientation search. Shares no code
/// with the certificate builder on purpose; the two are cross-checked by
/// the property suite.
pub(crate) struct Decider<'s> {
    sig: &'s Signature,
    params: &'s OrderParams,
    memo: &'s mut DecisionMemo,
}

const DTAG_AUX: u8 = 0;
const DTAG_PLPO: u8 = 1;
const DTAG_EQUIV: u8 = 2;

impl<'s> Decider<'s> {
    pub(crate) fn new(
        sig: &'s Signature,
        params: &'s OrderParams,
        memo: &'s mut DecisionMemo,
    ) -> Self {
        Decider { sig, params, memo }
    }

    fn get(&self, tag: u8, s: &Term, t: &Term) -> Option<bool> {
        self.memo.map.get(&(tag, s as *const Term, t as *const Term)).copied()
    }

    fn put(&mut self, tag: u8, s: &Term, t: &Term, value: bool) -> bool {
        self.memo
            .map
            .insert((tag, s as *const Term, t as *const Term), value);
        value
    }

    pub(crate) fn plpo(&mut self, s: &Term, t: &Term) -> bool {
        let Term::App(f, _) = s else { return false };
        if let Some(hit) = self.get(DTAG_PLPO, s, t) {
            return hit;
        }
        let result = self.plpo_cases(*f, s, t);
        self.put(DTAG_PLPO, s, t, result)
    }

    fn plpo_cases(&mut self, f: SymbolId, s: &Term, t: &Term) -> bool {
        if self.aux(s, t) {
            return true;
        }
        for si in s.display_args(self.sig) {
            if self.equiv(si, t) || self.plpo(si, t) {
                return true;
            }
        }
        let fsym = self.sig.symbol(f);
        if !fsym.is_defined() {
            return false;
        }
        let Term::App(g, _) = t else { return false };
        let (rf, rg) = (self.params.rank[f.0], self.params.rank[g.0]);
        let (tn, ts) = t.split_args(self.sig).expect("application");
        if rf > rg {
            if tn.iter().all(|tj| self.aux(s, tj)) && ts.iter().all(|tj| self.plpo(s, tj)) {
                return true;
            }
        }
        if rf == rg {
            let (sn, ss) = s.split_args(self.sig).expect("application");
            if !self.params.is_lex(f) && sn.len() == tn.len() && ss.len() == ts.len() {
                let normals_ge = sn.iter().zip(&tn).all(|(a, b)| self.ge(a, b));
                if normals_ge {
                    let identity: Vec<usize> = (0..ts.len()).collect();
                    if self.safe_tuple_gt(&ss, &ts, &identity) {
                        return true;
                    }
                    if self.params.permutation_extension {
                        for pi in permutations(ts.len()) {
                            if pi != identity && self.safe_tuple_gt(&ss, &ts, &pi) {
                                return true;
                            }
                        }
                    }
                }
            }
            if self.params.is_lex(f) {
                let bound = sn.len().min(tn.len());
                for i0 in 1..=bound {
                    let (si, ti) = (sn[i0 - 1], tn[i0 - 1]);
                    if self.plpo(si, ti)
                        && tn[i0..].iter().all(|tj| self.aux(s, tj))
                        && ts.iter().all(|tj| self.plpo(s, tj))
                    {
                        return true;
                    }
                    if !self.equiv(si, ti) {
                        break;
                    }
                }
            }
        }
        false
    }

    fn safe_tuple_gt(&mut self, ss: &[&Term], ts: &[&Term], pi: &[usize]) -> bool {
        let mut strict = false;
        for (j, sj) in ss.iter().enumerate() {
            let tj = ts[pi[j]];
            if self.equiv(sj, tj) {
                continue;
            }
            if self.plpo(sj, tj) {
                strict = true;
                continue;
            }
            return false;
        }
        strict
    }

    fn ge(&mut self, s: &Term, t: &Term) -> bool {
        self.equiv(s, t) || self.plpo(s, t)
    }

    fn aux(&mut self, s: &Term, t: &Term) -> bool {
        let Term::App(f, _) = s else { return false };
        if let Some(hit) = self.get(DTAG_AUX, s, t) {
            return hit;
        }
        let fsym = self.sig.symbol(*f);
        let (normals, safes) = s.split_args(self.sig).expect("application");
        let mut result = false;
        let descend: Vec<&Term> = if fsym.is_constructor() {
            normals.iter().chain(safes.iter()).copied().collect()
        } else {
            normals
        };
        for si in descend {
            if self.equiv(si, t) || self.aux(si, t) {
                result = true;
                break;
            }
        }
        if !result && fsym.is_defined() {
            if let Term::App(g, _) = t {
                if self.params.rank[f.0] > self.params.rank[g.0] {
                    result = t.display_args(self.sig).iter().all(|tj| self.aux(s, tj));
                }
            }
        }
        self.put(DTAG_AUX, s, t, result)
    }

    fn equiv(&mut self, s: &Term, t: &Term) -> bool {
        if let Some(hit) = self.get(DTAG_EQUIV, s, t) {
            return hit;
        }
        let result = equiv(self.sig, &self.params.rank, s, t);
        self.put(DTAG_EQUIV, s, t, result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_trs;

    fn prp() -> (Trs, OrderParams) {
        let trs = parse_trs(
            "\
signature
  0 : constructor 0;0
  s : constructor 0;1
  f : defined lex 1;1
  g : defined 0;1
  h : defined 1;2
  p : defined 1;1
precedence
  f > g
  f > h
  f > p
rules
  f(0; y) -> g(; y)
  f(s(; x); y) -> h(x; y, f(x; p(x; y)))
",
        )
        .unwrap();
        let params = OrderParams::from_trs(&trs);
        (trs, params)
    }

    fn term(trs: &Trs, text: &str) -> Term {
        crate::syntax::parse_term(&trs.signature, text).unwrap()
    }

    #[test]
    fn aux_examples() {
        let (trs, params) = prp();
        let sig = &trs.signature;
        let sx = term(&trs, "s(; x)");
        let x = term(&trs, "x");
        let c = aux_gt(sig, &params, &sx, &x).expect("s(;x) above x");
        assert_eq!(c.case, Case::Aux1);

        let fsxy = term(&trs, "f(s(; x); y)");
        let c2 = aux_gt(sig, &params, &fsxy, &x).expect("normal argument descent");
        assert_eq!(c2.case, Case::Aux2);

        // A variable occurring only in safe position is out of reach, so
        // rank descent onto a term mentioning it fails too.
        let y = term(&trs, "y");
        assert!(aux_gt(sig, &params, &fsxy, &y).is_none());
        assert!(aux_gt(sig, &params, &fsxy, &term(&trs, "p(x; y)")).is_none());

        // With both recursion arguments normal, rank descent collects
        // every argument of the smaller-ranked term.
        let umr = parse_trs(
            "\
signature
  0 : constructor 0;0
  s : constructor 0;1
  f : defined lex 2;0
  p : defined 2;0
precedence
  f > p
rules
",
        )
        .unwrap();
        let uparams = OrderParams::from_trs(&umr);
        let s = crate::syntax::parse_term(&umr.signature, "f(s(; x), s(; y);)").unwrap();
        let t = crate::syntax::parse_term(&umr.signature, "p(x, y;)").unwrap();
        let c3 = aux_gt(&umr.signature, &uparams, &s, &t).expect("rank descent");
        assert_eq!(c3.case, Case::Aux3);
        assert_eq!(c3.children.len(), 2);
    }

    #[test]
    fn safe_only_arguments_never_feed_aux() {
        // A binary symbol with safe positions only.
        let trs = parse_trs(
            "\
signature
  0 : constructor 0;0
  f : defined 0;2
rules
",
        )
        .unwrap();
        let params = OrderParams::from_trs(&trs);
        let s = crate::syntax::parse_term(&trs.signature, "f(; x, y)").unwrap();
        let x = crate::syntax::parse_term(&trs.signature, "x").unwrap();
        assert!(aux_gt(&trs.signature, &params, &s, &x).is_none());
    }

    #[test]
    fn bounded_aux_budget() {
        // A rank-descent chain of depth three needs budget 3. The extra
        // `g3 > c` pair keeps the defined constant above the constructor
        // one, so the chain cannot be cut short by an equivalence.
        let trs = parse_trs(
            "\
signature
  c : constructor 0;0
  f : defined 1;0
  g1 : defined 0;1
  g2 : defined 0;1
  g3 : defined 0;0
precedence
  f > g1
  g1 > g2
  g2 > g3
  g3 > c
rules
",
        )
        .unwrap();
        let params = OrderParams::from_trs(&trs);
        let sig = &trs.signature;
        let s = term(&trs, "f(c;)");
        let chain = term(&trs, "g1(; g2(; g3))");
        assert!(aux_gt(sig, &params, &s, &chain).is_some());
        assert!(aux_gt_bounded(sig, &params, &s, &chain, 2).unwrap().is_none());
        assert!(aux_gt_bounded(sig, &params, &s, &chain, 3).unwrap().is_some());
        assert!(aux_gt_bounded(sig, &params, &s, &chain, 4).unwrap().is_some());
        assert_eq!(
            aux_gt_bounded(sig, &params, &s, &chain, 1),
            Err(OrderError::BudgetTooSmall(1))
        );

        // Budget untouched by the base cases.
        let sx = term(&trs, "f(c;)");
        let c = term(&trs, "c");
        assert!(aux_gt_bounded(sig, &params, &sx, &c, 2).unwrap().is_some());
    }

    #[test]
    fn plpo_recursion_step() {
        let (trs, params) = prp();
        let sig = &trs.signature;
        let lhs = term(&trs, "f(s(; x); y)");
        let step = term(&trs, "f(x; p(x; y))");
        let cert = plpo_gt(sig, &params, &lhs, &step).expect("lex descent");
        assert_eq!(cert.case, Case::Plpo5 { i0: 1 });
        // The safe argument is handled by rank descent.
        let inner = cert.children.last().unwrap();
        assert_eq!(inner.case, Case::Plpo3);

        let rhs = term(&trs, "h(x; y, f(x; p(x; y)))");
        let full = plpo_gt(sig, &params, &lhs, &rhs).expect("whole right-hand side");
        assert_eq!(full.case, Case::Plpo3);
    }

    #[test]
    fn plpo_irreflexive_on_samples() {
        let (trs, params) = prp();
        let sig = &trs.signature;
        for text in ["x", "0", "s(; 0)", "f(s(; x); y)", "h(x; y, f(x; y))"] {
            let t = term(&trs, text);
            assert!(plpo_gt(sig, &params, &t, &t).is_none(), "{text}");
            assert!(lpo_gt(sig, &params, &t, &t).is_none(), "{text}");
            if matches!(t, Term::App(..)) {
                assert!(aux_gt(sig, &params, &t, &t).is_none(), "{text}");
            }
        }
    }

    #[test]
    fn bounded_plpo_at_term_size() {
        let (trs, params) = prp();
        let sig = &trs.signature;
        for rule in &trs.rules {
            let cert = plpo_gt(sig, &params, &rule.lhs, &rule.rhs);
            assert!(cert.is_some());
            let ell = rule.rhs.size().max(2) as u32;
            assert!(plpo_gt_bounded(sig, &params, &rule.lhs, &rule.rhs, ell)
                .unwrap()
                .is_some());
        }
        assert_eq!(
            plpo_gt_bounded(sig, &params, &term(&trs, "s(; x)"), &term(&trs, "x"), 1),
            Err(OrderError::BudgetTooSmall(1))
        );
        assert!(plpo_gt_bounded(sig, &params, &term(&trs, "s(; x)"), &term(&trs, "x"), 2)
            .unwrap()
            .is_some());
    }

    #[test]
    fn lpo_orients_double_recursion() {
        let trs = parse_trs(
            "\
signature
  0 : constructor 0;0
  s : constructor 0;1
  a : defined 2;0
precedence
  a > s
  a > 0
rules
",
        )
        .unwrap();
        let params = OrderParams::from_trs(&trs);
        let sig = &trs.signature;
        let lhs = term(&trs, "a(s(; x), s(; y);)");
        let rhs = term(&trs, "a(x, a(s(; x), y;);)");
        let cert = lpo_gt(sig, &params, &lhs, &rhs).expect("standard lex path order");
        assert_eq!(cert.case, Case::Lpo3 { i0: 1 });
        // The same pair is out of reach for the predicative order.
        assert!(plpo_gt(sig, &params, &lhs, &rhs).is_none());
    }

    #[test]
    fn permutation_extension_of_case4() {
        let trs = parse_trs(
            "\
signature
  0 : constructor 0;0
  s : constructor 0;1
  f : defined 0;2
rules
",
        )
        .unwrap();
        let mut params = OrderParams::from_trs(&trs);
        let sig = &trs.signature;
        let lhs = term(&trs, "f(; s(; x), y)");
        let rhs = term(&trs, "f(; y, x)");
        assert!(plpo_gt(sig, &params, &lhs, &rhs).is_none());
        params.permutation_extension = true;
        let cert = plpo_gt(sig, &params, &lhs, &rhs).expect("swap of safe positions");
        assert_eq!(cert.case, Case::Plpo4Perm(vec![1, 0]));
        assert_eq!(cert.case.to_string(), "Def2-Case4-perm(2,1)");
    }

    #[test]
    fn decider_agrees_with_prover_on_examples() {
        let (trs, params) = prp();
        let sig = &trs.signature;
        let terms: Vec<Term> = [
            "x",
            "y",
            "0",
            "s(; x)",
            "f(0; y)",
            "f(s(; x); y)",
            "f(x; p(x; y))",
            "g(; y)",
            "h(x; y, f(x; p(x; y)))",
            "p(x; y)",
        ]
        .iter()
        .map(|t| term(&trs, t))
        .collect();
        let mut memo = DecisionMemo::default();
        let mut dec = Decider::new(sig, &params, &mut memo);
        for s in &terms {
            for t in &terms {
                assert_eq!(
                    dec.plpo(s, t),
                    plpo_gt(sig, &params, s, t).is_some(),
                    "{} vs {}",
                    s.display(sig),
                    t.display(sig)
                );
            }
        }
    }
}
