//! Terms over a signature whose argument positions are split into two
//! kinds, *normal* and *safe*.
//!
//! Every function symbol declares, for each of its argument positions,
//! whether that position is normal or safe. Terms are written
//! `f(t1, ..., tk; u1, ..., ul)` with the normal arguments left of the
//! semicolon. Internally a term stores its arguments in source order and
//! the symbol's separation mask decides which positions are normal, so
//! re-separating a signature never has to rebuild terms.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Index of a symbol within its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Constructor,
    Defined,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` is a constructor but carries the lex flag")]
    LexConstructor(String),
    #[error("signature has no constructor constant")]
    NoConstructorConstant,
    #[error("separation mask for `{symbol}` has length {got}, arity is {arity}")]
    MaskLength {
        symbol: String,
        got: usize,
        arity: usize,
    },
}

/// A function symbol: name, constructor/defined kind, lex flag and the
/// separation of its argument positions.
///
/// The mask has one entry per argument position (`true` = normal). Parsed
/// signatures always use a prefix mask (the first `k` positions normal);
/// arbitrary masks only arise during separation search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSymbol {
    pub name: String,
    pub kind: SymbolKind,
    pub lex: bool,
    mask: Vec<bool>,
}

impl FunctionSymbol {
    /// Symbol with the first `normal` positions normal and the next `safe`
    /// positions safe.
    pub fn new(
        name: impl Into<String>,
        kind: SymbolKind,
        lex: bool,
        normal: usize,
        safe: usize,
    ) -> Self {
        let mut mask = vec![true; normal];
        mask.extend(std::iter::repeat(false).take(safe));
        FunctionSymbol {
            name: name.into(),
            kind,
            lex,
            mask,
        }
    }

    /// Symbol with an explicit separation mask (`true` = normal position).
    pub fn with_mask(
        name: impl Into<String>,
        kind: SymbolKind,
        lex: bool,
        mask: Vec<bool>,
    ) -> Self {
        FunctionSymbol {
            name: name.into(),
            kind,
            lex,
            mask,
        }
    }

    pub fn constructor(name: impl Into<String>, normal: usize, safe: usize) -> Self {
        Self::new(name, SymbolKind::Constructor, false, normal, safe)
    }

    pub fn defined(name: impl Into<String>, lex: bool, normal: usize, safe: usize) -> Self {
        Self::new(name, SymbolKind::Defined, lex, normal, safe)
    }

    pub fn arity(&self) -> usize {
        self.mask.len()
    }

    pub fn normal_arity(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn safe_arity(&self) -> usize {
        self.arity() - self.normal_arity()
    }

    pub fn is_constructor(&self) -> bool {
        self.kind == SymbolKind::Constructor
    }

    pub fn is_defined(&self) -> bool {
        self.kind == SymbolKind::Defined
    }

    /// `true` iff argument position `i` (0-based, source order) is normal.
    pub fn is_normal_position(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// `true` iff the normal positions form a prefix of the argument list,
    /// which is the only shape the text format can express.
    pub fn has_prefix_mask(&self) -> bool {
        let mut seen_safe = false;
        for &b in &self.mask {
            if b && seen_safe {
                return false;
            }
            seen_safe |= !b;
        }
        true
    }
}

/// A finite set of function symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    symbols: Vec<FunctionSymbol>,
    index: HashMap<String, SymbolId>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn add(&mut self, symbol: FunctionSymbol) -> Result<SymbolId, SignatureError> {
        if self.index.contains_key(&symbol.name) {
            return Err(SignatureError::DuplicateSymbol(symbol.name));
        }
        if symbol.lex && symbol.is_constructor() {
            return Err(SignatureError::LexConstructor(symbol.name));
        }
        let id = SymbolId(self.symbols.len());
        self.index.insert(symbol.name.clone(), id);
        self.symbols.push(symbol);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: SymbolId) -> &FunctionSymbol {
        &self.symbols[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &FunctionSymbol)> {
        self.symbols.iter().enumerate().map(|(i, s)| (SymbolId(i), s))
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0].name
    }

    /// Replace the separation mask of `id`. The mask length must match the
    /// symbol's arity; kind, lex flag and name are untouched.
    pub fn set_separation(&mut self, id: SymbolId, mask: &[bool]) -> Result<(), SignatureError> {
        let sym = &mut self.symbols[id.0];
        if mask.len() != sym.mask.len() {
            return Err(SignatureError::MaskLength {
                symbol: sym.name.clone(),
                got: mask.len(),
                arity: sym.mask.len(),
            });
        }
        sym.mask.copy_from_slice(mask);
        Ok(())
    }

    /// Checks the global signature invariants: at least one constructor
    /// constant, and the lex flag only on defined symbols.
    pub fn validate(&self) -> Result<(), SignatureError> {
        for sym in &self.symbols {
            if sym.lex && sym.is_constructor() {
                return Err(SignatureError::LexConstructor(sym.name.clone()));
            }
        }
        let has_constant = self
            .symbols
            .iter()
            .any(|s| s.is_constructor() && s.arity() == 0);
        if !has_constant {
            return Err(SignatureError::NoConstructorConstant);
        }
        Ok(())
    }
}

/// A first-order term: a variable or a symbol applied to arguments.
///
/// Arguments are stored in source order; use [`Term::split_args`] to view
/// them through the symbol's separation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(SymbolId, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(sym: SymbolId, args: Vec<Term>) -> Self {
        Term::App(sym, args)
    }

    pub fn constant(sym: SymbolId) -> Self {
        Term::App(sym, Vec::new())
    }

    /// Number of nodes in the tree; a variable counts as one node.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v.as_str());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Splits the arguments of an application into (normal, safe) per the
    /// symbol's mask, preserving source order inside each group. `None`
    /// for variables.
    pub fn split_args<'a>(&'a self, sig: &Signature) -> Option<(Vec<&'a Term>, Vec<&'a Term>)> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let sym = sig.symbol(*f);
                let mut normal = Vec::new();
                let mut safe = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if sym.is_normal_position(i) {
                        normal.push(a);
                    } else {
                        safe.push(a);
                    }
                }
                Some((normal, safe))
            }
        }
    }

    /// All arguments in display order: normal positions first, then safe.
    /// Coincides with source order for prefix masks.
    pub fn display_args<'a>(&'a self, sig: &Signature) -> Vec<&'a Term> {
        match self.split_args(sig) {
            None => Vec::new(),
            Some((mut n, s)) => {
                n.extend(s);
                n
            }
        }
    }

    /// Subterm at `path` (a list of source-order argument indices).
    pub fn subterm_at(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            match cur {
                Term::Var(_) => return None,
                Term::App(_, args) => cur = args.get(i)?,
            }
        }
        Some(cur)
    }

    /// Checks that every application matches its symbol's arity.
    pub fn check_arities(&self, sig: &Signature) -> Result<(), TermError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let sym = sig.symbol(*f);
                if args.len() != sym.arity() {
                    return Err(TermError::Arity {
                        symbol: sym.name.clone(),
                        expected: sym.arity(),
                        got: args.len(),
                    });
                }
                for a in args {
                    a.check_arities(sig)?;
                }
                Ok(())
            }
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("symbol `{symbol}` expects {expected} arguments, got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },
}

/// Renders a term in the `f(t1, ..., tk; u1, ..., ul)` notation, normal
/// arguments first. Constants print as a bare name.
pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Term, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Term::Var(v) => write!(f, "{v}"),
                Term::App(s, args) => {
                    write!(f, "{}", sig.name(*s))?;
                    if args.is_empty() {
                        return Ok(());
                    }
                    let (normal, safe) = t.split_args(sig).expect("application");
                    write!(f, "(")?;
                    for (i, a) in normal.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        go(a, sig, f)?;
                    }
                    write!(f, ";")?;
                    for (i, a) in safe.iter().enumerate() {
                        write!(f, "{}", if i > 0 { ", " } else { " " })?;
                        go(a, sig, f)?;
                    }
                    write!(f, ")")
                }
            }
        }
        go(self.term, self.sig, f)
    }
}

/// Term equivalence: variables are equivalent only to themselves;
/// applications are equivalent when the roots have equal rank, the normal
/// and safe arities agree, and the arguments are pairwise equivalent in
/// display order.
pub fn equiv(sig: &Signature, rank: &[usize], s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(a), Term::Var(b)) => a == b,
        (Term::App(f, _), Term::App(g, _)) => {
            let fs = sig.symbol(*f);
            let gs = sig.symbol(*g);
            if rank[f.0] != rank[g.0]
                || fs.normal_arity() != gs.normal_arity()
                || fs.safe_arity() != gs.safe_arity()
            {
                return false;
            }
            let (sn, ss) = s.split_args(sig).expect("application");
            let (tn, ts) = t.split_args(sig).expect("application");
            sn.iter().zip(&tn).all(|(a, b)| equiv(sig, rank, a, b))
                && ss.iter().zip(&ts).all(|(a, b)| equiv(sig, rank, a, b))
        }
        _ => false,
    }
}

/// Number of nodes in a term's tree representation.
pub fn term_size(t: &Term) -> usize {
    t.size()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("substitution image for `{0}` is not ground")]
    NonGroundImage(String),
    #[error("variable `{0}` is not bound and a ground result was requested")]
    Unbound(String),
}

/// A mapping from variable names to ground terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    /// Binds `var` to a ground `term`; rejects non-ground images.
    pub fn bind(&mut self, var: impl Into<String>, term: Term) -> Result<(), SubstError> {
        let var = var.into();
        if !term.is_ground() {
            return Err(SubstError::NonGroundImage(var));
        }
        self.map.insert(var, term);
        Ok(())
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Simultaneous replacement; variables outside the domain are kept.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// Like [`Substitution::apply`] but fails on any unbound variable, so
    /// the result is guaranteed ground.
    pub fn apply_ground(&self, t: &Term) -> Result<Term, SubstError> {
        match t {
            Term::Var(v) => self
                .map
                .get(v)
                .cloned()
                .ok_or_else(|| SubstError::Unbound(v.clone())),
            Term::App(f, args) => {
                let args = args
                    .iter()
                    .map(|a| self.apply_ground(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::App(*f, args))
            }
        }
    }
}

/// Convenience for spec-style call sites.
pub fn apply_subst(t: &Term, subst: &Substitution) -> Term {
    subst.apply(t)
}
