//! Compiler from primitive-recursive program descriptions to orientable
//! rewrite systems, plus a direct recursive evaluator used as an oracle.
//!
//! Plain programs (constants, projections, composition, recursion on the
//! first argument) compile to systems whose symbols have safe positions
//! only. The three extended recursion shapes get a recursion symbol with
//! the recursion arguments in normal positions, compared
//! lexicographically, and primed wrapper symbols that move arguments of
//! the safe-only callee into the normal/safe split at the call site.
//! Every compiled system is checked to be orientable before it is
//! returned; numerals are built from the shared constructors `0` and `s`.

use thiserror::Error;

use crate::orientation::check_trs;
use crate::orders::OrderParams;
use crate::rewrite::{normalize, Normalization};
use crate::syntax::{tokenize, ParseError, Tok, Token};
use crate::term::{FunctionSymbol, Signature, SymbolId, Term};
use crate::trs::{Precedence, Rule, Trs, TrsError};

/// A primitive-recursive program. Sub-programs are owned; referencing the
/// same definition twice duplicates it under fresh symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrProgram {
    /// The k-ary constant-zero function.
    Zero(usize),
    /// The numeric successor.
    Succ,
    /// Projection to argument `j` (1-based) of `k`.
    Proj { k: usize, j: usize },
    Comp {
        h: Box<PrProgram>,
        gs: Vec<PrProgram>,
    },
    /// Recursion on the first argument: `f(0, ys) = g(ys)`,
    /// `f(x+1, ys) = h(x, ys, f(x, ys))`.
    PrimRec {
        g: Box<PrProgram>,
        h: Box<PrProgram>,
    },
    /// Parameter substitution: `f(x+1, y) = h(x, y, f(x, p(x, y)))`.
    Prp {
        g: Box<PrProgram>,
        h: Box<PrProgram>,
        p: Box<PrProgram>,
    },
    /// Unnested double recursion:
    /// `f(0, y) = g0(y)`, `f(x+1, 0) = g1(x, f(x, q(x)))`,
    /// `f(x+1, y+1) = h(x, y, f(x, p(x, y)), f(x+1, y))`.
    Umr {
        g0: Box<PrProgram>,
        g1: Box<PrProgram>,
        q: Box<PrProgram>,
        p: Box<PrProgram>,
        h: Box<PrProgram>,
    },
    /// Simple nested recursion:
    /// `f(x+1, y) = h(x, y, f(x, p(x, y, f(x, y))))`.
    Snr {
        g: Box<PrProgram>,
        h: Box<PrProgram>,
        p: Box<PrProgram>,
    },
    /// Uninterpreted defined symbol with no rules; only for
    /// orientation-level tests, the evaluator rejects it.
    Stub { arity: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("arity error: {0}")]
    Arity(String),
    #[error("line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("evaluation budget exceeded")]
    OracleLimit,
    #[error("arithmetic overflow in the evaluator")]
    Overflow,
    #[error("stub program has no semantics")]
    StubEvaluated,
    #[error("normalization step limit exceeded")]
    StepLimit,
    #[error("normal form `{0}` is not a numeral; an under-defined stub was probably evaluated")]
    NotNumeral(String),
    #[error("compiler produced an inconsistent system: {0}")]
    Internal(String),
}

impl PrProgram {
    pub fn zero(k: usize) -> Self {
        PrProgram::Zero(k)
    }

    pub fn proj(k: usize, j: usize) -> Self {
        PrProgram::Proj { k, j }
    }

    pub fn comp(h: PrProgram, gs: Vec<PrProgram>) -> Self {
        PrProgram::Comp {
            h: Box::new(h),
            gs,
        }
    }

    pub fn primrec(g: PrProgram, h: PrProgram) -> Self {
        PrProgram::PrimRec {
            g: Box::new(g),
            h: Box::new(h),
        }
    }

    pub fn prp(g: PrProgram, h: PrProgram, p: PrProgram) -> Self {
        PrProgram::Prp {
            g: Box::new(g),
            h: Box::new(h),
            p: Box::new(p),
        }
    }

    pub fn umr(g0: PrProgram, g1: PrProgram, q: PrProgram, p: PrProgram, h: PrProgram) -> Self {
        PrProgram::Umr {
            g0: Box::new(g0),
            g1: Box::new(g1),
            q: Box::new(q),
            p: Box::new(p),
            h: Box::new(h),
        }
    }

    pub fn snr(g: PrProgram, h: PrProgram, p: PrProgram) -> Self {
        PrProgram::Snr {
            g: Box::new(g),
            h: Box::new(h),
            p: Box::new(p),
        }
    }

    /// Checks internal arity consistency and returns the program's arity.
    pub fn arity(&self) -> Result<usize, SchemaError> {
        fn expect(p: &PrProgram, want: usize, role: &str) -> Result<(), SchemaError> {
            let got = p.arity()?;
            if got != want {
                return Err(SchemaError::Arity(format!(
                    "{role} must be {want}-ary, got {got}"
                )));
            }
            Ok(())
        }
        match self {
            PrProgram::Zero(k) => Ok(*k),
            PrProgram::Succ => Ok(1),
            PrProgram::Proj { k, j } => {
                if *j < 1 || *j > *k {
                    return Err(SchemaError::Arity(format!(
                        "projection index {j} out of range 1..={k}"
                    )));
                }
                Ok(*k)
            }
            PrProgram::Comp { h, gs } => {
                if gs.is_empty() {
                    return Err(SchemaError::Arity(
                        "composition needs at least one inner function".into(),
                    ));
                }
                let k = gs[0].arity()?;
                for (i, g) in gs.iter().enumerate() {
                    expect(g, k, &format!("inner function {}", i + 1))?;
                }
                expect(h, gs.len(), "outer function")?;
                Ok(k)
            }
            PrProgram::PrimRec { g, h } => {
                let k = g.arity()?;
                expect(h, k + 2, "step function")?;
                Ok(k + 1)
            }
            PrProgram::Prp { g, h, p } => {
                expect(g, 1, "base function")?;
                expect(h, 3, "step function")?;
                expect(p, 2, "parameter function")?;
                Ok(2)
            }
            PrProgram::Umr { g0, g1, q, p, h } => {
                expect(g0, 1, "base function")?;
                expect(g1, 2, "column-base function")?;
                expect(q, 1, "column parameter function")?;
                expect(p, 2, "parameter function")?;
                expect(h, 4, "step function")?;
                Ok(2)
            }
            PrProgram::Snr { g, h, p } => {
                expect(g, 1, "base function")?;
                expect(h, 3, "step function")?;
                expect(p, 3, "parameter function")?;
                Ok(2)
            }
            PrProgram::Stub { arity } => Ok(*arity),
        }
    }
}

/// A compiled program: the rewrite system, the symbol computing the
/// program, and order parameters under which every rule is oriented.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    pub trs: Trs,
    pub main: SymbolId,
    pub params: OrderParams,
}

struct Builder {
    sig: Signature,
    zero: SymbolId,
    succ: SymbolId,
    strict: Vec<(SymbolId, SymbolId)>,
    rules: Vec<Rule>,
}

fn path_name(path: &[usize]) -> String {
    let mut name = String::from("f");
    for i in path {
        name.push('_');
        name.push_str(&i.to_string());
    }
    name
}

impl Builder {
    fn new() -> Self {
        let mut sig = Signature::new();
        let zero = sig
            .add(FunctionSymbol::constructor("0", 0, 0))
            .expect("fresh signature");
        let succ = sig
            .add(FunctionSymbol::constructor("s", 0, 1))
            .expect("fresh signature");
        Builder {
            sig,
            zero,
            succ,
            strict: Vec::new(),
            rules: Vec::new(),
        }
    }

    fn add(&mut self, sym: FunctionSymbol) -> Result<SymbolId, SchemaError> {
        self.sig
            .add(sym)
            .map_err(|e| SchemaError::Internal(e.to_string()))
    }

    fn vars(prefix: &str, n: usize) -> Vec<Term> {
        (1..=n).map(|i| Term::var(format!("{prefix}{i}"))).collect()
    }

    fn snum(&self, inner: Term) -> Term {
        Term::app(self.succ, vec![inner])
    }

    /// Emits the system for `p` and returns its main symbol. `path` makes
    /// the generated names unique and reproducible.
    fn emit(&mut self, p: &PrProgram, path: &mut Vec<usize>) -> Result<SymbolId, SchemaError> {
        let name = path_name(path);
        match p {
            PrProgram::Succ => Ok(self.succ),
            PrProgram::Zero(k) => {
                let f = self.add(FunctionSymbol::defined(name, false, 0, *k))?;
                let xs = Self::vars("x", *k);
                self.rules.push(Rule {
                    lhs: Term::app(f, xs),
                    rhs: Term::constant(self.zero),
                });
                self.strict.push((f, self.zero));
                Ok(f)
            }
            PrProgram::Proj { k, j } => {
                let f = self.add(FunctionSymbol::defined(name, false, 0, *k))?;
                let xs = Self::vars("x", *k);
                let out = xs[*j - 1].clone();
                self.rules.push(Rule {
                    lhs: Term::app(f, xs),
                    rhs: out,
                });
                Ok(f)
            }
            PrProgram::Comp { h, gs } => {
                let k = gs[0].arity().expect("validated");
                let h_main = self.child(h, path, 0)?;
                let mut g_mains = Vec::with_capacity(gs.len());
                for (i, g) in gs.iter().enumerate() {
                    g_mains.push(self.child(g, path, i + 1)?);
                }
                let f = self.add(FunctionSymbol::defined(name, false, 0, k))?;
                let xs = Self::vars("x", k);
                let inner: Vec<Term> = g_mains
                    .iter()
                    .map(|&g| Term::app(g, xs.clone()))
                    .collect();
                self.rules.push(Rule {
                    lhs: Term::app(f, xs),
                    rhs: Term::app(h_main, inner),
                });
                self.strict.push((f, h_main));
                for &g in &g_mains {
                    self.strict.push((f, g));
                }
                Ok(f)
            }
            PrProgram::PrimRec { g, h } => {
                let k = g.arity().expect("validated");
                let g_main = self.child(g, path, 0)?;
                let h_main = self.child(h, path, 1)?;
                let f = self.add(FunctionSymbol::defined(name, false, 0, k + 1))?;
                let ys = Self::vars("y", k);
                let x = Term::var("x");

                let mut base_lhs = vec![Term::constant(self.zero)];
                base_lhs.extend(ys.clone());
                self.rules.push(Rule {
                    lhs: Term::app(f, base_lhs),
                    rhs: Term::app(g_main, ys.clone()),
                });

                let mut step_lhs = vec![self.snum(x.clone())];
                step_lhs.extend(ys.clone());
                let mut rec_args = vec![x.clone()];
                rec_args.extend(ys.clone());
                let mut h_args = vec![x.clone()];
                h_args.extend(ys.clone());
                h_args.push(Term::app(f, rec_args));
                self.rules.push(Rule {
                    lhs: Term::app(f, step_lhs),
                    rhs: Term::app(h_main, h_args),
                });

                self.strict.push((f, g_main));
                self.strict.push((f, h_main));
                Ok(f)
            }
            PrProgram::Prp { g, h, p } => {
                let g_main = self.child(g, path, 0)?;
                let h_main = self.child(h, path, 1)?;
                let p_main = self.child(p, path, 2)?;
                let hp = self.add(FunctionSymbol::defined(format!("{name}_hp"), false, 1, 2))?;
                let pp = self.add(FunctionSymbol::defined(format!("{name}_pp"), false, 1, 1))?;
                let f = self.add(FunctionSymbol::defined(name, true, 1, 1))?;
                let (x, y) = (Term::var("x"), Term::var("y"));
                let z = Term::var("z");

                self.rules.push(Rule {
                    lhs: Term::app(pp, vec![x.clone(), y.clone()]),
                    rhs: Term::app(p_main, vec![x.clone(), y.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(hp, vec![x.clone(), y.clone(), z.clone()]),
                    rhs: Term::app(h_main, vec![x.clone(), y.clone(), z.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![Term::constant(self.zero), y.clone()]),
                    rhs: Term::app(g_main, vec![y.clone()]),
                });
                let rec = Term::app(
                    f,
                    vec![x.clone(), Term::app(pp, vec![x.clone(), y.clone()])],
                );
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![self.snum(x.clone()), y.clone()]),
                    rhs: Term::app(hp, vec![x.clone(), y.clone(), rec]),
                });

                self.strict.push((pp, p_main));
                self.strict.push((hp, h_main));
                self.strict.push((f, g_main));
                self.strict.push((f, pp));
                self.strict.push((f, hp));
                Ok(f)
            }
            PrProgram::Umr { g0, g1, q, p, h } => {
                let g0_main = self.child(g0, path, 0)?;
                let g1_main = self.child(g1, path, 1)?;
                let q_main = self.child(q, path, 2)?;
                let p_main = self.child(p, path, 3)?;
                let h_main = self.child(h, path, 4)?;
                let g0p = self.add(FunctionSymbol::defined(format!("{name}_g0p"), false, 1, 0))?;
                let g1p = self.add(FunctionSymbol::defined(format!("{name}_g1p"), false, 1, 1))?;
                let qp = self.add(FunctionSymbol::defined(format!("{name}_qp"), false, 1, 0))?;
                let pp = self.add(FunctionSymbol::defined(format!("{name}_pp"), false, 2, 0))?;
                let hp = self.add(FunctionSymbol::defined(format!("{name}_hp"), false, 2, 2))?;
                let f = self.add(FunctionSymbol::defined(name, true, 2, 0))?;
                let (x, y) = (Term::var("x"), Term::var("y"));
                let (u, v) = (Term::var("u"), Term::var("v"));
                let zero = Term::constant(self.zero);

                self.rules.push(Rule {
                    lhs: Term::app(g0p, vec![y.clone()]),
                    rhs: Term::app(g0_main, vec![y.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(g1p, vec![x.clone(), u.clone()]),
                    rhs: Term::app(g1_main, vec![x.clone(), u.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(qp, vec![x.clone()]),
                    rhs: Term::app(q_main, vec![x.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(pp, vec![x.clone(), y.clone()]),
                    rhs: Term::app(p_main, vec![x.clone(), y.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(hp, vec![x.clone(), y.clone(), u.clone(), v.clone()]),
                    rhs: Term::app(h_main, vec![x.clone(), y.clone(), u.clone(), v.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![zero.clone(), y.clone()]),
                    rhs: Term::app(g0p, vec![y.clone()]),
                });
                let col_rec = Term::app(f, vec![x.clone(), Term::app(qp, vec![x.clone()])]);
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![self.snum(x.clone()), zero.clone()]),
                    rhs: Term::app(g1p, vec![x.clone(), col_rec]),
                });
                let rec1 = Term::app(
                    f,
                    vec![x.clone(), Term::app(pp, vec![x.clone(), y.clone()])],
                );
                let rec2 = Term::app(f, vec![self.snum(x.clone()), y.clone()]);
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![self.snum(x.clone()), self.snum(y.clone())]),
                    rhs: Term::app(hp, vec![x.clone(), y.clone(), rec1, rec2]),
                });

                for (above, below) in [
                    (g0p, g0_main),
                    (g1p, g1_main),
                    (qp, q_main),
                    (pp, p_main),
                    (hp, h_main),
                ] {
                    self.strict.push((above, below));
                }
                for wrapper in [g0p, g1p, qp, pp, hp] {
                    self.strict.push((f, wrapper));
                }
                Ok(f)
            }
            PrProgram::Snr { g, h, p } => {
                let g_main = self.child(g, path, 0)?;
                let h_main = self.child(h, path, 1)?;
                let p_main = self.child(p, path, 2)?;
                let pp = self.add(FunctionSymbol::defined(format!("{name}_pp"), false, 1, 2))?;
                let hp = self.add(FunctionSymbol::defined(format!("{name}_hp"), false, 1, 2))?;
                let f = self.add(FunctionSymbol::defined(name, true, 1, 1))?;
                let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));

                self.rules.push(Rule {
                    lhs: Term::app(pp, vec![x.clone(), y.clone(), z.clone()]),
                    rhs: Term::app(p_main, vec![x.clone(), y.clone(), z.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(hp, vec![x.clone(), y.clone(), z.clone()]),
                    rhs: Term::app(h_main, vec![x.clone(), y.clone(), z.clone()]),
                });
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![Term::constant(self.zero), y.clone()]),
                    rhs: Term::app(g_main, vec![y.clone()]),
                });
                let inner = Term::app(f, vec![x.clone(), y.clone()]);
                let rec = Term::app(
                    f,
                    vec![
                        x.clone(),
                        Term::app(pp, vec![x.clone(), y.clone(), inner]),
                    ],
                );
                self.rules.push(Rule {
                    lhs: Term::app(f, vec![self.snum(x.clone()), y.clone()]),
                    rhs: Term::app(hp, vec![x.clone(), y.clone(), rec]),
                });

                self.strict.push((pp, p_main));
                self.strict.push((hp, h_main));
                self.strict.push((f, g_main));
                self.strict.push((f, pp));
                self.strict.push((f, hp));
                Ok(f)
            }
            PrProgram::Stub { arity } => {
                self.add(FunctionSymbol::defined(name, false, 0, *arity))
            }
        }
    }

    fn child(
        &mut self,
        p: &PrProgram,
        path: &mut Vec<usize>,
        index: usize,
    ) -> Result<SymbolId, SchemaError> {
        path.push(index);
        let id = self.emit(p, path);
        path.pop();
        id
    }
}

/// Compiles a program to a rewrite system oriented by the returned
/// parameters.
pub fn compile(p: &PrProgram) -> Result<CompiledSystem, SchemaError> {
    p.arity()?;
    let mut builder = Builder::new();
    let main = builder.emit(p, &mut Vec::new())?;
    let trs = Trs::new(
        builder.sig,
        Precedence {
            strict: builder.strict,
            equal: Vec::new(),
        },
        builder.rules,
    )
    .map_err(|e: TrsError| SchemaError::Internal(e.to_string()))?;
    let params = OrderParams::from_trs(&trs);
    let check = check_trs(&trs, &params).map_err(|e| SchemaError::Internal(e.to_string()))?;
    if !check.oriented {
        return Err(SchemaError::Internal(
            "compiled system is not orientable".into(),
        ));
    }
    Ok(CompiledSystem { trs, main, params })
}

/// Step budget for the direct evaluator.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_steps: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_steps: 10_000_000,
        }
    }
}

/// Direct recursive evaluation of the program semantics, no rewriting.
pub fn eval_oracle(p: &PrProgram, args: &[u64]) -> Result<u64, SchemaError> {
    eval_oracle_with(p, args, OracleLimits::default())
}

pub fn eval_oracle_with(
    p: &PrProgram,
    args: &[u64],
    limits: OracleLimits,
) -> Result<u64, SchemaError> {
    let arity = p.arity()?;
    if args.len() != arity {
        return Err(SchemaError::Arity(format!(
            "program is {arity}-ary, got {} arguments",
            args.len()
        )));
    }
    let mut steps = 0u64;
    eval(p, args, &mut steps, limits.max_steps)
}

fn eval(p: &PrProgram, args: &[u64], steps: &mut u64, max: u64) -> Result<u64, SchemaError> {
    *steps += 1;
    if *steps > max {
        return Err(SchemaError::OracleLimit);
    }
    match p {
        PrProgram::Zero(_) => Ok(0),
        PrProgram::Succ => args[0].checked_add(1).ok_or(SchemaError::Overflow),
        PrProgram::Proj { j, .. } => Ok(args[*j - 1]),
        PrProgram::Comp { h, gs } => {
            let mut vals = Vec::with_capacity(gs.len());
            for g in gs {
                vals.push(eval(g, args, steps, max)?);
            }
            eval(h, &vals, steps, max)
        }
        PrProgram::PrimRec { g, h } => {
            let (x, ys) = (args[0], &args[1..]);
            if x == 0 {
                return eval(g, ys, steps, max);
            }
            let mut rec_args = vec![x - 1];
            rec_args.extend_from_slice(ys);
            let below = eval(p, &rec_args, steps, max)?;
            let mut h_args = vec![x - 1];
            h_args.extend_from_slice(ys);
            h_args.push(below);
            eval(h, &h_args, steps, max)
        }
        PrProgram::Prp { g, h, p: par } => {
            let (x, y) = (args[0], args[1]);
            if x == 0 {
                return eval(g, &[y], steps, max);
            }
            let shifted = eval(par, &[x - 1, y], steps, max)?;
            let below = eval(p, &[x - 1, shifted], steps, max)?;
            eval(h, &[x - 1, y, below], steps, max)
        }
        PrProgram::Umr { g0, g1, q, p: par, h } => {
            let (x, y) = (args[0], args[1]);
            if x == 0 {
                return eval(g0, &[y], steps, max);
            }
            if y == 0 {
                let col = eval(q, &[x - 1], steps, max)?;
                let below = eval(p, &[x - 1, col], steps, max)?;
                return eval(g1, &[x - 1, below], steps, max);
            }
            let shifted = eval(par, &[x - 1, y - 1], steps, max)?;
            let diag = eval(p, &[x - 1, shifted], steps, max)?;
            let row = eval(p, &[x, y - 1], steps, max)?;
            eval(h, &[x - 1, y - 1, diag, row], steps, max)
        }
        PrProgram::Snr { g, h, p: par } => {
            let (x, y) = (args[0], args[1]);
            if x == 0 {
                return eval(g, &[y], steps, max);
            }
            let inner = eval(p, &[x - 1, y], steps, max)?;
            let shifted = eval(par, &[x - 1, y, inner], steps, max)?;
            let below = eval(p, &[x - 1, shifted], steps, max)?;
            eval(h, &[x - 1, y, below], steps, max)
        }
        PrProgram::Stub { .. } => Err(SchemaError::StubEvaluated),
    }
}

/// The numeral for `n` over a signature containing `0` and `s`.
pub fn numeral(sig: &Signature, n: u64) -> Term {
    let zero = sig.id_of("0").expect("compiled signatures contain 0");
    let succ = sig.id_of("s").expect("compiled signatures contain s");
    let mut t = Term::constant(zero);
    for _ in 0..n {
        t = Term::app(succ, vec![t]);
    }
    t
}

/// Reads a numeral back; anything else is an error.
pub fn decode_numeral(sig: &Signature, t: &Term) -> Result<u64, SchemaError> {
    let zero = sig.id_of("0");
    let succ = sig.id_of("s");
    let mut n = 0u64;
    let mut cur = t;
    loop {
        match cur {
            Term::App(f, args) if Some(*f) == succ && args.len() == 1 => {
                n += 1;
                cur = &args[0];
            }
            Term::App(f, args) if Some(*f) == zero && args.is_empty() => return Ok(n),
            _ => {
                return Err(SchemaError::NotNumeral(format!("{}", t.display(sig))));
            }
        }
    }
}

/// Compiles the program, runs it on `args` by rewriting, and compares the
/// decoded normal form against the direct evaluator.
pub fn crosscheck(p: &PrProgram, args: &[u64]) -> Result<bool, SchemaError> {
    let compiled = compile(p)?;
    crosscheck_compiled(&compiled, p, args)
}

/// Crosscheck against an already compiled system.
pub fn crosscheck_compiled(
    compiled: &CompiledSystem,
    p: &PrProgram,
    args: &[u64],
) -> Result<bool, SchemaError> {
    let expected = eval_oracle(p, args)?;
    let sig = &compiled.trs.signature;
    let call = Term::app(
        compiled.main,
        args.iter().map(|&a| numeral(sig, a)).collect(),
    );
    let nf = match normalize(&call, &compiled.trs, 5_000_000)
        .map_err(|e| SchemaError::Internal(e.to_string()))?
    {
        Normalization::Normal(nf, _) => nf,
        Normalization::StepLimit => return Err(SchemaError::StepLimit),
    };
    Ok(decode_numeral(sig, &nf)? == expected)
}

/// Parses a schema file: one `def name = expr` per line, `#` comments,
/// names referring to earlier definitions. Returns the definitions in
/// order; the last one is the program a compiler invocation acts on.
pub fn parse_schema(text: &str) -> Result<Vec<(String, PrProgram)>, SchemaError> {
    let mut defs: Vec<(String, PrProgram)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = tokenize(raw, lineno).map_err(convert_parse_err)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = SchemaCursor {
            toks: &toks,
            pos: 0,
            line: lineno,
        };
        let kw = cur.ident("the keyword `def`")?;
        if kw != "def" {
            return cur.fail("expected `def`");
        }
        let name = cur.ident("a definition name")?;
        cur.expect(Tok::Eq, "`=`")?;
        let expr = parse_expr(&mut cur, &defs)?;
        if cur.pos != toks.len() {
            return cur.fail("trailing input after definition");
        }
        if defs.iter().any(|(n, _)| *n == name) {
            return cur.fail(format!("duplicate definition `{name}`"));
        }
        expr.arity()?;
        defs.push((name, expr));
    }
    Ok(defs)
}

fn convert_parse_err(e: ParseError) -> SchemaError {
    match e {
        ParseError::Syntax { line, col, message } => SchemaError::Parse { line, col, message },
        ParseError::Invalid(e) => SchemaError::Internal(e.to_string()),
    }
}

struct SchemaCursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
}

impl SchemaCursor<'_> {
    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or_else(|| self.toks.last().map(|t| t.col + 1).unwrap_or(1))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, SchemaError> {
        Err(SchemaError::Parse {
            line: self.line,
            col: self.col(),
            message: message.into(),
        })
    }

    fn ident(&mut self, what: &str) -> Result<String, SchemaError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) => {
                self.pos += 1;
                Ok(name.clone())
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SchemaError> {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn nat(&mut self, what: &str) -> Result<usize, SchemaError> {
        let col = self.col();
        let word = self.ident(what)?;
        word.parse::<usize>().map_err(|_| SchemaError::Parse {
            line: self.line,
            col,
            message: format!("expected a natural number for {what}, found `{word}`"),
        })
    }
}

fn parse_expr(
    cur: &mut SchemaCursor,
    defs: &[(String, PrProgram)],
) -> Result<PrProgram, SchemaError> {
    let head = cur.ident("a schema expression")?;
    match head.as_str() {
        "succ" => Ok(PrProgram::Succ),
        "zero" => {
            cur.expect(Tok::LParen, "`(`")?;
            let k = cur.nat("the arity")?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(PrProgram::Zero(k))
        }
        "proj" => {
            cur.expect(Tok::LParen, "`(`")?;
            let k = cur.nat("the arity")?;
            cur.expect(Tok::Comma, "`,`")?;
            let j = cur.nat("the projection index")?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(PrProgram::Proj { k, j })
        }
        "comp" => {
            cur.expect(Tok::LParen, "`(`")?;
            let h = parse_expr(cur, defs)?;
            cur.expect(Tok::Semi, "`;` after the outer function")?;
            let mut gs = vec![parse_expr(cur, defs)?];
            while cur.eat(Tok::Comma) {
                gs.push(parse_expr(cur, defs)?);
            }
            cur.expect(Tok::RParen, "`)`")?;
            Ok(PrProgram::comp(h, gs))
        }
        "primrec" => {
            let [g, h] = parse_args::<2>(cur, defs)?;
            Ok(PrProgram::primrec(g, h))
        }
        "prp" => {
            let [g, h, p] = parse_args::<3>(cur, defs)?;
            Ok(PrProgram::prp(g, h, p))
        }
        "umr" => {
            let [g0, g1, q, p, h] = parse_args::<5>(cur, defs)?;
            Ok(PrProgram::umr(g0, g1, q, p, h))
        }
        "snr" => {
            let [g, h, p] = parse_args::<3>(cur, defs)?;
            Ok(PrProgram::snr(g, h, p))
        }
        name => match defs.iter().find(|(n, _)| n == name) {
            Some((_, p)) => Ok(p.clone()),
            None => cur.fail(format!("unknown definition `{name}`")),
        },
    }
}

fn parse_args<const N: usize>(
    cur: &mut SchemaCursor,
    defs: &[(String, PrProgram)],
) -> Result<[PrProgram; N], SchemaError> {
    cur.expect(Tok::LParen, "`(`")?;
    let mut out = Vec::with_capacity(N);
    for i in 0..N {
        if i > 0 {
            cur.expect(Tok::Comma, "`,`")?;
        }
        out.push(parse_expr(cur, defs)?);
    }
    cur.expect(Tok::RParen, "`)`")?;
    Ok(out.try_into().expect("exact length"))
}

/// Addition via recursion on the first argument.
pub fn addition() -> PrProgram {
    PrProgram::primrec(
        PrProgram::proj(1, 1),
        PrProgram::comp(PrProgram::Succ, vec![PrProgram::proj(3, 3)]),
    )
}

/// Multiplication on top of [`addition`].
pub fn multiplication() -> PrProgram {
    PrProgram::primrec(
        PrProgram::zero(1),
        PrProgram::comp(addition(), vec![PrProgram::proj(3, 3), PrProgram::proj(3, 2)]),
    )
}
