//! A toolkit for the predicative lexicographic path order: decision
//! procedures with replayable certificates, exhaustive orientation search,
//! a primitive-recursive interpretation for derivation-length bounds, a
//! ground rewrite engine, and a compiler from primitive-recursive program
//! schemas to orientable rewrite systems.

pub mod interp;
pub mod orders;
pub mod orientation;
pub mod replay;
pub mod rewrite;
pub mod schema;
pub mod syntax;
pub mod term;
pub mod trs;

pub use interp::{derive_params, f_m, f_mn, interpret, EvalBudget, InterpParams};
pub use orders::{
    aux_gt, aux_gt_bounded, lpo_gt, plpo_gt, plpo_gt_bounded, Case, Certificate, Judgment,
    OrderParams,
};
pub use orientation::{
    check_trs, search_orientation, validate_params, OrientationResult, SearchReport, SearchSpace,
};
pub use replay::replay;
pub use rewrite::{
    derivation_length, enumerate_ground_terms, normalize, successors, termination_probe,
    DerivationAnalyzer, Limits,
};
pub use schema::{compile, crosscheck, eval_oracle, parse_schema, CompiledSystem, PrProgram};
pub use syntax::{parse_term, parse_trs, print_trs};
pub use term::{equiv, term_size, FunctionSymbol, Signature, Substitution, SymbolId, Term};
pub use trs::{Precedence, Rule, Trs};
