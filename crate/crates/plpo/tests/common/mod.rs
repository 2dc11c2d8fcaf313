//! Shared helpers for the integration suites: fixture loading and seeded
//! random generation of signatures and terms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plpo::orders::OrderParams;
use plpo::syntax::parse_trs;
use plpo::term::{FunctionSymbol, Signature, SymbolKind, Term};
use plpo::trs::Trs;

/// Seed for every randomized suite; override with `PLPO_TEST_SEED`.
pub fn seed() -> u64 {
    std::env::var("PLPO_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0xC0FFEE)
}

pub fn rng_from(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ offset)
}

pub fn fixture(name: &str) -> Trs {
    let path = format!("{}/../../problems/{name}.trs", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_trs(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// A random signature with arbitrary separation masks plus standalone
/// order parameters. Two defined symbols share a rank and both arities,
/// so equivalence between distinct roots is exercised.
pub fn random_signature(rng: &mut ChaCha8Rng) -> (Signature, OrderParams) {
    let mut sig = Signature::new();
    sig.add(FunctionSymbol::constructor("c0", 0, 0)).unwrap();
    if rng.gen_bool(0.5) {
        sig.add(FunctionSymbol::constructor("c1", 0, 0)).unwrap();
    }
    let unary_normal = rng.gen_bool(0.3);
    sig.add(FunctionSymbol::new(
        "u",
        SymbolKind::Constructor,
        false,
        usize::from(unary_normal),
        usize::from(!unary_normal),
    ))
    .unwrap();

    let defined = rng.gen_range(2..=4usize);
    for i in 0..defined {
        let arity = rng.gen_range(1..=3usize);
        let mask: Vec<bool> = (0..arity).map(|_| rng.gen_bool(0.5)).collect();
        sig.add(FunctionSymbol::with_mask(
            format!("d{i}"),
            SymbolKind::Defined,
            rng.gen_bool(0.4),
            mask,
        ))
        .unwrap();
    }
    // A rank-sharing twin of the first defined symbol.
    let twin_of = sig.id_of("d0").unwrap();
    let twin_src = sig.symbol(twin_of).clone();
    let mut twin = twin_src.clone();
    twin.name = "d0t".into();
    twin.lex = twin_src.lex;
    sig.add(twin).unwrap();

    let n = sig.len();
    let mut rank: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3usize)).collect();
    let twin_id = sig.id_of("d0t").unwrap();
    rank[twin_id.0] = rank[twin_of.0];
    let lex: Vec<bool> = sig.iter().map(|(_, s)| s.lex).collect();
    (
        sig,
        OrderParams {
            rank,
            lex,
            permutation_extension: false,
        },
    )
}

/// A random term of bounded depth over a small variable pool.
pub fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> Term {
    const VARS: [&str; 3] = ["x", "y", "z"];
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if rng.gen_bool(0.5) {
            return Term::var(VARS[rng.gen_range(0..VARS.len())]);
        }
        let constants: Vec<_> = sig.iter().filter(|(_, s)| s.arity() == 0).collect();
        let (id, _) = constants[rng.gen_range(0..constants.len())];
        return Term::constant(id);
    }
    let candidates: Vec<_> = sig.iter().collect();
    let (id, sym) = candidates[rng.gen_range(0..candidates.len())];
    let args = (0..sym.arity())
        .map(|_| random_term(rng, sig, depth - 1))
        .collect();
    Term::app(id, args)
}
