//! Shared inputs for the pipeline benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rematch_core::sample::ExprFamily;
use rematch_core::{min_comp, parse, subset_tc, thompson, Expr, InputSymbol, Mealy};

pub const E3: &str = "a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>";

/// A wider pattern set joined by union, to give the determinizer more work.
pub const KEYWORDS: &str =
    "f(o|a)+r<LOOP>|w(h|i)+le<LOOP>|i+f<COND>|e(l|s)+e<COND>|r(e|t)+urn<RET>";

pub fn expr(text: &str) -> Expr {
    parse(text).expect("benchmark patterns parse")
}

pub fn complete_machine(text: &str) -> Mealy {
    min_comp(&subset_tc(&thompson(&expr(text))).expect("no output before input"))
}

/// `len` symbols drawn uniformly from `m`'s input alphabet.
pub fn random_stream(m: &Mealy, len: usize, seed: u64) -> Vec<InputSymbol> {
    let sigma = m.input_alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| sigma[rng.gen_range(0..sigma.len())])
        .collect()
}

/// Random expressions from a larger family than the property suites use.
pub fn corpus(count: usize, seed: u64) -> Vec<Expr> {
    let family = ExprFamily {
        max_size: 24,
        inputs: vec!['a', 'b', 'c', 'd'],
        ..ExprFamily::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| family.sample(&mut rng)).collect()
}
