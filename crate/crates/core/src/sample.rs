//! Seeded random inputs for property suites, the CLI and benches.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::mealy::Mealy;
use crate::minimize::{DfaView, ULabel};
use crate::regexp::Expr;
use crate::symbol::{InputSymbol, OutputSet, OutputSymbol, StateId, Word};

/// Shape of the random expression family.
#[derive(Debug, Clone)]
pub struct ExprFamily {
    /// Maximum number of AST nodes.
    pub max_size: usize,
    pub inputs: Vec<char>,
    pub outputs: Vec<String>,
    /// Probability that an atom carries an annotation.
    pub annotate: f64,
    /// Probability that a leaf is `()` rather than an atom.
    pub epsilon: f64,
}

impl Default for ExprFamily {
    /// AST ≤ 8, |Σ| ≤ 3, |Γ| ≤ 2.
    fn default() -> Self {
        ExprFamily {
            max_size: 8,
            inputs: vec!['a', 'b', 'c'],
            outputs: vec!["X".into(), "Y".into()],
            annotate: 0.35,
            epsilon: 0.08,
        }
    }
}

impl ExprFamily {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Expr {
        let size = rng.gen_range(1..=self.max_size.max(1));
        self.of_size(rng, size)
    }

    /// An expression with exactly `size` nodes.
    pub fn of_size<R: Rng + ?Sized>(&self, rng: &mut R, size: usize) -> Expr {
        if size <= 1 {
            return self.leaf(rng);
        }
        if size == 2 || rng.gen_bool(0.25) {
            let inner = self.of_size(rng, size - 1);
            return if rng.gen_bool(0.5) {
                Expr::star(inner)
            } else {
                Expr::plus(inner)
            };
        }
        let left = rng.gen_range(1..=size - 2);
        let a = self.of_size(rng, left);
        let b = self.of_size(rng, size - 1 - left);
        if rng.gen_bool(0.5) {
            Expr::concat(a, b)
        } else {
            Expr::union(a, b)
        }
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> Expr {
        if self.inputs.is_empty() || rng.gen_bool(self.epsilon) {
            return Expr::Epsilon;
        }
        let c = *self.inputs.choose(rng).expect("non-empty");
        if !self.outputs.is_empty() && rng.gen_bool(self.annotate) {
            let o = self.outputs.choose(rng).expect("non-empty");
            Expr::annotated(c, o)
        } else {
            Expr::atom(c)
        }
    }
}

/// A word of uniformly chosen length in `0..=max_len` over `alphabet`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, alphabet: &[InputSymbol], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    random_word_of_len(rng, alphabet, len)
}

pub fn random_word_of_len<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &[InputSymbol],
    len: usize,
) -> Word {
    if alphabet.is_empty() {
        return Word::empty();
    }
    Word(
        (0..len)
            .map(|_| *alphabet.choose(rng).expect("non-empty"))
            .collect(),
    )
}

/// A complete DFA with `states` states over `labels` (which must be
/// non-empty), random transitions and roughly half of the states final.
pub fn random_complete_dfa<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    labels: &[ULabel],
) -> DfaView {
    let mut a = DfaView::new(labels.to_vec(), states, StateId(0));
    for p in 0..states {
        let p = StateId::from(p);
        a.set_final(p, rng.gen_bool(0.5));
        for l in 0..a.labels().len() {
            a.set(p, l, StateId::from(rng.gen_range(0..states)));
        }
    }
    a
}

/// `count` distinct labels `(σ, ∅)` or `(σ, {X})` over lowercase letters.
pub fn labels(count: usize) -> Vec<ULabel> {
    let x = OutputSet::singleton(OutputSymbol::new("X").expect("identifier"));
    (0..count)
        .map(|i| {
            let sigma = InputSymbol((b'a' + (i / 2) as u8) as char);
            let out = if i % 2 == 0 {
                OutputSet::new()
            } else {
                x.clone()
            };
            (sigma, out)
        })
        .collect()
}

/// Adds a copy of state `p` (same outgoing row) and redirects a random,
/// non-empty subset of the transitions entering `p` to the copy. The result
/// has the same behaviour as `m` and one more state.
pub fn duplicate_state<R: Rng + ?Sized>(rng: &mut R, m: &Mealy, p: StateId) -> Mealy {
    let sigma = m.input_alphabet().to_vec();
    let mut out = Mealy::new(
        sigma.iter().copied().collect(),
        m.output_alphabet().clone(),
        m.state_count() + 1,
        m.initial(),
    )
    .expect("initial in range");
    let copy = StateId::from(m.state_count());
    let incoming: Vec<(StateId, InputSymbol)> = m
        .transitions()
        .filter(|(_, _, t)| t.target == p)
        .map(|(q, s, _)| (q, s))
        .collect();
    let forced = (!incoming.is_empty()).then(|| rng.gen_range(0..incoming.len()));
    let mut redirect = Vec::new();
    for (i, key) in incoming.into_iter().enumerate() {
        if Some(i) == forced || rng.gen_bool(0.5) {
            redirect.push(key);
        }
    }
    for (q, s, t) in m.transitions() {
        let target = if redirect.contains(&(q, s)) {
            copy
        } else {
            t.target
        };
        out.set(q, s, target, t.output.clone()).expect("valid");
        if q == p {
            let target = if redirect.contains(&(copy, s)) {
                copy
            } else {
                t.target
            };
            out.set(copy, s, target, t.output.clone()).expect("valid");
        }
    }
    out
}
