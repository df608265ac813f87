//! Oracle comparisons shared by the CLI, the property suites and the
//! acceptance runner.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::Rng;

use crate::determinize::{subset_t, subset_tc, DeterminizeError};
use crate::fst::thompson;
use crate::mealy::Mealy;
use crate::minimize::{min_comp, DfaView};
use crate::regexp::{behaviour_of, complete_oracle, Expr};
use crate::runtime::Session;
use crate::sample::random_word_of_len;
use crate::symbol::{InputSymbol, OutputSet, StateId, Word};

/// First disagreement found between a construction and an oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// Exact matching: outputs after reading `word`.
    Behaviour {
        stage: &'static str,
        word: Word,
        expected: OutputSet,
        actual: OutputSet,
    },
    /// Complete matching: outputs at `position` (1-based) of `word`.
    Events {
        word: Word,
        position: usize,
        expected: OutputSet,
        actual: OutputSet,
    },
    /// The machine could not consume `word`.
    Rejected { word: Word, reason: String },
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::Behaviour {
                stage,
                word,
                expected,
                actual,
            } => write!(f, "{stage}: after {word} expected {expected}, machine gives {actual}"),
            Counterexample::Events {
                word,
                position,
                expected,
                actual,
            } => write!(
                f,
                "complete matching on {word}: at position {position} expected {expected}, machine gives {actual}"
            ),
            Counterexample::Rejected { word, reason } => write!(f, "machine rejected {word}: {reason}"),
        }
    }
}

/// Outputs emitted at each position while running `m` over `word`.
pub fn emissions(m: &Mealy, word: &Word) -> Result<Vec<OutputSet>, Counterexample> {
    let mut session = Session::start(m);
    let mut out = vec![OutputSet::new(); word.len()];
    for &s in word.symbols() {
        match session.step(s) {
            Ok(Some(event)) => out[event.position as usize - 1] = event.outputs,
            Ok(None) => {}
            Err(e) => {
                return Err(Counterexample::Rejected {
                    word: word.clone(),
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Exact matching: the transducer, `subset_t` and `min_comp` all reproduce
/// `behaviour_of(e)` on words up to `max_len`.
pub fn check_exact(e: &Expr, max_len: usize) -> Result<(), Counterexample> {
    let expected = behaviour_of(e, max_len);
    let fst = thompson(e);
    let det = subset_t(&fst).expect("pattern regexps never emit before input");
    let min = min_comp(&det);
    let stages: [(&'static str, crate::BehaviourTable); 3] = [
        ("thompson", fst.output(max_len)),
        ("subset_t", det.output(max_len)),
        ("min_comp", min.output(max_len)),
    ];
    for (stage, actual) in stages {
        if let Some(m) = expected.first_mismatch(&actual) {
            return Err(Counterexample::Behaviour {
                stage,
                word: m.word,
                expected: m.left,
                actual: m.right,
            });
        }
    }
    Ok(())
}

/// The minimal complete-matching machine for `e`.
pub fn complete_machine(e: &Expr) -> Result<Mealy, DeterminizeError> {
    Ok(min_comp(&subset_tc(&thompson(e))?))
}

/// Complete matching on one word: `m`'s emissions equal `complete_oracle`
/// position by position.
pub fn check_complete_word(e: &Expr, m: &Mealy, word: &Word) -> Result<(), Counterexample> {
    let expected = complete_oracle(e, word).map_err(|err| Counterexample::Rejected {
        word: word.clone(),
        reason: err.to_string(),
    })?;
    let actual = emissions(m, word)?;
    for (i, (x, y)) in expected.into_iter().zip(actual).enumerate() {
        if x != y {
            return Err(Counterexample::Events {
                word: word.clone(),
                position: i + 1,
                expected: x,
                actual: y,
            });
        }
    }
    Ok(())
}

/// All words of exactly `len` symbols over `alphabet`, in lexicographic
/// order. Every shorter word is a prefix of one of them. Over an empty
/// alphabet this is just the empty word.
pub fn words_of_len(alphabet: &[InputSymbol], len: usize) -> Vec<Word> {
    if alphabet.is_empty() {
        return vec![Word::empty()];
    }
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    words.into_iter().map(Word).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub exact_words: usize,
    pub complete_words: usize,
    pub random_words: usize,
}

/// Everything `oracle-check` runs: exact matching up to `max_len`, complete
/// matching on every word of length `max_len`, then `random` words longer
/// than `max_len` (up to four times as long).
pub fn oracle_check<R: Rng + ?Sized>(
    e: &Expr,
    max_len: usize,
    random: usize,
    rng: &mut R,
) -> Result<OracleReport, Counterexample> {
    check_exact(e, max_len)?;
    let m = complete_machine(e).expect("pattern regexps never emit before input");
    let sigma: Vec<InputSymbol> = e.input_alphabet().into_iter().collect();
    let all = words_of_len(&sigma, max_len);
    for w in &all {
        check_complete_word(e, &m, w)?;
    }
    for _ in 0..random {
        let len = rng.gen_range(max_len + 1..=4 * max_len.max(1) + 1);
        check_complete_word(e, &m, &random_word_of_len(rng, &sigma, len))?;
    }
    Ok(OracleReport {
        exact_words: behaviour_of(e, max_len).len(),
        complete_words: all.len(),
        random_words: random,
    })
}

/// A shortest word of at most `max_len` symbols on which states `p` and `q`
/// emit differently at some position (a missing transition counts as a
/// difference from a present one).
pub fn distinguishing_word(m: &Mealy, p: StateId, q: StateId, max_len: usize) -> Option<Word> {
    let mut seen = HashSet::from([(p, q)]);
    let mut queue = VecDeque::from([((p, q), Vec::new())]);
    while let Some(((a, b), word)) = queue.pop_front() {
        if word.len() == max_len {
            continue;
        }
        for (col, &s) in m.input_alphabet().iter().enumerate() {
            let mut next = word.clone();
            next.push(s);
            match (m.transition_at(a, col), m.transition_at(b, col)) {
                (None, None) => {}
                (Some(x), Some(y)) if x.output == y.output => {
                    let pair = (x.target, y.target);
                    if seen.insert(pair) {
                        queue.push_back((pair, next));
                    }
                }
                _ => return Some(Word(next)),
            }
        }
    }
    None
}

/// Some pair of distinct states with no distinguishing word shorter than the
/// state count, if any.
pub fn indistinguishable_pair(m: &Mealy) -> Option<(StateId, StateId)> {
    let n = m.state_count();
    let bound = n.saturating_sub(1);
    for p in 0..n {
        for q in p + 1..n {
            let (p, q) = (StateId::from(p), StateId::from(q));
            if distinguishing_word(m, p, q, bound).is_none() {
                return Some((p, q));
            }
        }
    }
    None
}

/// Language equivalence of two DFAs over the same labels: search the
/// product for a reachable pair that disagrees on acceptance. Missing
/// transitions lead to an implicit rejecting state.
pub fn dfa_equivalent(a: &DfaView, b: &DfaView) -> bool {
    assert_eq!(a.labels(), b.labels(), "DFAs over different alphabets");
    let k = a.labels().len();
    let start = (Some(a.initial()), Some(b.initial()));
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let fin = |d: &DfaView, s: Option<StateId>| s.is_some_and(|s| d.is_final(s));
    while let Some((x, y)) = queue.pop_front() {
        if fin(a, x) != fin(b, y) {
            return false;
        }
        for l in 0..k {
            let next = (x.and_then(|s| a.next(s, l)), y.and_then(|s| b.next(s, l)));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    true
}

/// True iff no two distinct states of `a` accept the same language.
pub fn dfa_is_reduced(a: &DfaView) -> bool {
    let n = a.state_count();
    (0..n).all(|p| {
        (p + 1..n).all(|q| {
            let mut x = a.clone();
            let mut y = a.clone();
            x.set_initial(StateId::from(p));
            y.set_initial(StateId::from(q));
            !dfa_equivalent(&x, &y)
        })
    })
}
