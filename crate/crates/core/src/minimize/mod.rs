//! Minimization of Mealy machines through the DFA over input/output pairs.
//!
//! A Mealy machine is read as an automaton over `U = Σ × (Λ ∪ {ε})`, where
//! `Λ` holds the non-empty output sets that occur on its transitions. Two
//! states produce the same outputs on every input iff they accept the same
//! `U`-language once every state is final, so language minimization of that
//! automaton minimizes the machine.

mod dfa;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

pub use dfa::{hopcroft_partition, minimize_dfa, moore_partition, DfaView, Partition, ULabel};

use crate::mealy::Mealy;
use crate::symbol::{OutputSet, StateId};

/// Adds a silent absorbing state and routes every missing transition to it.
/// A complete machine is returned unchanged.
pub fn complete_with_sink(m: &Mealy) -> Mealy {
    if m.is_complete() {
        return m.clone();
    }
    let mut out = m.clone();
    let sink = out.add_state();
    let sigma = m.input_alphabet().to_vec();
    for p in 0..out.state_count() {
        let p = StateId::from(p);
        for (col, &sym) in sigma.iter().enumerate() {
            if out.transition_at(p, col).is_none() {
                out.set(p, sym, sink, OutputSet::new()).expect("valid");
            }
        }
    }
    out
}

/// The DFA view of `m` with every state final. The label alphabet is the
/// full product of Σ with the occurring non-empty output sets plus ε.
pub fn to_dfa_view(m: &Mealy) -> DfaView {
    let lambda: BTreeSet<OutputSet> = m
        .transitions()
        .filter(|(_, _, t)| !t.output.is_empty())
        .map(|(_, _, t)| t.output.clone())
        .collect();
    let mut labels = Vec::new();
    for &sigma in m.input_alphabet() {
        labels.push((sigma, OutputSet::new()));
        for set in &lambda {
            labels.push((sigma, set.clone()));
        }
    }
    let mut a = DfaView::new(labels, m.state_count(), m.initial());
    for p in 0..m.state_count() {
        a.set_final(StateId::from(p), true);
    }
    for (from, sym, t) in m.transitions() {
        let l = a
            .label_index(&(sym, t.output.clone()))
            .expect("label present");
        a.set(from, l, t.target);
    }
    a
}

/// The minimal complete Mealy machine with the same outputting behaviour as
/// `m`, numbered breadth-first from the initial state.
pub fn min_comp(m: &Mealy) -> Mealy {
    let completed = complete_with_sink(m);
    let view = to_dfa_view(&completed);
    let (view, _) = view.complete_with_dead();
    let minimal = minimize_dfa(&view);

    // The rejecting block, if any, is exactly the added dead state's class:
    // every original state is final and finality is preserved.
    let dead: Option<StateId> = (0..minimal.state_count())
        .map(StateId::from)
        .find(|&p| !minimal.is_final(p));

    let mut out = Mealy::new(
        m.input_alphabet().iter().copied().collect(),
        m.output_alphabet().clone(),
        minimal.state_count(),
        minimal.initial(),
    )
    .expect("initial in range");
    for p in (0..minimal.state_count()).map(StateId::from) {
        if Some(p) == dead {
            continue;
        }
        for (l, (sigma, set)) in minimal.labels().iter().enumerate() {
            let q = minimal.next(p, l).expect("complete");
            if Some(q) != dead {
                out.set(p, *sigma, q, set.clone()).expect("deterministic");
            }
        }
    }
    // Dropping the dead block leaves it unreachable; renumbering removes it.
    let out = out.renumbered().without_provenance();
    debug_assert!(out.is_complete());
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrimError {
    /// Every state can still reach an outputting transition.
    #[error("machine has no silent sink state")]
    NoSink,
    /// The initial state never leads to any output; trimming would leave
    /// nothing.
    #[error("the initial state is a silent sink")]
    InitialIsSink,
}

/// Removes the silent part of a machine: transitions that emit nothing and
/// lead to a state from which no output is reachable, together with those
/// states' own transitions. A sink state stays only where an outputting
/// transition still enters it. Behaviour is unchanged; the result is partial.
pub fn trim_sink(m: &Mealy) -> Result<Mealy, TrimError> {
    let n = m.state_count();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut live = vec![false; n];
    let mut queue = VecDeque::new();
    for (from, _, t) in m.transitions() {
        preds[t.target.index()].push(from);
        if !t.output.is_empty() && !live[from.index()] {
            live[from.index()] = true;
            queue.push_back(from);
        }
    }
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q.index()] {
            if !live[p.index()] {
                live[p.index()] = true;
                queue.push_back(p);
            }
        }
    }
    if live.iter().all(|&l| l) {
        return Err(TrimError::NoSink);
    }
    if !live[m.initial().index()] {
        return Err(TrimError::InitialIsSink);
    }

    let mut out = Mealy::new(
        m.input_alphabet().iter().copied().collect(),
        m.output_alphabet().clone(),
        n,
        m.initial(),
    )
    .expect("initial in range");
    for (from, sym, t) in m.transitions() {
        let silent_into_dead = !live[t.target.index()] && t.output.is_empty();
        if live[from.index()] && !silent_into_dead {
            out.set(from, sym, t.target, t.output.clone())
                .expect("valid");
        }
    }
    let out = match m.provenance() {
        Some(p) => out.with_provenance(p.to_vec()),
        None => out,
    };
    Ok(out.renumbered())
}

/// True iff the machines are equal up to a renaming of states that maps
/// initial to initial and preserves every `(input, output set, target)`
/// entry. Declared output alphabets are not compared.
pub fn is_isomorphic(a: &Mealy, b: &Mealy) -> bool {
    if a.input_alphabet() != b.input_alphabet()
        || a.state_count() != b.state_count()
        || a.transition_count() != b.transition_count()
    {
        return false;
    }
    let n = a.state_count();
    let mut ab = vec![None; n];
    let mut ba = vec![None; n];
    if !pair(a, b, a.initial(), b.initial(), &mut ab, &mut ba) {
        return false;
    }
    extend_unreached(a, b, ab, ba)
}

fn extend_unreached(
    a: &Mealy,
    b: &Mealy,
    ab: Vec<Option<StateId>>,
    ba: Vec<Option<StateId>>,
) -> bool {
    let Some(p) = ab.iter().position(Option::is_none) else {
        return true;
    };
    for q in (0..ba.len()).filter(|&q| ba[q].is_none()) {
        let (mut ab2, mut ba2) = (ab.clone(), ba.clone());
        if pair(a, b, StateId::from(p), StateId::from(q), &mut ab2, &mut ba2)
            && extend_unreached(a, b, ab2, ba2)
        {
            return true;
        }
    }
    false
}

/// Maps `p ↦ q` and propagates along transitions. False on any conflict.
fn pair(
    a: &Mealy,
    b: &Mealy,
    p: StateId,
    q: StateId,
    ab: &mut [Option<StateId>],
    ba: &mut [Option<StateId>],
) -> bool {
    ab[p.index()] = Some(q);
    ba[q.index()] = Some(p);
    let mut stack = vec![(p, q)];
    while let Some((p, q)) = stack.pop() {
        for col in 0..a.input_alphabet().len() {
            match (a.transition_at(p, col), b.transition_at(q, col)) {
                (None, None) => {}
                (Some(s), Some(t)) => {
                    if s.output != t.output {
                        return false;
                    }
                    match (ab[s.target.index()], ba[t.target.index()]) {
                        (Some(x), _) if x == t.target => {}
                        (None, None) => {
                            ab[s.target.index()] = Some(t.target);
                            ba[t.target.index()] = Some(s.target);
                            stack.push((s.target, t.target));
                        }
                        _ => return false,
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::{subset_t, subset_tc};
    use crate::fst::thompson;
    use crate::regexp::{behaviour_of, parse};
    use crate::symbol::{InputSymbol, OutputSymbol};

    const E3: &str = "a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>";

    fn compile(text: &str, restart: bool) -> Mealy {
        let fst = thompson(&parse(text).unwrap());
        if restart {
            subset_tc(&fst).unwrap()
        } else {
            subset_t(&fst).unwrap()
        }
    }

    #[test]
    fn three_cycle_is_one_state() {
        let mut m = Mealy::new(
            BTreeSet::from([InputSymbol('a')]),
            BTreeSet::new(),
            3,
            StateId(0),
        )
        .unwrap();
        for p in 0..3 {
            m.set(
                StateId::from(p),
                InputSymbol('a'),
                StateId::from((p + 1) % 3),
                OutputSet::new(),
            )
            .unwrap();
        }
        let min = min_comp(&m);
        assert_eq!(min.state_count(), 1);
        assert!(min.is_complete());
    }

    #[test]
    fn atom_completes_to_three_states() {
        let m = compile("a<A>", false);
        assert_eq!(m.state_count(), 2);
        let c = complete_with_sink(&m);
        assert_eq!(c.state_count(), 3);
        // the completed atom machine is already minimal: start, after-a, sink
        // coincide only for after-a and sink
        let min = min_comp(&m);
        assert_eq!(min.state_count(), 2);
        assert_eq!(min.output(3), m.output(3));
    }

    #[test]
    fn e3_exact_minimal_size() {
        let e = parse(E3).unwrap();
        let m = compile(E3, false);
        assert_eq!(complete_with_sink(&m).state_count(), 11);
        let min = min_comp(&m);
        assert_eq!(min.state_count(), 8);
        assert!(min.is_complete());
        assert_eq!(min.output(6), behaviour_of(&e, 6));
    }

    #[test]
    fn e3_trimmed_keeps_end_state() {
        let min = min_comp(&compile(E3, false));
        let trimmed = trim_sink(&min).unwrap();
        assert_eq!(trimmed.state_count(), 8);
        assert!(!trimmed.is_complete());
        assert_eq!(trimmed.output(7), min.output(7));
        let silent: Vec<StateId> = (0..8)
            .map(StateId::from)
            .filter(|&p| (0..4).all(|c| trimmed.transition_at(p, c).is_none()))
            .collect();
        assert_eq!(silent.len(), 1);
    }

    #[test]
    fn e3_complete_matching_size() {
        let min = min_comp(&compile(E3, true));
        assert_eq!(min.state_count(), 9);
        assert_eq!(trim_sink(&min), Err(TrimError::NoSink));
    }

    #[test]
    fn trim_rejects_silent_initial() {
        let m = compile("a", false);
        assert_eq!(trim_sink(&min_comp(&m)), Err(TrimError::InitialIsSink));
    }

    #[test]
    fn idempotent() {
        for text in [E3, "a<A>", "(ab)*c<X>|b+c<Y>", "a*"] {
            for restart in [false, true] {
                let once = min_comp(&compile(text, restart));
                let twice = min_comp(&once);
                assert_eq!(once, twice, "{text}");
            }
        }
    }

    #[test]
    fn hopcroft_matches_moore() {
        for text in [E3, "(a|b)*a<X>(a|b)", "a(b|c)*d<A>|ab+d<B>"] {
            for restart in [false, true] {
                let m = complete_with_sink(&compile(text, restart));
                let (view, _) = to_dfa_view(&m).complete_with_dead();
                assert_eq!(hopcroft_partition(&view), moore_partition(&view), "{text}");
            }
        }
    }

    #[test]
    fn isomorphism_up_to_renaming() {
        let m = min_comp(&compile(E3, true));
        assert!(is_isomorphic(&m, &m));
        // swap states 1 and 2 by rebuilding with a permutation
        let perm = |p: StateId| match p.0 {
            1 => StateId(2),
            2 => StateId(1),
            _ => p,
        };
        let mut swapped = Mealy::new(
            m.input_alphabet().iter().copied().collect(),
            m.output_alphabet().clone(),
            m.state_count(),
            perm(m.initial()),
        )
        .unwrap();
        for (from, sym, t) in m.transitions() {
            swapped
                .set(perm(from), sym, perm(t.target), t.output.clone())
                .unwrap();
        }
        assert_ne!(swapped, m);
        assert!(is_isomorphic(&m, &swapped));
        let other = min_comp(&compile(E3, false));
        assert!(!is_isomorphic(&m, &other));
    }

    #[test]
    fn unreachable_components_are_matched() {
        let build = |loop_out: &str| {
            let mut m = Mealy::new(
                BTreeSet::from([InputSymbol('a')]),
                BTreeSet::from([
                    OutputSymbol::new("X").unwrap(),
                    OutputSymbol::new("Y").unwrap(),
                ]),
                3,
                StateId(0),
            )
            .unwrap();
            m.set(StateId(0), InputSymbol('a'), StateId(0), OutputSet::new())
                .unwrap();
            m.set(StateId(1), InputSymbol('a'), StateId(2), OutputSet::new())
                .unwrap();
            let out = OutputSet::singleton(OutputSymbol::new(loop_out).unwrap());
            m.set(StateId(2), InputSymbol('a'), StateId(1), out)
                .unwrap();
            m
        };
        assert!(is_isomorphic(&build("X"), &build("X")));
        assert!(!is_isomorphic(&build("X"), &build("Y")));
    }
}
