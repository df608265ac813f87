//! Subset constructions from transducers to Mealy machines.
//!
//! [`subset_t`] yields a machine with the same outputting behaviour as the
//! transducer (exact matching). [`subset_tc`] adds the initial closure to every
//! constructed subset, which restarts the pattern before each symbol and
//! yields a complete machine reporting the matches of every suffix.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::fst::Fst;
use crate::mealy::Mealy;
use crate::symbol::{InputSymbol, OutputSet, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeterminizeError {
    /// The transducer emits `outputs` before reading any input; no Mealy
    /// machine can do that.
    #[error("transducer emits {outputs} before reading input")]
    OutputBeforeInput { outputs: OutputSet },
}

/// Exact-matching determinization.
pub fn subset_t(m: &Fst) -> Result<Mealy, DeterminizeError> {
    determinize(m, false)
}

/// Complete-matching determinization: `T'(S, σ) = ε(move(S, σ)) ∪ ε(I)`.
pub fn subset_tc(m: &Fst) -> Result<Mealy, DeterminizeError> {
    determinize(m, true)
}

fn determinize(m: &Fst, restart: bool) -> Result<Mealy, DeterminizeError> {
    let initial = m.eps_closure(m.initials());
    let early = m.eps_outputs(&initial);
    if !early.is_empty() {
        return Err(DeterminizeError::OutputBeforeInput { outputs: early });
    }

    // Subsets are hash-consed as sorted id vectors; ids are assigned in FIFO
    // order so numbering is breadth-first from the initial subset.
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets: Vec<Vec<StateId>> = Vec::new();
    let mut rows: Vec<Vec<(InputSymbol, StateId, OutputSet)>> = Vec::new();
    let mut queue = VecDeque::new();

    let intern = |set: Vec<StateId>,
                  ids: &mut HashMap<Vec<StateId>, StateId>,
                  subsets: &mut Vec<Vec<StateId>>,
                  queue: &mut VecDeque<StateId>| {
        *ids.entry(set.clone()).or_insert_with(|| {
            let id = StateId::from(subsets.len());
            subsets.push(set);
            queue.push_back(id);
            id
        })
    };

    let initial_vec: Vec<StateId> = initial.iter().copied().collect();
    intern(initial_vec, &mut ids, &mut subsets, &mut queue);

    while let Some(current) = queue.pop_front() {
        let subset = subsets[current.index()].clone();
        // move(S, σ) and G_σ(S), grouped by σ
        let mut moves: BTreeMap<InputSymbol, (BTreeSet<StateId>, OutputSet)> = BTreeMap::new();
        for &p in &subset {
            for t in m.transitions_from(p) {
                let Some(sigma) = t.input else { continue };
                let entry = moves.entry(sigma).or_default();
                entry.0.insert(t.to);
                if let Some(o) = &t.output {
                    entry.1.insert(o.clone());
                }
            }
        }
        if restart {
            for &sigma in m.input_alphabet() {
                moves.entry(sigma).or_default();
            }
        }
        let mut row = Vec::with_capacity(moves.len());
        for (sigma, (reached, mut output)) in moves {
            let mut target = m.eps_closure(&reached);
            if restart {
                target.extend(initial.iter().copied());
            }
            if target.is_empty() {
                continue;
            }
            output.extend_from(&m.eps_outputs(&target));
            let target_vec: Vec<StateId> = target.into_iter().collect();
            let id = intern(target_vec, &mut ids, &mut subsets, &mut queue);
            row.push((sigma, id, output));
        }
        debug_assert_eq!(rows.len(), current.index());
        rows.push(row);
    }

    let mut mealy = Mealy::new(
        m.input_alphabet().clone(),
        m.output_alphabet().clone(),
        subsets.len(),
        StateId(0),
    )
    .expect("initial subset exists");
    for (from, row) in rows.into_iter().enumerate() {
        for (sigma, to, output) in row {
            mealy
                .set(StateId::from(from), sigma, to, output)
                .expect("one transition per (subset, symbol)");
        }
    }
    Ok(mealy.with_provenance(subsets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{thompson, FstTransition};
    use crate::regexp::{behaviour_of, parse};
    use crate::symbol::{OutputSymbol, Word};

    const E3: &str = "a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>";

    #[test]
    fn atom_machine() {
        let m = subset_t(&thompson(&parse("a<A>").unwrap())).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.transition_count(), 1);
        let t = m.transition(m.initial(), InputSymbol('a')).unwrap();
        assert_eq!(t.output.joined(), "A");
        assert_ne!(t.target, m.initial());
    }

    #[test]
    fn e3_exact_has_ten_states() {
        let e = parse(E3).unwrap();
        let m = subset_t(&thompson(&e)).unwrap();
        assert_eq!(m.state_count(), 10);
        assert_eq!(m.output(4), behaviour_of(&e, 4));
    }

    #[test]
    fn restart_machine_is_complete_and_keeps_initial() {
        let fst = thompson(&parse(E3).unwrap());
        let m = subset_tc(&fst).unwrap();
        assert!(m.is_complete());
        let init: BTreeSet<StateId> = fst.eps_closure(fst.initials());
        for subset in m.provenance().unwrap() {
            assert!(init.iter().all(|s| subset.contains(s)));
        }
    }

    #[test]
    fn restart_emits_on_every_a() {
        let m = subset_tc(&thompson(&parse("a<A>").unwrap())).unwrap();
        let mut state = m.initial();
        for _ in 0..3 {
            let t = m.transition(state, InputSymbol('a')).unwrap();
            assert_eq!(t.output.joined(), "A");
            state = t.target;
        }
        assert_eq!(m.output(3).get(&Word::from("aaa")).unwrap().joined(), "A");
    }

    #[test]
    fn output_before_input_rejected() {
        let gamma = BTreeSet::from([OutputSymbol::new("X").unwrap()]);
        let fst = Fst::new(
            2,
            BTreeSet::from([InputSymbol('a')]),
            gamma,
            vec![
                FstTransition {
                    from: StateId(0),
                    input: None,
                    output: OutputSymbol::new("X"),
                    to: StateId(1),
                },
                FstTransition {
                    from: StateId(1),
                    input: Some(InputSymbol('a')),
                    output: None,
                    to: StateId(1),
                },
            ],
            BTreeSet::from([StateId(0)]),
            BTreeSet::new(),
        )
        .unwrap();
        assert!(matches!(
            subset_t(&fst),
            Err(DeterminizeError::OutputBeforeInput { .. })
        ));
        assert!(subset_tc(&fst).is_err());
    }

    #[test]
    fn epsilon_outputs_after_input_are_collected() {
        // 0 -a-> 1 -ε/X-> 2: reading `a` emits X through the trailing ε-transition.
        let gamma = BTreeSet::from([OutputSymbol::new("X").unwrap()]);
        let fst = Fst::new(
            3,
            BTreeSet::from([InputSymbol('a')]),
            gamma,
            vec![
                FstTransition {
                    from: StateId(0),
                    input: Some(InputSymbol('a')),
                    output: None,
                    to: StateId(1),
                },
                FstTransition {
                    from: StateId(1),
                    input: None,
                    output: OutputSymbol::new("X"),
                    to: StateId(2),
                },
            ],
            BTreeSet::from([StateId(0)]),
            BTreeSet::new(),
        )
        .unwrap();
        let m = subset_t(&fst).unwrap();
        assert_eq!(m.output(2), fst.output(2));
        assert_eq!(m.output(2).to_strings(), vec![("a".into(), "X".into())]);
    }
}
