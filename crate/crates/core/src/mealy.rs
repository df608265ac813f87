//! Deterministic transducers whose transitions emit sets of output symbols.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::behaviour::BehaviourTable;
use crate::fst::{Fst, FstTransition};
use crate::symbol::{InputSymbol, OutputSet, OutputSymbol, StateId, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub target: StateId,
    pub output: OutputSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MealyError {
    #[error("state {0} out of range")]
    StateOutOfRange(StateId),
    #[error("input symbol {0:?} missing from the input alphabet")]
    InputNotInAlphabet(char),
    #[error("output symbol {0} missing from the output alphabet")]
    OutputNotInAlphabet(String),
    #[error("state {state} already has a transition on {symbol:?}")]
    Nondeterministic { state: StateId, symbol: char },
}

const NO_COLUMN: u16 = u16::MAX;

/// A Mealy machine `(Q, Σ, Λ, i, T, G)` with `T` and `G` stored together in
/// one dense `(state, symbol)` table. Missing entries make the machine
/// partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mealy {
    inputs: Vec<InputSymbol>,
    outputs: BTreeSet<OutputSymbol>,
    states: usize,
    initial: StateId,
    table: Vec<Option<Transition>>,
    ascii_columns: Box<[u16; 128]>,
    provenance: Option<Vec<Vec<StateId>>>,
}

impl Mealy {
    /// A machine with `states` states and no transitions.
    pub fn new(
        inputs: BTreeSet<InputSymbol>,
        outputs: BTreeSet<OutputSymbol>,
        states: usize,
        initial: StateId,
    ) -> Result<Mealy, MealyError> {
        if initial.index() >= states {
            return Err(MealyError::StateOutOfRange(initial));
        }
        let inputs: Vec<InputSymbol> = inputs.into_iter().collect();
        let mut ascii_columns = Box::new([NO_COLUMN; 128]);
        for (col, s) in inputs.iter().enumerate() {
            if s.0.is_ascii() {
                ascii_columns[s.0 as usize] = col as u16;
            }
        }
        Ok(Mealy {
            table: vec![None; states * inputs.len()],
            inputs,
            outputs,
            states,
            initial,
            ascii_columns,
            provenance: None,
        })
    }

    /// Adds `state --symbol/output--> target`.
    pub fn set(
        &mut self,
        state: StateId,
        symbol: InputSymbol,
        target: StateId,
        output: OutputSet,
    ) -> Result<(), MealyError> {
        for s in [state, target] {
            if s.index() >= self.states {
                return Err(MealyError::StateOutOfRange(s));
            }
        }
        if let Some(o) = output.iter().find(|o| !self.outputs.contains(*o)) {
            return Err(MealyError::OutputNotInAlphabet(o.to_string()));
        }
        let col = self
            .column(symbol)
            .ok_or(MealyError::InputNotInAlphabet(symbol.0))?;
        let slot = &mut self.table[state.index() * self.inputs.len() + col];
        if slot.is_some() {
            return Err(MealyError::Nondeterministic {
                state,
                symbol: symbol.0,
            });
        }
        *slot = Some(Transition { target, output });
        Ok(())
    }

    /// Appends a state with no transitions and returns its id.
    pub fn add_state(&mut self) -> StateId {
        let id = StateId::from(self.states);
        self.states += 1;
        self.table.extend((0..self.inputs.len()).map(|_| None));
        if let Some(p) = &mut self.provenance {
            p.push(Vec::new());
        }
        id
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    /// Σ in ascending order; column indices refer to this order.
    pub fn input_alphabet(&self) -> &[InputSymbol] {
        &self.inputs
    }

    pub fn output_alphabet(&self) -> &BTreeSet<OutputSymbol> {
        &self.outputs
    }

    #[inline]
    pub fn column(&self, symbol: InputSymbol) -> Option<usize> {
        let c = symbol.0;
        if c.is_ascii() {
            let col = self.ascii_columns[c as usize];
            (col != NO_COLUMN).then_some(col as usize)
        } else {
            self.inputs.binary_search(&symbol).ok()
        }
    }

    #[inline]
    pub fn transition_at(&self, state: StateId, column: usize) -> Option<&Transition> {
        self.table[state.index() * self.inputs.len() + column].as_ref()
    }

    pub fn transition(&self, state: StateId, symbol: InputSymbol) -> Option<&Transition> {
        let col = self.column(symbol)?;
        self.transition_at(state, col)
    }

    /// Every defined transition as `(from, symbol, transition)`, ordered by
    /// state then symbol.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, InputSymbol, &Transition)> {
        let width = self.inputs.len();
        self.table.iter().enumerate().filter_map(move |(idx, t)| {
            t.as_ref()
                .map(|t| (StateId::from(idx / width), self.inputs[idx % width], t))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.table.iter().filter(|t| t.is_some()).count()
    }

    /// True iff every state has a transition on every input symbol.
    pub fn is_complete(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    /// Transducer states each Mealy state was built from, if recorded.
    pub fn provenance(&self) -> Option<&[Vec<StateId>]> {
        self.provenance.as_deref()
    }

    pub fn with_provenance(mut self, provenance: Vec<Vec<StateId>>) -> Mealy {
        assert_eq!(provenance.len(), self.states, "one subset per state");
        self.provenance = Some(provenance);
        self
    }

    pub fn without_provenance(mut self) -> Mealy {
        self.provenance = None;
        self
    }

    /// Outputs produced after every word of at most `max_len` symbols.
    /// Undefined transitions end the walk.
    pub fn output(&self, max_len: usize) -> BehaviourTable {
        let mut table = BehaviourTable::new(max_len);
        let mut word = Vec::with_capacity(max_len);
        self.walk(self.initial, max_len, &mut word, &mut table);
        table
    }

    fn walk(
        &self,
        state: StateId,
        budget: usize,
        word: &mut Vec<InputSymbol>,
        table: &mut BehaviourTable,
    ) {
        if budget == 0 {
            return;
        }
        for (col, &sym) in self.inputs.iter().enumerate() {
            let Some(t) = self.transition_at(state, col) else {
                continue;
            };
            word.push(sym);
            table.extend(Word(word.clone()), &t.output);
            self.walk(t.target, budget - 1, word, table);
            word.pop();
        }
    }

    /// Renumbers states in breadth-first order from the initial state,
    /// visiting symbols in ascending order. Unreachable states are dropped.
    pub fn renumbered(&self) -> Mealy {
        let mut order = vec![None; self.states];
        let mut queue = VecDeque::from([self.initial]);
        let mut visited = Vec::new();
        order[self.initial.index()] = Some(StateId(0));
        while let Some(p) = queue.pop_front() {
            visited.push(p);
            for col in 0..self.inputs.len() {
                if let Some(t) = self.transition_at(p, col) {
                    if order[t.target.index()].is_none() {
                        order[t.target.index()] = Some(StateId::from(visited.len() + queue.len()));
                        queue.push_back(t.target);
                    }
                }
            }
        }
        let mut out = Mealy::new(
            self.inputs.iter().copied().collect(),
            self.outputs.clone(),
            visited.len(),
            StateId(0),
        )
        .expect("non-empty");
        for &p in &visited {
            let from = order[p.index()].expect("visited");
            for (col, &sym) in self.inputs.iter().enumerate() {
                if let Some(t) = self.transition_at(p, col) {
                    let to = order[t.target.index()].expect("reachable");
                    out.set(from, sym, to, t.output.clone()).expect("valid");
                }
            }
        }
        if let Some(prov) = &self.provenance {
            out.provenance = Some(visited.iter().map(|p| prov[p.index()].clone()).collect());
        }
        out
    }
}

/// Free-function form of [`Mealy::output`].
pub fn machine_output(m: &Mealy, max_len: usize) -> BehaviourTable {
    m.output(max_len)
}

/// Views a Mealy machine as a transducer: a transition emitting `{γ1, γ2}`
/// becomes one transition per symbol, and a silent transition keeps ε output.
impl From<&Mealy> for Fst {
    fn from(m: &Mealy) -> Fst {
        let mut transitions = Vec::new();
        for (from, sym, t) in m.transitions() {
            if t.output.is_empty() {
                transitions.push(FstTransition {
                    from,
                    input: Some(sym),
                    output: None,
                    to: t.target,
                });
            }
            for o in t.output.iter() {
                transitions.push(FstTransition {
                    from,
                    input: Some(sym),
                    output: Some(o.clone()),
                    to: t.target,
                });
            }
        }
        Fst::new(
            m.state_count(),
            m.input_alphabet().iter().copied().collect(),
            m.output_alphabet().clone(),
            transitions,
            BTreeSet::from([m.initial()]),
            BTreeSet::new(),
        )
        .expect("a valid Mealy machine is a valid transducer")
    }
}
