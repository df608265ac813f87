//! Nondeterministic finite-state transducers and the Thompson construction
//! from pattern regexps.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::behaviour::BehaviourTable;
use crate::regexp::Expr;
use crate::symbol::{InputSymbol, OutputSet, OutputSymbol, StateId, Word};

/// One transition `from --input/output--> to`; `None` stands for ε on either tape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FstTransition {
    pub from: StateId,
    pub input: Option<InputSymbol>,
    pub output: Option<OutputSymbol>,
    pub to: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FstError {
    #[error("transducer has no initial state")]
    NoInitial,
    #[error("state {0} out of range")]
    StateOutOfRange(StateId),
    #[error("input symbol {0:?} missing from the input alphabet")]
    InputNotInAlphabet(char),
    #[error("output symbol {0} missing from the output alphabet")]
    OutputNotInAlphabet(String),
}

/// A finite-state transducer `(Q, Σ, Γ, I, F, δ)`.
///
/// Final states are kept for completeness and for DOT rendering; output
/// semantics never consult them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    state_count: usize,
    input_alphabet: BTreeSet<InputSymbol>,
    output_alphabet: BTreeSet<OutputSymbol>,
    transitions: Vec<FstTransition>,
    // transitions leaving each state, grouped by input (ε first)
    outgoing: Vec<Vec<usize>>,
    initials: BTreeSet<StateId>,
    finals: BTreeSet<StateId>,
}

impl Fst {
    pub fn new(
        state_count: usize,
        input_alphabet: BTreeSet<InputSymbol>,
        output_alphabet: BTreeSet<OutputSymbol>,
        mut transitions: Vec<FstTransition>,
        initials: BTreeSet<StateId>,
        finals: BTreeSet<StateId>,
    ) -> Result<Fst, FstError> {
        if initials.is_empty() {
            return Err(FstError::NoInitial);
        }
        let check = |s: StateId| {
            if s.index() < state_count {
                Ok(())
            } else {
                Err(FstError::StateOutOfRange(s))
            }
        };
        for &s in initials.iter().chain(finals.iter()) {
            check(s)?;
        }
        for t in &transitions {
            check(t.from)?;
            check(t.to)?;
            if let Some(i) = t.input {
                if !input_alphabet.contains(&i) {
                    return Err(FstError::InputNotInAlphabet(i.0));
                }
            }
            if let Some(o) = &t.output {
                if !output_alphabet.contains(o) {
                    return Err(FstError::OutputNotInAlphabet(o.to_string()));
                }
            }
        }
        transitions.sort();
        transitions.dedup();
        let mut outgoing = vec![Vec::new(); state_count];
        for (idx, t) in transitions.iter().enumerate() {
            outgoing[t.from.index()].push(idx);
        }
        Ok(Fst {
            state_count,
            input_alphabet,
            output_alphabet,
            transitions,
            outgoing,
            initials,
            finals,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn input_alphabet(&self) -> &BTreeSet<InputSymbol> {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &BTreeSet<OutputSymbol> {
        &self.output_alphabet
    }

    /// All transitions sorted by `(from, input, output, to)`.
    pub fn transitions(&self) -> &[FstTransition] {
        &self.transitions
    }

    pub fn initials(&self) -> &BTreeSet<StateId> {
        &self.initials
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn transitions_from(&self, p: StateId) -> impl Iterator<Item = &FstTransition> {
        self.outgoing[p.index()]
            .iter()
            .map(|&i| &self.transitions[i])
    }

    /// Transitions leaving `p` that read `input` (`None` for ε).
    pub fn transitions_on(
        &self,
        p: StateId,
        input: Option<InputSymbol>,
    ) -> impl Iterator<Item = &FstTransition> {
        self.transitions_from(p).filter(move |t| t.input == input)
    }

    /// Least superset of `seeds` closed under ε-input transitions.
    pub fn eps_closure(&self, seeds: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut closure = seeds.clone();
        let mut stack: Vec<StateId> = seeds.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for t in self.transitions_on(p, None) {
                if closure.insert(t.to) {
                    stack.push(t.to);
                }
            }
        }
        closure
    }

    /// Outputs of ε-input transitions between states of `set`.
    ///
    /// For an ε-closed `set` this is the output produced without reading input.
    pub fn eps_outputs(&self, set: &BTreeSet<StateId>) -> OutputSet {
        set.iter()
            .flat_map(|&p| self.transitions_on(p, None))
            .filter(|t| set.contains(&t.to))
            .filter_map(|t| t.output.clone())
            .collect()
    }

    /// Behaviour of state `p` on every word of at most `max_len` symbols,
    /// restricted to words that produce output.
    ///
    /// Explores paths directly: from every state of `ε(p)`, each transition
    /// by `σ` to `r` contributes its own output and the ε-output of `r` on the
    /// word `σ`, and the behaviour of `r` on longer words `σv`.
    pub fn state_behaviour(&self, p: StateId, max_len: usize) -> BehaviourTable {
        let mut memo = HashMap::new();
        let rel = self.explore(p, max_len, &mut memo);
        let mut table = BehaviourTable::new(max_len);
        for (w, set) in rel {
            table.extend(Word(w), &set);
        }
        table
    }

    fn explore(
        &self,
        p: StateId,
        budget: usize,
        memo: &mut HashMap<(StateId, usize), Vec<Emission>>,
    ) -> Vec<Emission> {
        if let Some(hit) = memo.get(&(p, budget)) {
            return hit.clone();
        }
        let closure = self.eps_closure(&BTreeSet::from([p]));
        let mut acc: HashMap<Vec<InputSymbol>, OutputSet> = HashMap::new();
        let here = self.eps_outputs(&closure);
        if !here.is_empty() {
            acc.insert(Vec::new(), here);
        }
        if budget > 0 {
            for &q in &closure {
                for t in self.transitions_from(q) {
                    let Some(sigma) = t.input else { continue };
                    let arrival = self.eps_closure(&BTreeSet::from([t.to]));
                    let mut now = self.eps_outputs(&arrival);
                    if let Some(o) = &t.output {
                        now.insert(o.clone());
                    }
                    if !now.is_empty() {
                        acc.entry(vec![sigma]).or_default().extend_from(&now);
                    }
                    for (v, set) in self.explore(t.to, budget - 1, memo) {
                        if v.is_empty() {
                            continue;
                        }
                        let mut w = Vec::with_capacity(v.len() + 1);
                        w.push(sigma);
                        w.extend(v);
                        acc.entry(w).or_default().extend_from(&set);
                    }
                }
            }
        }
        let mut out: Vec<_> = acc.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        out.sort();
        memo.insert((p, budget), out.clone());
        out
    }

    /// Union of the behaviours of the initial states.
    pub fn output(&self, max_len: usize) -> BehaviourTable {
        let mut table = BehaviourTable::new(max_len);
        for &i in &self.initials {
            table.union_with(&self.state_behaviour(i, max_len));
        }
        table
    }
}

/// Free-function form of [`Fst::eps_closure`].
pub fn eps_closure(m: &Fst, seeds: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    m.eps_closure(seeds)
}

/// Free-function form of [`Fst::state_behaviour`].
pub fn state_behaviour(m: &Fst, p: StateId, max_len: usize) -> BehaviourTable {
    m.state_behaviour(p, max_len)
}

/// Free-function form of [`Fst::output`].
pub fn fst_output(m: &Fst, max_len: usize) -> BehaviourTable {
    m.output(max_len)
}

/// A word read from a state and what is emitted on its last symbol.
type Emission = (Vec<InputSymbol>, OutputSet);

/// Thompson construction with output-carrying atoms.
///
/// Every node contributes at most two states. An atom `σ<γ>` becomes a single
/// transition reading `σ` and emitting `γ`; all glue transitions are ε/ε.
/// An alternation made only of atoms, such as `(b|c)`, is built as one
/// two-state gadget with a parallel transition per atom, the way a character
/// class would be. The result has exactly one initial and one final state.
///
/// An annotation only counts when its symbol ends a word of the language, so
/// an annotated transition keeps its output only if the final state is
/// ε-reachable from its target. In `a<Y>b<X>` the `a` transition is silent:
/// after reading `a` alone nothing has matched.
pub fn thompson(e: &Expr) -> Fst {
    let mut b = Builder::default();
    let (start, end) = b.build(e);

    // states whose ε-closure contains the final state
    let mut eps_preds: Vec<Vec<StateId>> = vec![Vec::new(); b.states];
    for t in b.transitions.iter().filter(|t| t.input.is_none()) {
        eps_preds[t.to.index()].push(t.from);
    }
    let mut can_end = vec![false; b.states];
    can_end[end.index()] = true;
    let mut stack = vec![end];
    while let Some(q) = stack.pop() {
        for &p in &eps_preds[q.index()] {
            if !can_end[p.index()] {
                can_end[p.index()] = true;
                stack.push(p);
            }
        }
    }
    for t in &mut b.transitions {
        if !can_end[t.to.index()] {
            t.output = None;
        }
    }

    Fst::new(
        b.states,
        e.input_alphabet(),
        e.output_alphabet(),
        b.transitions,
        BTreeSet::from([start]),
        BTreeSet::from([end]),
    )
    .expect("thompson construction produces a valid transducer")
}

#[derive(Default)]
struct Builder {
    states: usize,
    transitions: Vec<FstTransition>,
}

impl Builder {
    fn fresh(&mut self) -> StateId {
        let id = StateId::from(self.states);
        self.states += 1;
        id
    }

    fn eps(&mut self, from: StateId, to: StateId) {
        self.transitions.push(FstTransition {
            from,
            input: None,
            output: None,
            to,
        });
    }

    fn build(&mut self, e: &Expr) -> (StateId, StateId) {
        match e {
            Expr::Epsilon => {
                let (s, f) = (self.fresh(), self.fresh());
                self.eps(s, f);
                (s, f)
            }
            Expr::Atom(u) => {
                let (s, f) = (self.fresh(), self.fresh());
                self.transitions.push(FstTransition {
                    from: s,
                    input: Some(u.input),
                    output: u.output.clone(),
                    to: f,
                });
                (s, f)
            }
            Expr::Concat(a, b) => {
                let (s1, f1) = self.build(a);
                let (s2, f2) = self.build(b);
                self.eps(f1, s2);
                (s1, f2)
            }
            Expr::Union(..) if e.is_atom_class() => {
                let (s, f) = (self.fresh(), self.fresh());
                let mut atoms = Vec::new();
                e.collect_class(&mut atoms);
                for u in atoms {
                    self.transitions.push(FstTransition {
                        from: s,
                        input: Some(u.input),
                        output: u.output.clone(),
                        to: f,
                    });
                }
                (s, f)
            }
            Expr::Union(a, b) => {
                let s = self.fresh();
                let (s1, f1) = self.build(a);
                let (s2, f2) = self.build(b);
                let f = self.fresh();
                self.eps(s, s1);
                self.eps(s, s2);
                self.eps(f1, f);
                self.eps(f2, f);
                (s, f)
            }
            Expr::Star(x) => {
                let s = self.fresh();
                let (s1, f1) = self.build(x);
                let f = self.fresh();
                self.eps(s, s1);
                self.eps(s, f);
                self.eps(f1, s1);
                self.eps(f1, f);
                (s, f)
            }
            Expr::Plus(x) => {
                let s = self.fresh();
                let (s1, f1) = self.build(x);
                let f = self.fresh();
                self.eps(s, s1);
                self.eps(f1, s1);
                self.eps(f1, f);
                (s, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regexp::{behaviour_of, parse};

    fn single(fst: &Fst) -> StateId {
        *fst.initials().iter().next().unwrap()
    }

    #[test]
    fn epsilon_base_case() {
        let m = thompson(&Expr::Epsilon);
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.transitions().len(), 1);
        let t = &m.transitions()[0];
        assert_eq!((t.input, t.output.clone()), (None, None));
        assert!(m.initials().contains(&t.from));
        assert!(m.finals().contains(&t.to));
    }

    #[test]
    fn atom_case() {
        let m = thompson(&parse("a<A>").unwrap());
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.transitions().len(), 1);
        let t = &m.transitions()[0];
        assert_eq!(t.input, Some(InputSymbol('a')));
        assert_eq!(t.output.as_ref().unwrap().as_str(), "A");
    }

    #[test]
    fn atom_class_is_one_gadget() {
        let m = thompson(&parse("a|b<X>|c").unwrap());
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.transitions().len(), 3);
        assert!(m.transitions().iter().all(|t| t.input.is_some()));
    }

    #[test]
    fn closure_basics() {
        let m = thompson(&parse("ab|c*").unwrap());
        assert!(m.eps_closure(&BTreeSet::new()).is_empty());
        let fin = *m.finals().iter().next().unwrap();
        assert_eq!(m.eps_closure(&BTreeSet::from([fin])), BTreeSet::from([fin]));
        let i = single(&m);
        let closure = m.eps_closure(&BTreeSet::from([i]));
        // fork, entry of `ab`, and the star gadget with its body entry, exit and the join
        let readers: BTreeSet<char> = closure
            .iter()
            .flat_map(|&p| m.transitions_from(p))
            .filter_map(|t| t.input.map(|s| s.0))
            .collect();
        assert_eq!(readers, BTreeSet::from(['a', 'c']));
        assert!(closure.contains(&fin));
        let forks: Vec<_> = m.transitions_on(i, None).collect();
        assert_eq!(forks.len(), 2);
        assert!(forks.iter().all(|t| closure.contains(&t.to)));
    }

    #[test]
    fn final_state_has_empty_behaviour() {
        let m = thompson(&parse("a<A>b").unwrap());
        let fin = *m.finals().iter().next().unwrap();
        assert!(m.state_behaviour(fin, 4).is_empty());
    }

    #[test]
    fn single_transition_behaviour() {
        let m = thompson(&parse("a<A>").unwrap());
        let t = m.state_behaviour(single(&m), 1);
        assert_eq!(t.to_strings(), vec![("a".into(), "A".into())]);
        assert_eq!(m.output(1), t);
    }

    #[test]
    fn e3_output_matches_expression() {
        let e = parse("a(b|c)+d<alpha>|d((a*b+|b*)c)+d<beta>").unwrap();
        let m = thompson(&e);
        assert_eq!(m.output(4), behaviour_of(&e, 4));
    }

    #[test]
    fn annotations_count_only_at_match_end() {
        for text in ["a<Y>b<X>", "a<Y>b*", "(a<Y>|b)+c", "a<Y>|ab<X>", "(a<X>b)*"] {
            let e = parse(text).unwrap();
            assert_eq!(thompson(&e).output(5), behaviour_of(&e, 5), "{text}");
        }
        let m = thompson(&parse("a<Y>b<X>").unwrap());
        assert_eq!(m.output(2).to_strings(), vec![("ab".into(), "X".into())]);
    }

    #[test]
    fn output_unions_initials() {
        let sigma: BTreeSet<InputSymbol> = ['a', 'b'].into_iter().map(InputSymbol).collect();
        let gamma: BTreeSet<OutputSymbol> = ["A", "B"]
            .into_iter()
            .map(|s| OutputSymbol::new(s).unwrap())
            .collect();
        let t = |from: usize, input: char, out: &str, to: usize| FstTransition {
            from: from.into(),
            input: Some(InputSymbol(input)),
            output: OutputSymbol::new(out),
            to: to.into(),
        };
        let m = Fst::new(
            4,
            sigma,
            gamma,
            vec![t(0, 'a', "A", 1), t(2, 'a', "B", 3), t(2, 'b', "B", 3)],
            BTreeSet::from([StateId(0), StateId(2)]),
            BTreeSet::new(),
        )
        .unwrap();
        let mut expected = m.state_behaviour(StateId(0), 2);
        expected.union_with(&m.state_behaviour(StateId(2), 2));
        assert_eq!(m.output(2), expected);
        assert_eq!(
            m.output(2).to_strings(),
            vec![("a".into(), "A,B".into()), ("b".into(), "B".into())]
        );
    }

    #[test]
    fn linear_size() {
        for text in ["a(b|c)+d<A>", "d((a*b+|b*)c)+d<B>", "()", "((a|b)*c?)+"] {
            let e = parse(text).unwrap();
            let m = thompson(&e);
            assert!(m.state_count() <= 2 * e.size(), "{text}");
            assert!(m.transitions().len() <= 4 * e.size(), "{text}");
        }
    }

    #[test]
    fn rejects_bad_transducers() {
        let none = Fst::new(
            1,
            BTreeSet::new(),
            BTreeSet::new(),
            vec![],
            BTreeSet::new(),
            BTreeSet::new(),
        );
        assert_eq!(none, Err(FstError::NoInitial));
        let bad = Fst::new(
            1,
            BTreeSet::new(),
            BTreeSet::new(),
            vec![FstTransition {
                from: StateId(0),
                input: Some(InputSymbol('x')),
                output: None,
                to: StateId(0),
            }],
            BTreeSet::from([StateId(0)]),
            BTreeSet::new(),
        );
        assert_eq!(bad, Err(FstError::InputNotInAlphabet('x')));
    }
}
