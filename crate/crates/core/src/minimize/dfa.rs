use std::collections::{HashMap, HashSet, VecDeque};

use crate::symbol::{InputSymbol, OutputSet, StateId};

/// A symbol of the product alphabet `U = Σ × (Λ ∪ {ε})`: an input symbol
/// together with the output set emitted on reading it.
pub type ULabel = (InputSymbol, OutputSet);

/// A deterministic automaton over [`ULabel`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaView {
    labels: Vec<ULabel>,
    states: usize,
    delta: Vec<Option<StateId>>,
    initial: StateId,
    finals: Vec<bool>,
}

impl DfaView {
    /// `states` states, none final, no transitions. `labels` are sorted and
    /// deduplicated.
    pub fn new(mut labels: Vec<ULabel>, states: usize, initial: StateId) -> DfaView {
        assert!(initial.index() < states, "initial state out of range");
        labels.sort();
        labels.dedup();
        DfaView {
            delta: vec![None; states * labels.len()],
            labels,
            states,
            initial,
            finals: vec![false; states],
        }
    }

    pub fn labels(&self) -> &[ULabel] {
        &self.labels
    }

    pub fn label_index(&self, label: &ULabel) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn set_initial(&mut self, p: StateId) {
        assert!(p.index() < self.states, "initial state out of range");
        self.initial = p;
    }

    pub fn is_final(&self, p: StateId) -> bool {
        self.finals[p.index()]
    }

    pub fn set_final(&mut self, p: StateId, is_final: bool) {
        self.finals[p.index()] = is_final;
    }

    pub fn set(&mut self, p: StateId, label: usize, q: StateId) {
        assert!(q.index() < self.states, "target out of range");
        self.delta[p.index() * self.labels.len() + label] = Some(q);
    }

    pub fn next(&self, p: StateId, label: usize) -> Option<StateId> {
        self.delta[p.index() * self.labels.len() + label]
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().filter(|t| t.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(Option::is_some)
    }

    /// Adds a non-final absorbing state and sends every missing transition to
    /// it. Returns the new automaton and the absorbing state, or a clone and
    /// `None` when nothing was missing.
    pub fn complete_with_dead(&self) -> (DfaView, Option<StateId>) {
        if self.is_complete() {
            return (self.clone(), None);
        }
        let dead = StateId::from(self.states);
        let mut out = DfaView::new(self.labels.clone(), self.states + 1, self.initial);
        out.finals[..self.states].copy_from_slice(&self.finals);
        for p in 0..=self.states {
            for l in 0..self.labels.len() {
                let q = if p < self.states {
                    self.next(StateId::from(p), l).unwrap_or(dead)
                } else {
                    dead
                };
                out.set(StateId::from(p), l, q);
            }
        }
        (out, Some(dead))
    }
}

/// A partition of the states `0..n` into disjoint non-empty blocks.
#[derive(Debug, Clone)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Partition {
    fn from_block_of(block_of: Vec<usize>) -> Partition {
        let count = block_of.iter().map(|b| b + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); count];
        for (p, &b) in block_of.iter().enumerate() {
            blocks[b].push(StateId::from(p));
        }
        Partition { blocks, block_of }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, p: StateId) -> usize {
        self.block_of[p.index()]
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    /// Blocks sorted internally and by smallest member; equal partitions have
    /// equal canonical forms regardless of block numbering.
    pub fn canonical(&self) -> Vec<Vec<StateId>> {
        let mut out: Vec<Vec<StateId>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort();
                b
            })
            .collect();
        out.sort();
        out
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Partition {}

/// Hopcroft's partition refinement: the coarsest partition compatible with
/// finality and transitions. `a` must be complete.
///
/// Splitters are `(block, label)` pairs. When a block splits, the pair for a
/// block already queued is queued for both halves; otherwise only the smaller
/// half is queued (the older block on a tie).
pub fn hopcroft_partition(a: &DfaView) -> Partition {
    assert!(
        a.is_complete(),
        "Hopcroft refinement needs a complete automaton"
    );
    let n = a.state_count();
    let k = a.labels().len();
    if n == 0 {
        return Partition::from_block_of(Vec::new());
    }

    // preds[l][q] = states p with δ(p, l) = q
    let mut preds: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
    for p in 0..n {
        for (l, pl) in preds.iter_mut().enumerate() {
            let q = a.next(StateId::from(p), l).expect("complete");
            pl[q.index()].push(p);
        }
    }

    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let finals: Vec<usize> = (0..n).filter(|&p| a.is_final(StateId::from(p))).collect();
    let others: Vec<usize> = (0..n).filter(|&p| !a.is_final(StateId::from(p))).collect();
    for group in [finals, others] {
        if !group.is_empty() {
            let id = blocks.len();
            for &p in &group {
                block_of[p] = id;
            }
            blocks.push(group);
        }
    }

    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut queued: HashSet<(usize, usize)> = HashSet::new();
    if blocks.len() == 2 {
        let smaller = if blocks[1].len() < blocks[0].len() {
            1
        } else {
            0
        };
        for l in 0..k {
            queue.push_back((smaller, l));
            queued.insert((smaller, l));
        }
    }

    let mut marked = vec![false; n];
    while let Some((splitter, label)) = queue.pop_front() {
        queued.remove(&(splitter, label));
        let mut hit: Vec<usize> = Vec::new();
        for &q in &blocks[splitter] {
            for &p in &preds[label][q] {
                if !marked[p] {
                    marked[p] = true;
                    hit.push(p);
                }
            }
        }
        let mut touched: Vec<usize> = hit.iter().map(|&p| block_of[p]).collect();
        touched.sort_unstable();
        touched.dedup();
        for y in touched {
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                blocks[y].iter().partition(|&&p| marked[p]);
            if outside.is_empty() {
                continue;
            }
            let z = blocks.len();
            for &p in &inside {
                block_of[p] = z;
            }
            blocks[y] = outside;
            blocks.push(inside);
            for l in 0..k {
                if queued.contains(&(y, l)) {
                    queue.push_back((z, l));
                    queued.insert((z, l));
                } else {
                    let pick = if blocks[z].len() < blocks[y].len() {
                        z
                    } else {
                        y
                    };
                    queue.push_back((pick, l));
                    queued.insert((pick, l));
                }
            }
        }
        for p in hit {
            marked[p] = false;
        }
    }
    Partition::from_block_of(block_of)
}

/// Moore-style refinement: split every block by the blocks its members reach
/// on each label until nothing changes. Quadratic, and kept as an
/// independent cross-check of [`hopcroft_partition`].
pub fn moore_partition(a: &DfaView) -> Partition {
    assert!(
        a.is_complete(),
        "Moore refinement needs a complete automaton"
    );
    let n = a.state_count();
    let k = a.labels().len();
    let mut block_of: Vec<usize> = (0..n)
        .map(|p| usize::from(!a.is_final(StateId::from(p))))
        .collect();
    let mut count = renumber(&mut block_of);
    loop {
        let signatures: Vec<Vec<usize>> = (0..n)
            .map(|p| {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(block_of[p]);
                for l in 0..k {
                    sig.push(block_of[a.next(StateId::from(p), l).expect("complete").index()]);
                }
                sig
            })
            .collect();
        let mut ids: HashMap<&Vec<usize>, usize> = HashMap::new();
        let mut next: Vec<usize> = Vec::with_capacity(n);
        for sig in &signatures {
            let fresh = ids.len();
            next.push(*ids.entry(sig).or_insert(fresh));
        }
        let next_count = ids.len();
        block_of = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }
    Partition::from_block_of(block_of)
}

fn renumber(block_of: &mut [usize]) -> usize {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    for b in block_of.iter_mut() {
        let fresh = ids.len();
        *b = *ids.entry(*b).or_insert(fresh);
    }
    ids.len()
}

/// The minimal complete automaton for `L(a)`: Hopcroft refinement followed by
/// the quotient, restricted to blocks reachable from the initial block and
/// numbered breadth-first in label order. `a` must be complete.
pub fn minimize_dfa(a: &DfaView) -> DfaView {
    let partition = hopcroft_partition(a);
    quotient(a, &partition)
}

pub(crate) fn quotient(a: &DfaView, partition: &Partition) -> DfaView {
    let k = a.labels().len();
    let mut order: Vec<Option<usize>> = vec![None; partition.block_count()];
    let mut reps: Vec<StateId> = Vec::new();
    let start = partition.block_of(a.initial());
    order[start] = Some(0);
    reps.push(partition.blocks()[start][0]);
    let mut head = 0;
    while head < reps.len() {
        let rep = reps[head];
        head += 1;
        for l in 0..k {
            let q = a.next(rep, l).expect("complete");
            let b = partition.block_of(q);
            if order[b].is_none() {
                order[b] = Some(reps.len());
                reps.push(partition.blocks()[b][0]);
            }
        }
    }
    let mut out = DfaView::new(a.labels().to_vec(), reps.len(), StateId(0));
    for (i, &rep) in reps.iter().enumerate() {
        let id = StateId::from(i);
        out.set_final(id, a.is_final(rep));
        for l in 0..k {
            let q = a.next(rep, l).expect("complete");
            let target = order[partition.block_of(q)].expect("reachable");
            out.set(id, l, StateId::from(target));
        }
    }
    out
}
