use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;

use crate::symbol::{OutputSet, OutputSymbol, Word};

/// Finite view of an outputting behaviour: every input word up to `horizon`
/// symbols that produces output, mapped to the (non-empty) set it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviourTable {
    entries: BTreeMap<Word, OutputSet>,
    horizon: usize,
}

/// First word on which two tables disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub word: Word,
    pub left: OutputSet,
    pub right: OutputSet,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "on {}: {} vs {}", self.word, self.left, self.right)
    }
}

impl BehaviourTable {
    pub fn new(horizon: usize) -> Self {
        BehaviourTable {
            entries: BTreeMap::new(),
            horizon,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &Word) -> Option<&OutputSet> {
        self.entries.get(word)
    }

    /// Outputs for `word`, empty if the word produces none.
    pub fn outputs(&self, word: &Word) -> OutputSet {
        self.entries.get(word).cloned().unwrap_or_default()
    }

    pub fn insert(&mut self, word: Word, sym: OutputSymbol) {
        assert!(word.len() <= self.horizon, "word longer than horizon");
        self.entries.entry(word).or_default().insert(sym);
    }

    /// Adds `set` to the entry for `word`; empty sets leave the table unchanged.
    pub fn extend(&mut self, word: Word, set: &OutputSet) {
        if set.is_empty() {
            return;
        }
        assert!(word.len() <= self.horizon, "word longer than horizon");
        self.entries.entry(word).or_default().extend_from(set);
    }

    /// Pointwise union.
    pub fn union_with(&mut self, other: &BehaviourTable) {
        self.horizon = self.horizon.max(other.horizon);
        for (w, set) in &other.entries {
            self.entries.entry(w.clone()).or_default().extend_from(set);
        }
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Word, OutputSet> {
        self.entries.iter()
    }

    /// The lexicographically first word on which the tables differ.
    pub fn first_mismatch(&self, other: &BehaviourTable) -> Option<Mismatch> {
        let mut words: Vec<&Word> = self.entries.keys().chain(other.entries.keys()).collect();
        words.sort();
        words.dedup();
        words.into_iter().find_map(|w| {
            let left = self.outputs(w);
            let right = other.outputs(w);
            (left != right).then(|| Mismatch {
                word: w.clone(),
                left,
                right,
            })
        })
    }

    /// Entries as `(word, comma-joined outputs)` strings, handy in tests.
    pub fn to_strings(&self) -> Vec<(String, String)> {
        self.entries
            .iter()
            .map(|(w, s)| (w.to_string(), s.joined()))
            .collect()
    }
}

impl<'a> IntoIterator for &'a BehaviourTable {
    type Item = (&'a Word, &'a OutputSet);
    type IntoIter = btree_map::Iter<'a, Word, OutputSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
