//! Symbols shared by expressions, transducers and Mealy machines.

use std::collections::BTreeSet;
use std::fmt;

/// A single input character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputSymbol(pub char);

impl InputSymbol {
    pub fn as_char(self) -> char {
        self.0
    }
}

impl From<char> for InputSymbol {
    fn from(c: char) -> Self {
        InputSymbol(c)
    }
}

impl fmt::Display for InputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Characters that can never be input symbols.
pub fn is_reserved(c: char) -> bool {
    matches!(c, '(' | ')' | '|' | '*' | '+' | '?' | '<' | '>') || c.is_whitespace()
}

/// A named output symbol, e.g. the `A` in `d<A>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutputSymbol(String);

impl OutputSymbol {
    /// Returns `None` unless `name` is a valid identifier.
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        if is_identifier(&name) {
            Some(OutputSymbol(name))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl fmt::Display for OutputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An input symbol paired with an optional output annotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnifiedSymbol {
    pub input: InputSymbol,
    pub output: Option<OutputSymbol>,
}

impl UnifiedSymbol {
    pub fn new(input: impl Into<InputSymbol>, output: Option<OutputSymbol>) -> Self {
        UnifiedSymbol {
            input: input.into(),
            output,
        }
    }
}

impl fmt::Display for UnifiedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.output {
            Some(o) => write!(f, "{}<{}>", self.input, o),
            None => write!(f, "{}", self.input),
        }
    }
}

/// The set of output symbols emitted on one transition. Empty means no output.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutputSet(BTreeSet<OutputSymbol>);

impl OutputSet {
    pub fn new() -> Self {
        OutputSet(BTreeSet::new())
    }

    pub fn singleton(sym: OutputSymbol) -> Self {
        let mut set = BTreeSet::new();
        set.insert(sym);
        OutputSet(set)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, sym: OutputSymbol) -> bool {
        self.0.insert(sym)
    }

    pub fn contains(&self, sym: &OutputSymbol) -> bool {
        self.0.contains(sym)
    }

    pub fn extend_from(&mut self, other: &OutputSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn iter(&self) -> impl Iterator<Item = &OutputSymbol> {
        self.0.iter()
    }

    /// Comma-separated names in lexicographic order.
    pub fn joined(&self) -> String {
        let names: Vec<&str> = self.0.iter().map(OutputSymbol::as_str).collect();
        names.join(",")
    }
}

impl FromIterator<OutputSymbol> for OutputSet {
    fn from_iter<I: IntoIterator<Item = OutputSymbol>>(iter: I) -> Self {
        OutputSet(iter.into_iter().collect())
    }
}

impl fmt::Display for OutputSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.joined())
    }
}

/// A finite sequence of input symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<InputSymbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[InputSymbol] {
        &self.0
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.chars().map(InputSymbol).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Dense state index within one machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for StateId {
    fn from(i: usize) -> Self {
        StateId(u32::try_from(i).expect("state index overflow"))
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
