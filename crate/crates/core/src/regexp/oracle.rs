//! Reference semantics computed directly on the expression tree.
//!
//! Nothing here builds an automaton. [`enumerate_language`] unrolls the
//! inductive language definition up to a length bound and [`behaviour_of`]
//! reads the behaviour off the enumerated words. [`behaviour_at`] and
//! [`complete_oracle`] use partial derivatives of the expression so that long
//! words can be checked without enumerating the language.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::Expr;
use crate::behaviour::BehaviourTable;
use crate::symbol::{InputSymbol, OutputSet, UnifiedSymbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("symbol {symbol:?} at position {position} is not in the expression's alphabet")]
    UnknownSymbol { position: usize, symbol: char },
}

type UWord = Vec<UnifiedSymbol>;

/// All words of `L(e)` with at most `max_len` symbols.
pub fn enumerate_language(e: &Expr, max_len: usize) -> BTreeSet<UWord> {
    match e {
        Expr::Epsilon => BTreeSet::from([Vec::new()]),
        Expr::Atom(u) => {
            if max_len >= 1 {
                BTreeSet::from([vec![u.clone()]])
            } else {
                BTreeSet::new()
            }
        }
        Expr::Union(a, b) => {
            let mut out = enumerate_language(a, max_len);
            out.extend(enumerate_language(b, max_len));
            out
        }
        Expr::Concat(a, b) => {
            let left = enumerate_language(a, max_len);
            let right = enumerate_language(b, max_len);
            concat_bounded(&left, &right, max_len)
        }
        Expr::Star(body) => star_bounded(&enumerate_language(body, max_len), max_len),
        Expr::Plus(body) => {
            let once = enumerate_language(body, max_len);
            let many = star_bounded(&once, max_len);
            concat_bounded(&once, &many, max_len)
        }
    }
}

fn concat_bounded(
    left: &BTreeSet<UWord>,
    right: &BTreeSet<UWord>,
    max_len: usize,
) -> BTreeSet<UWord> {
    let mut out = BTreeSet::new();
    for x in left {
        for y in right {
            if x.len() + y.len() <= max_len {
                let mut w = x.clone();
                w.extend(y.iter().cloned());
                out.insert(w);
            }
        }
    }
    out
}

/// Iterates `S := S ∪ S·body` until no new word of length ≤ `max_len` appears.
fn star_bounded(body: &BTreeSet<UWord>, max_len: usize) -> BTreeSet<UWord> {
    let nonempty: BTreeSet<UWord> = body.iter().filter(|w| !w.is_empty()).cloned().collect();
    let mut all = BTreeSet::from([Vec::new()]);
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let next: BTreeSet<UWord> = concat_bounded(&frontier, &nonempty, max_len)
            .into_iter()
            .filter(|w| !all.contains(w))
            .collect();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// The outputting behaviour of `e` on every input word of length ≤ `max_len`.
///
/// A word `wσ` maps to every `γ` such that some word of the language reads `w`
/// and then `σ<γ>`. Pattern regexps cannot produce a word whose last symbol
/// has no input, so the empty word never carries output.
pub fn behaviour_of(e: &Expr, max_len: usize) -> BehaviourTable {
    let mut table = BehaviourTable::new(max_len);
    for u in enumerate_language(e, max_len) {
        let Some(last) = u.last() else { continue };
        if let Some(out) = &last.output {
            let word = Word(u.iter().map(|s| s.input).collect());
            table.insert(word, out.clone());
        }
    }
    table
}

/// `B(e)(w)` for a single word, via partial derivatives.
pub fn behaviour_at(e: &Expr, w: &Word) -> OutputSet {
    let atoms = atoms_of(e);
    let mut residuals: HashSet<Expr> = HashSet::from([e.clone()]);
    let mut out = OutputSet::new();
    for (pos, &sigma) in w.symbols().iter().enumerate() {
        let (next, emitted) = step_residuals(&residuals, &atoms, sigma);
        if pos + 1 == w.len() {
            out = emitted;
        }
        residuals = next;
        if residuals.is_empty() {
            return OutputSet::new();
        }
    }
    out
}

/// For each prefix of `w`, the outputs of every suffix of that prefix.
///
/// Equivalent to taking the union of `B(e)(v)` over all suffixes `v` of each
/// prefix. A fresh copy of `e` is started before every symbol; the set of live
/// residual expressions stays bounded by the number of atoms of `e`.
pub fn complete_oracle(e: &Expr, w: &Word) -> Result<Vec<OutputSet>, OracleError> {
    let sigma = e.input_alphabet();
    if let Some((position, s)) = w
        .symbols()
        .iter()
        .enumerate()
        .find(|(_, s)| !sigma.contains(s))
    {
        return Err(OracleError::UnknownSymbol {
            position: position + 1,
            symbol: s.0,
        });
    }
    let atoms = atoms_of(e);
    let mut residuals: HashSet<Expr> = HashSet::new();
    let mut out = Vec::with_capacity(w.len());
    for &s in w.symbols() {
        residuals.insert(e.clone());
        let (next, emitted) = step_residuals(&residuals, &atoms, s);
        residuals = next;
        out.push(emitted);
    }
    Ok(out)
}

fn atoms_of(e: &Expr) -> Vec<UnifiedSymbol> {
    fn walk(e: &Expr, out: &mut BTreeSet<UnifiedSymbol>) {
        match e {
            Expr::Epsilon => {}
            Expr::Atom(u) => {
                out.insert(u.clone());
            }
            Expr::Concat(a, b) | Expr::Union(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Expr::Star(x) | Expr::Plus(x) => walk(x, out),
        }
    }
    let mut set = BTreeSet::new();
    walk(e, &mut set);
    set.into_iter().collect()
}

fn step_residuals(
    residuals: &HashSet<Expr>,
    atoms: &[UnifiedSymbol],
    sigma: InputSymbol,
) -> (HashSet<Expr>, OutputSet) {
    let mut next = HashSet::new();
    let mut emitted = OutputSet::new();
    for u in atoms.iter().filter(|u| u.input == sigma) {
        for r in residuals {
            for d in derivative(r, u) {
                if let Some(g) = &u.output {
                    if nullable(&d) {
                        emitted.insert(g.clone());
                    }
                }
                next.insert(d);
            }
        }
    }
    (next, emitted)
}

fn nullable(e: &Expr) -> bool {
    match e {
        Expr::Epsilon | Expr::Star(_) => true,
        Expr::Atom(_) => false,
        Expr::Concat(a, b) => nullable(a) && nullable(b),
        Expr::Union(a, b) => nullable(a) || nullable(b),
        Expr::Plus(x) => nullable(x),
    }
}

/// Antimirov partial derivative with respect to one unified symbol.
fn derivative(e: &Expr, u: &UnifiedSymbol) -> Vec<Expr> {
    match e {
        Expr::Epsilon => Vec::new(),
        Expr::Atom(a) => {
            if a == u {
                vec![Expr::Epsilon]
            } else {
                Vec::new()
            }
        }
        Expr::Union(a, b) => {
            let mut out = derivative(a, u);
            out.extend(derivative(b, u));
            out
        }
        Expr::Concat(a, b) => {
            let mut out: Vec<Expr> = derivative(a, u).into_iter().map(|d| then(d, b)).collect();
            if nullable(a) {
                out.extend(derivative(b, u));
            }
            out
        }
        Expr::Star(x) => derivative(x, u).into_iter().map(|d| then(d, e)).collect(),
        Expr::Plus(x) => {
            let rest = Expr::Star(x.clone());
            derivative(x, u)
                .into_iter()
                .map(|d| then(d, &rest))
                .collect()
        }
    }
}

/// `d · rest`, kept right-associated so residuals stay in a finite set.
fn then(d: Expr, rest: &Expr) -> Expr {
    match d {
        Expr::Epsilon => rest.clone(),
        Expr::Concat(a, b) => Expr::Concat(a, Box::new(then(*b, rest))),
        d => Expr::concat(d, rest.clone()),
    }
}
