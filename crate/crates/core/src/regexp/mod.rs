//! Pattern regexps: regular expressions over input symbols that may carry an
//! output annotation, e.g. `a(b|c)+d<A>`.

mod oracle;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use oracle::{behaviour_at, behaviour_of, complete_oracle, enumerate_language, OracleError};
pub use parse::{parse, ParseError, ParseErrorKind};

use crate::symbol::{InputSymbol, OutputSymbol, UnifiedSymbol};

/// Abstract syntax of a pattern regexp.
///
/// `e?` is desugared to `Union(Epsilon, e)` by the parser. `e+` is kept as its
/// own node so that the transducer construction can loop over a single copy of
/// `e`; its language is always that of `Concat(e, Star(e))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Epsilon,
    Atom(UnifiedSymbol),
    Concat(Box<Expr>, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    Star(Box<Expr>),
    Plus(Box<Expr>),
}

impl Expr {
    pub fn atom(input: char) -> Expr {
        Expr::Atom(UnifiedSymbol::new(input, None))
    }

    /// Panics if `output` is not a valid identifier.
    pub fn annotated(input: char, output: &str) -> Expr {
        let out = OutputSymbol::new(output).expect("invalid output identifier");
        Expr::Atom(UnifiedSymbol::new(input, Some(out)))
    }

    pub fn concat(a: Expr, b: Expr) -> Expr {
        Expr::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: Expr, b: Expr) -> Expr {
        Expr::Union(Box::new(a), Box::new(b))
    }

    pub fn star(e: Expr) -> Expr {
        Expr::Star(Box::new(e))
    }

    pub fn plus(e: Expr) -> Expr {
        Expr::Plus(Box::new(e))
    }

    pub fn opt(e: Expr) -> Expr {
        Expr::union(Expr::Epsilon, e)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Epsilon | Expr::Atom(_) => 1,
            Expr::Concat(a, b) | Expr::Union(a, b) => 1 + a.size() + b.size(),
            Expr::Star(e) | Expr::Plus(e) => 1 + e.size(),
        }
    }

    /// The inferred input alphabet: every character used by an atom.
    pub fn input_alphabet(&self) -> BTreeSet<InputSymbol> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |u| {
            out.insert(u.input);
        });
        out
    }

    /// The inferred output alphabet: every annotation name.
    pub fn output_alphabet(&self) -> BTreeSet<OutputSymbol> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |u| {
            if let Some(o) = &u.output {
                out.insert(o.clone());
            }
        });
        out
    }

    /// True for a union whose leaves are all atoms, e.g. `b|c<X>|d`.
    pub fn is_atom_class(&self) -> bool {
        match self {
            Expr::Union(a, b) => a.is_class_member() && b.is_class_member(),
            _ => false,
        }
    }

    fn is_class_member(&self) -> bool {
        matches!(self, Expr::Atom(_)) || self.is_atom_class()
    }

    /// Leaves of an atom class, left to right.
    pub(crate) fn collect_class<'a>(&'a self, out: &mut Vec<&'a UnifiedSymbol>) {
        match self {
            Expr::Atom(u) => out.push(u),
            Expr::Union(a, b) => {
                a.collect_class(out);
                b.collect_class(out);
            }
            _ => {}
        }
    }

    fn visit_atoms<F: FnMut(&UnifiedSymbol)>(&self, f: &mut F) {
        match self {
            Expr::Epsilon => {}
            Expr::Atom(u) => f(u),
            Expr::Concat(a, b) | Expr::Union(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Expr::Star(e) | Expr::Plus(e) => e.visit_atoms(f),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Union(..) => 0,
            Expr::Concat(..) => 1,
            Expr::Star(_) | Expr::Plus(_) => 2,
            Expr::Epsilon | Expr::Atom(_) => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Epsilon => f.write_str("()"),
            Expr::Atom(u) => write!(f, "{u}"),
            // Union and Concat are printed right-nested to match how they parse.
            Expr::Union(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str("|")?;
                b.fmt_at(f, 0)
            }
            Expr::Concat(a, b) => {
                a.fmt_at(f, 2)?;
                b.fmt_at(f, 1)
            }
            Expr::Star(e) => {
                e.fmt_at(f, 3)?;
                f.write_str("*")
            }
            Expr::Plus(e) => {
                e.fmt_at(f, 3)?;
                f.write_str("+")
            }
        }
    }
}

/// Prints the expression in the concrete syntax accepted by [`parse`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
