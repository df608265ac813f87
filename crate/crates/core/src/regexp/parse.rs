//! Recursive-descent parser for the pattern-regexp syntax.
//!
//! ```text
//! expr  := alt
//! alt   := cat ('|' cat)*
//! cat   := rep+
//! rep   := atom ('*' | '+' | '?')*
//! atom  := CHAR annot? | '(' alt? ')'
//! annot := '<' IDENT '>'
//! ```
//!
//! Whitespace between tokens is ignored. Offsets in errors count characters
//! from the start of the original text.

use thiserror::Error;

use super::Expr;
use crate::symbol::{is_identifier, is_reserved, OutputSymbol, UnifiedSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unbalanced parenthesis")]
    Unbalanced,
    #[error("empty alternative (write `()` for the empty word)")]
    EmptyAlternative,
    #[error("annotation must follow an input symbol")]
    MisplacedAnnotation,
    #[error("malformed annotation")]
    MalformedAnnotation,
    #[error("reserved character {0:?} cannot be an input symbol")]
    Reserved(char),
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    if tokens.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let expr = parser.alt()?;
    match parser.peek() {
        None => Ok(expr),
        Some(')') => Err(parser.error(ParseErrorKind::Unbalanced)),
        Some(c) => Err(parser.error(ParseErrorKind::Reserved(c))),
    }
}

struct Parser {
    tokens: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn alt(&mut self) -> Result<Expr, ParseError> {
        let mut branches = vec![self.cat()?];
        while self.peek() == Some('|') {
            self.bump();
            branches.push(self.cat()?);
        }
        Ok(fold_right(branches, Expr::union))
    }

    fn cat(&mut self) -> Result<Expr, ParseError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.rep()?);
        }
        if items.is_empty() {
            return Err(self.error(ParseErrorKind::EmptyAlternative));
        }
        Ok(fold_right(items, Expr::concat))
    }

    fn rep(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            e = match self.peek() {
                Some('*') => Expr::star(e),
                Some('+') => Expr::plus(e),
                Some('?') => Expr::opt(e),
                _ => return Ok(e),
            };
            self.bump();
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(c) = self.peek() else {
            return Err(self.error(ParseErrorKind::EmptyAlternative));
        };
        match c {
            '(' => {
                let open = self.offset();
                self.bump();
                let inner = if self.peek() == Some(')') {
                    Expr::Epsilon
                } else {
                    self.alt()?
                };
                if self.peek() != Some(')') {
                    return Err(ParseError {
                        offset: open,
                        kind: ParseErrorKind::Unbalanced,
                    });
                }
                self.bump();
                if self.peek() == Some('<') {
                    return Err(self.error(ParseErrorKind::MisplacedAnnotation));
                }
                Ok(inner)
            }
            '<' => Err(self.error(ParseErrorKind::MisplacedAnnotation)),
            ')' => Err(self.error(ParseErrorKind::Unbalanced)),
            c if is_reserved(c) => Err(self.error(ParseErrorKind::Reserved(c))),
            c => {
                self.bump();
                let output = if self.peek() == Some('<') {
                    Some(self.annotation()?)
                } else {
                    None
                };
                Ok(Expr::Atom(UnifiedSymbol::new(c, output)))
            }
        }
    }

    fn annotation(&mut self) -> Result<OutputSymbol, ParseError> {
        let start = self.offset();
        self.bump();
        let malformed = ParseError {
            offset: start,
            kind: ParseErrorKind::MalformedAnnotation,
        };
        let mut name = String::new();
        let mut offsets = Vec::new();
        loop {
            let offset = self.offset();
            match self.bump() {
                Some('>') => break,
                Some(c) if !is_reserved(c) => {
                    name.push(c);
                    offsets.push(offset);
                }
                _ => return Err(malformed),
            }
        }
        // Whitespace was dropped by the tokenizer; an identifier may not span it.
        let contiguous = offsets.windows(2).all(|w| w[1] == w[0] + 1);
        if !contiguous || !is_identifier(&name) {
            return Err(malformed);
        }
        Ok(OutputSymbol::new(name).expect("checked identifier"))
    }
}

fn fold_right(mut items: Vec<Expr>, join: fn(Expr, Expr) -> Expr) -> Expr {
    let mut acc = items.pop().expect("at least one item");
    while let Some(prev) = items.pop() {
        acc = join(prev, acc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> ParseError {
        parse(text).expect_err(text)
    }

    #[test]
    fn table_one_first_pattern() {
        let e = parse("a(b|c)+d<A>").unwrap();
        let expected = Expr::concat(
            Expr::atom('a'),
            Expr::concat(
                Expr::plus(Expr::union(Expr::atom('b'), Expr::atom('c'))),
                Expr::annotated('d', "A"),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn epsilon() {
        assert_eq!(parse("()").unwrap(), Expr::Epsilon);
        assert_eq!(parse("  ( )  ").unwrap(), Expr::Epsilon);
    }

    #[test]
    fn optional_desugars() {
        assert_eq!(
            parse("a?").unwrap(),
            Expr::union(Expr::Epsilon, Expr::atom('a'))
        );
    }

    #[test]
    fn precedence() {
        // postfix > concat > union
        assert_eq!(
            parse("ab*|c").unwrap(),
            Expr::union(
                Expr::concat(Expr::atom('a'), Expr::star(Expr::atom('b'))),
                Expr::atom('c')
            )
        );
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(parse(" a < A > | b ").unwrap(), parse("a<A>|b").unwrap());
    }

    #[test]
    fn unterminated_annotation() {
        let e = err("a<");
        assert_eq!(e.offset, 1);
        assert_eq!(e.kind, ParseErrorKind::MalformedAnnotation);
    }

    #[test]
    fn bad_annotations() {
        assert_eq!(err("a<>").kind, ParseErrorKind::MalformedAnnotation);
        assert_eq!(err("a<1x>").kind, ParseErrorKind::MalformedAnnotation);
        assert_eq!(err("a<x y>").kind, ParseErrorKind::MalformedAnnotation);
        assert_eq!(err("<A>").kind, ParseErrorKind::MisplacedAnnotation);
        assert_eq!(err("(ab)<A>").kind, ParseErrorKind::MisplacedAnnotation);
        assert_eq!(err("a*<A>").kind, ParseErrorKind::MisplacedAnnotation);
    }

    #[test]
    fn unbalanced() {
        assert_eq!(err("(a").kind, ParseErrorKind::Unbalanced);
        assert_eq!(err("(a").offset, 0);
        assert_eq!(err("a)").kind, ParseErrorKind::Unbalanced);
        assert_eq!(err("a)").offset, 1);
    }

    #[test]
    fn empty_alternatives() {
        assert_eq!(err("a|").kind, ParseErrorKind::EmptyAlternative);
        assert_eq!(err("|a").kind, ParseErrorKind::EmptyAlternative);
        assert_eq!(err("(a|)").kind, ParseErrorKind::EmptyAlternative);
        assert_eq!(err("   ").kind, ParseErrorKind::Empty);
    }

    #[test]
    fn reserved_as_atom() {
        assert_eq!(err("*a").kind, ParseErrorKind::Reserved('*'));
        assert_eq!(err("a|+").kind, ParseErrorKind::Reserved('+'));
        assert_eq!(err("a>").kind, ParseErrorKind::Reserved('>'));
    }
}
