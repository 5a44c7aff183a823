//! Recursive-descent parser for the expression and operator grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' integer)?
//! base   := rational | 'x' | 'y' | ident jet? | 'exp(' expr ')' | 'ln(' expr ')'
//!         | 'diff(' expr (',' ('x' | 'y'))+ ')' | '(' expr ')'
//! jet    := '_' ('x' | 'y')+
//! ```
//!
//! `Dx` and `Dy` are reserved and only accepted when parsing operators.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::term::Term;
use super::{JetVar, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownToken,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownToken => "unknown token",
        };
        write!(f, "{kind} at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Jet(String, u32, u32),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Jet(s, _, _) => write!(f, "{s}_..."),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Comma => f.write_str(","),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Int(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name = text[start..i].to_string();
            if i < bytes.len() && bytes[i] == b'_' {
                let suffix_start = i + 1;
                let mut j = suffix_start;
                while j < bytes.len() && matches!(bytes[j], b'x' | b'y') {
                    j += 1;
                }
                if j == suffix_start || (j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')) {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        position: i,
                        message: "jet suffix must consist of the letters x and y".into(),
                    });
                }
                let suffix = &text[suffix_start..j];
                let dx = suffix.bytes().filter(|&b| b == b'x').count() as u32;
                let dy = suffix.len() as u32 - dx;
                out.push((Tok::Jet(name, dx, dy), start));
                i = j;
            } else {
                out.push((Tok::Ident(name), start));
            }
            continue;
        }
        let ch = text[start..].chars().next().expect("non-empty");
        return Err(ParseError {
            kind: ParseErrorKind::UnknownToken,
            position: start,
            message: format!("unexpected character '{ch}'"),
        });
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const RESERVED: [&str; 7] = ["x", "y", "exp", "ln", "diff", "Dx", "Dy"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    operators: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            position: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{t}', found '{}'", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Term::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Term::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Term::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Term::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Term::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let k = match self.bump() {
            Tok::Int(n) => {
                let k: i64 = n
                    .try_into()
                    .map_err(|_| self.error("exponent out of range"))?;
                if negative {
                    -k
                } else {
                    k
                }
            }
            other => return Err(self.error(format!("expected integer exponent, found '{other}'"))),
        };
        if parenthesized {
            self.expect(Tok::RParen)?;
        }
        Ok(Term::Pow(Box::new(base), k))
    }

    fn base(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Term::Num(BigRational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Jet(name, dx, dy) => {
                if RESERVED.contains(&name.as_str()) {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        position: at,
                        message: format!("'{name}' cannot carry a jet suffix"),
                    });
                }
                Ok(Term::Jet(JetVar::new(&name, dx, dy)))
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Term::X),
                "y" => Ok(Term::Y),
                "Dx" | "Dy" if !self.operators => Err(ParseError {
                    kind: ParseErrorKind::UnknownToken,
                    position: at,
                    message: format!("operator symbol '{name}' in a scalar expression"),
                }),
                "Dx" => Ok(Term::Dx),
                "Dy" => Ok(Term::Dy),
                "exp" | "ln" => {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(if name == "exp" {
                        Term::Exp(Box::new(arg))
                    } else {
                        Term::Ln(Box::new(arg))
                    })
                }
                "diff" => {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    let mut vars = Vec::new();
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        match self.bump() {
                            Tok::Ident(v) if v == "x" => vars.push(Var::X),
                            Tok::Ident(v) if v == "y" => vars.push(Var::Y),
                            other => {
                                return Err(self.error(format!(
                                    "expected differentiation variable x or y, found '{other}'"
                                )))
                            }
                        }
                    }
                    if vars.is_empty() {
                        return Err(self.error("diff needs at least one variable"));
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Term::Diff(Box::new(arg), vars))
                }
                _ => Ok(Term::Jet(JetVar::base(&name))),
            },
            other => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                position: at,
                message: format!("unexpected '{other}'"),
            }),
        }
    }
}

fn parse_with(text: &str, operators: bool) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        operators,
    };
    let t = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected '{}' after expression", p.peek())));
    }
    Ok(t)
}

pub(crate) fn parse_scalar(text: &str) -> Result<Term, ParseError> {
    parse_with(text, false)
}

pub(crate) fn parse_operator(text: &str) -> Result<Term, ParseError> {
    parse_with(text, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_positions() {
        let err = parse_scalar("x + * y").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.position, 4);
        let err = parse_scalar("x + $").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownToken);
        assert_eq!(err.position, 4);
    }

    #[test]
    fn operator_symbols_rejected_in_scalars() {
        let err = parse_scalar("a*Dx").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownToken);
        assert!(parse_operator("a*Dx").is_ok());
    }

    #[test]
    fn malformed_jet_suffixes() {
        assert!(parse_scalar("a_z").is_err());
        assert!(parse_scalar("a_").is_err());
        assert!(parse_scalar("x_y").is_err());
    }

    #[test]
    fn unbalanced_and_trailing_input() {
        assert!(parse_scalar("(x + y").is_err());
        assert!(parse_scalar("x y").is_err());
        assert!(parse_scalar("diff(a)").is_err());
        assert!(parse_scalar("x^y").is_err());
    }

    #[test]
    fn negative_exponents() {
        assert_eq!(
            parse_scalar("x^-2").unwrap(),
            Term::Pow(Box::new(Term::X), -2)
        );
        assert_eq!(
            parse_scalar("x^(-2)").unwrap(),
            Term::Pow(Box::new(Term::X), -2)
        );
    }
}
