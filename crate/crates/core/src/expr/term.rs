//! Unnormalized expression trees.
//!
//! A [`Term`] is what the parser produces. [`normalize`] maps it to the
//! canonical [`Expr`]; [`Term::eval`] evaluates it directly at a rational
//! point without going through normalization, which makes it an independent
//! check on the canonical form.

use num_rational::BigRational;
use num_traits::Zero;

use super::eval::{Assignment, EvalError};
use super::parse::{parse_scalar, ParseError};
use super::poly::Poly;
use super::{Atom, Expr, ExprError, JetVar, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Num(BigRational),
    X,
    Y,
    Jet(JetVar),
    /// Operator symbols; only meaningful inside operator text.
    Dx,
    Dy,
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Pow(Box<Term>, i64),
    Exp(Box<Term>),
    Ln(Box<Term>),
    Diff(Box<Term>, Vec<Var>),
}

impl Term {
    pub fn parse(text: &str) -> Result<Term, ParseError> {
        parse_scalar(text)
    }

    pub(crate) fn parse_operator(text: &str) -> Result<Term, ParseError> {
        super::parse::parse_operator(text)
    }

    /// Evaluates the tree at a rational point.
    ///
    /// Kernels and `diff` nodes have no exact pointwise value and are
    /// rejected.
    pub fn eval(&self, at: &Assignment) -> Result<BigRational, EvalError> {
        Ok(match self {
            Term::Num(c) => c.clone(),
            Term::X => at.x.clone(),
            Term::Y => at.y.clone(),
            Term::Jet(j) => at.jet(j)?.clone(),
            Term::Add(a, b) => a.eval(at)? + b.eval(at)?,
            Term::Sub(a, b) => a.eval(at)? - b.eval(at)?,
            Term::Mul(a, b) => a.eval(at)? * b.eval(at)?,
            Term::Div(a, b) => {
                let d = b.eval(at)?;
                if d.is_zero() {
                    return Err(EvalError::Pole);
                }
                a.eval(at)? / d
            }
            Term::Neg(a) => -a.eval(at)?,
            Term::Pow(a, k) => {
                let v = a.eval(at)?;
                if *k < 0 && v.is_zero() {
                    return Err(EvalError::Pole);
                }
                let p = num_traits::pow(v, k.unsigned_abs() as usize);
                if *k < 0 {
                    p.recip()
                } else {
                    p
                }
            }
            Term::Exp(_) | Term::Ln(_) | Term::Diff(..) | Term::Dx | Term::Dy => {
                return Err(EvalError::Kernel)
            }
        })
    }
}

/// Canonical form of a term.
pub fn normalize(term: &Term) -> Result<Expr, ExprError> {
    Ok(match term {
        Term::Num(c) => Expr::rational(c.clone()),
        Term::X => Expr::x(),
        Term::Y => Expr::y(),
        Term::Jet(j) => Expr::jet(j.clone()),
        Term::Dx | Term::Dy => {
            return Err(ExprError::Parse(ParseError {
                kind: super::ParseErrorKind::UnknownToken,
                position: 0,
                message: "operator symbol in a scalar expression".into(),
            }))
        }
        Term::Add(a, b) => normalize(a)?.add(&normalize(b)?),
        Term::Sub(a, b) => normalize(a)?.sub(&normalize(b)?),
        Term::Mul(a, b) => normalize(a)?.mul(&normalize(b)?),
        Term::Div(a, b) => normalize(a)?.div(&normalize(b)?)?,
        Term::Neg(a) => normalize(a)?.neg(),
        Term::Pow(a, k) => normalize(a)?.pow(*k)?,
        Term::Exp(a) => normalize(a)?.exp(),
        Term::Ln(a) => normalize(a)?.ln()?,
        Term::Diff(a, vars) => vars
            .iter()
            .fold(normalize(a)?, |e, v| e.diff(*v)),
    })
}

fn atom_term(atom: &Atom) -> Term {
    match atom {
        Atom::X => Term::X,
        Atom::Y => Term::Y,
        Atom::Jet(j) => Term::Jet(j.clone()),
        Atom::Exp(arg) => Term::Exp(Box::new(arg.to_term())),
        Atom::Ln(arg) => Term::Ln(Box::new(arg.to_term())),
    }
}

fn poly_term(p: &Poly) -> Term {
    let mut acc: Option<Term> = None;
    for (m, c) in p.terms() {
        let mut t = Term::Num(c.clone());
        for (atom, k) in m.powers() {
            let base = atom_term(atom);
            let f = if *k == 1 {
                base
            } else {
                Term::Pow(Box::new(base), *k as i64)
            };
            t = Term::Mul(Box::new(t), Box::new(f));
        }
        acc = Some(match acc {
            None => t,
            Some(prev) => Term::Add(Box::new(prev), Box::new(t)),
        });
    }
    acc.unwrap_or_else(|| Term::Num(BigRational::zero()))
}

impl Expr {
    /// The canonical form as an (unnormalized) tree.
    pub fn to_term(&self) -> Term {
        let n = poly_term(self.num());
        if self.den().is_one() {
            n
        } else {
            Term::Div(Box::new(n), Box::new(poly_term(self.den())))
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize(&Term::parse(s)?)
    }
}
