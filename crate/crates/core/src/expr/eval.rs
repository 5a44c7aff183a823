//! Evaluation at rational points.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Atom, Expr, JetVar};
use crate::expr::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("pole at the evaluation point")]
    Pole,
    #[error("no value for {0}")]
    Unassigned(String),
    #[error("transcendental kernel cannot be evaluated exactly")]
    Kernel,
}

/// Rational values for `x`, `y` and jet variables.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub x: BigRational,
    pub y: BigRational,
    pub jets: BTreeMap<JetVar, BigRational>,
}

impl Assignment {
    pub fn jet(&self, j: &JetVar) -> Result<&BigRational, EvalError> {
        self.jets
            .get(j)
            .ok_or_else(|| EvalError::Unassigned(super::display::jet_name(j)))
    }
}

fn eval_poly(p: &Poly, at: &Assignment) -> Result<BigRational, EvalError> {
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (atom, k) in m.powers() {
            let v = match atom {
                Atom::X => at.x.clone(),
                Atom::Y => at.y.clone(),
                Atom::Jet(j) => at.jet(j)?.clone(),
                Atom::Exp(_) | Atom::Ln(_) => return Err(EvalError::Kernel),
            };
            t *= num_traits::pow(v, *k as usize);
        }
        acc += t;
    }
    Ok(acc)
}

impl Expr {
    /// Value of the expression at a rational point.
    pub fn eval(&self, at: &Assignment) -> Result<BigRational, EvalError> {
        let n = eval_poly(self.num(), at)?;
        let d = eval_poly(self.den(), at)?;
        if d.is_zero() {
            return Err(EvalError::Pole);
        }
        if d.is_one() {
            return Ok(n);
        }
        Ok(n / d)
    }
}
