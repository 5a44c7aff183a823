//! Linear partial differential operators `Σ c_ij Dx^i Dy^j` with
//! coefficients in the expression field.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{normalize, Expr, ExprError, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpdoError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("the zero operator has no symbol")]
    ZeroOperator,
    #[error("division by an operator of positive order")]
    DivisionByOperator,
    #[error("operator symbol inside {0}")]
    OperatorInKernel(&'static str),
}

/// Sparse operator keyed by the multi-index `(i, j)` of `Dx^i Dy^j`.
///
/// Coefficients are written to the left of the derivatives. No stored
/// coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lpdo {
    coeffs: BTreeMap<(u32, u32), Expr>,
}

/// Top-degree homogeneous part of an operator, as a polynomial in `X, Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPoly {
    degree: u32,
    coeffs: BTreeMap<(u32, u32), Expr>,
}

impl SymbolPoly {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, i: u32, j: u32) -> Expr {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Expr)> {
        self.coeffs.iter()
    }

    pub fn mul(&self, other: &SymbolPoly) -> SymbolPoly {
        let mut coeffs: BTreeMap<(u32, u32), Expr> = BTreeMap::new();
        for (&(i, j), a) in &self.coeffs {
            for (&(k, l), b) in &other.coeffs {
                let e = coeffs.entry((i + k, j + l)).or_default();
                *e = e.add(&a.mul(b));
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        SymbolPoly {
            degree: self.degree + other.degree,
            coeffs,
        }
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, t| acc * (n - t) as i64 / (t + 1) as i64)
}

impl Lpdo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Expr::one())
    }

    /// Zero-order operator: multiplication by `c`.
    pub fn scalar(c: Expr) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn dx() -> Self {
        Self::monomial(1, 0, Expr::one())
    }

    pub fn dy() -> Self {
        Self::monomial(0, 1, Expr::one())
    }

    /// `c * Dx^i * Dy^j`.
    pub fn monomial(i: u32, j: u32, c: Expr) -> Self {
        let mut op = Lpdo::zero();
        op.add_term(i, j, c);
        op
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Expr)>>(terms: I) -> Self {
        let mut op = Lpdo::zero();
        for ((i, j), c) in terms {
            op.add_term(i, j, c);
        }
        op
    }

    pub fn parse(text: &str) -> Result<Lpdo, LpdoError> {
        let term = Term::parse_operator(text).map_err(ExprError::from)?;
        from_term(&term)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Expr {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&(u32, u32), &Expr)> {
        self.coeffs.iter()
    }

    /// Highest total order, `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.keys().map(|(i, j)| i + j).max()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Expr) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry((i, j)).or_default();
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn add(&self, other: &Lpdo) -> Lpdo {
        let mut out = self.clone();
        for (&(i, j), c) in &other.coeffs {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Lpdo {
        Lpdo {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Lpdo) -> Lpdo {
        self.add(&other.neg())
    }

    /// Left multiplication by a function: `c ∘ self`.
    pub fn scale(&self, c: &Expr) -> Lpdo {
        Lpdo::from_terms(self.coeffs.iter().map(|(k, a)| (*k, c.mul(a))))
    }

    /// Composition `self ∘ other`, by the Leibniz rule
    /// `Dx^i Dy^j ∘ f = Σ C(i,k) C(j,l) (∂x^k ∂y^l f) Dx^(i-k) Dy^(j-l)`.
    pub fn compose(&self, other: &Lpdo) -> Lpdo {
        let mut out = Lpdo::zero();
        let mut derivs: BTreeMap<((u32, u32), (u32, u32)), Expr> = BTreeMap::new();
        for (&(i, j), a) in &self.coeffs {
            for (&(k, l), b) in &other.coeffs {
                for s in 0..=i {
                    for t in 0..=j {
                        let db = derivs
                            .entry(((k, l), (s, t)))
                            .or_insert_with(|| b.diff_xy(s, t))
                            .clone();
                        if db.is_zero() {
                            continue;
                        }
                        let weight = binomial(i, s) * binomial(j, t);
                        let c = a.mul(&db).mul(&Expr::integer(weight));
                        out.add_term(i - s + k, j - t + l, c);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Lpdo {
        (0..k).fold(Lpdo::one(), |acc, _| acc.compose(self))
    }

    pub fn symbol(&self) -> Result<SymbolPoly, LpdoError> {
        let degree = self.order().ok_or(LpdoError::ZeroOperator)?;
        Ok(SymbolPoly {
            degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|((i, j), _)| i + j == degree)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        })
    }

    /// Gauge conjugation `exp(-α) ∘ self ∘ exp(α)`.
    ///
    /// Uses `exp(-α) ∘ Dx ∘ exp(α) = Dx + α_x` (and likewise for `Dy`), so
    /// only jets of `α` enter the coefficients.
    pub fn gauge(&self, alpha: &Expr) -> Lpdo {
        let gx = Lpdo::dx().add(&Lpdo::scalar(alpha.dx()));
        let gy = Lpdo::dy().add(&Lpdo::scalar(alpha.dy()));
        let mut x_pows = vec![Lpdo::one()];
        let mut y_pows = vec![Lpdo::one()];
        let mut out = Lpdo::zero();
        for (&(i, j), c) in &self.coeffs {
            while x_pows.len() <= i as usize {
                let next = x_pows.last().expect("non-empty").compose(&gx);
                x_pows.push(next);
            }
            while y_pows.len() <= j as usize {
                let next = y_pows.last().expect("non-empty").compose(&gy);
                y_pows.push(next);
            }
            let shifted = x_pows[i as usize].compose(&y_pows[j as usize]);
            out = out.add(&shifted.scale(c));
        }
        out
    }

    /// Applies the operator to a function.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.coeffs
            .iter()
            .fold(Expr::zero(), |acc, (&(i, j), c)| acc.add(&c.mul(&f.diff_xy(i, j))))
    }

    /// Coefficients as canonical strings, for JSON.
    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.coeffs
            .iter()
            .rev()
            .map(|(&(dx, dy), c)| TermJson {
                dx,
                dy,
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[TermJson]) -> Lpdo {
        Lpdo::from_terms(terms.iter().map(|t| ((t.dx, t.dy), t.coeff.clone())))
    }
}

/// `Σ cᵢ · Opᵢ` with each `cᵢ` multiplied on the left.
pub fn linear_combine(ops: &[(Expr, Lpdo)]) -> Lpdo {
    ops.iter()
        .fold(Lpdo::zero(), |acc, (c, op)| acc.add(&op.scale(c)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub dx: u32,
    pub dy: u32,
    pub coeff: Expr,
}

#[derive(Serialize, Deserialize)]
struct LpdoJson {
    terms: Vec<TermJson>,
}

impl Serialize for Lpdo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LpdoJson {
            terms: self.to_json_terms(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lpdo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = LpdoJson::deserialize(d)?;
        Ok(Lpdo::from_json_terms(&j.terms))
    }
}

fn from_term(t: &Term) -> Result<Lpdo, LpdoError> {
    Ok(match t {
        Term::Dx => Lpdo::dx(),
        Term::Dy => Lpdo::dy(),
        Term::Add(a, b) => from_term(a)?.add(&from_term(b)?),
        Term::Sub(a, b) => from_term(a)?.sub(&from_term(b)?),
        Term::Neg(a) => from_term(a)?.neg(),
        Term::Mul(a, b) => from_term(a)?.compose(&from_term(b)?),
        Term::Div(a, b) => {
            let den = from_term(b)?;
            if den.order().unwrap_or(0) > 0 {
                return Err(LpdoError::DivisionByOperator);
            }
            let inv = den.coeff(0, 0).recip()?;
            let num = from_term(a)?;
            if inv.is_constant() || num.order().unwrap_or(0) == 0 {
                num.scale(&inv)
            } else {
                return Err(LpdoError::DivisionByOperator);
            }
        }
        Term::Pow(a, k) => {
            let base = from_term(a)?;
            if base.order().unwrap_or(0) == 0 {
                Lpdo::scalar(base.coeff(0, 0).pow(*k)?)
            } else if *k < 0 {
                return Err(LpdoError::DivisionByOperator);
            } else {
                base.pow(*k as u32)
            }
        }
        Term::Exp(a) | Term::Ln(a) | Term::Diff(a, _) => {
            if contains_operator(a) {
                return Err(LpdoError::OperatorInKernel(match t {
                    Term::Exp(_) => "exp",
                    Term::Ln(_) => "ln",
                    _ => "diff",
                }));
            }
            Lpdo::scalar(normalize(t)?)
        }
        other => Lpdo::scalar(normalize(other)?),
    })
}

fn contains_operator(t: &Term) -> bool {
    match t {
        Term::Dx | Term::Dy => true,
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
            contains_operator(a) || contains_operator(b)
        }
        Term::Neg(a) | Term::Pow(a, _) | Term::Exp(a) | Term::Ln(a) | Term::Diff(a, _) => {
            contains_operator(a)
        }
        _ => false,
    }
}

impl std::str::FromStr for Lpdo {
    type Err = LpdoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lpdo::parse(s)
    }
}

/// Operator text: `coeff*Dx^i*Dy^j` terms, highest multi-index first.
impl fmt::Display for Lpdo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by(|((i1, j1), _), ((i2, j2), _)| (i2 + j2, i2).cmp(&(i1 + j1, i1)));
        for (n, (&(i, j), c)) in terms.into_iter().enumerate() {
            let mut d = Vec::new();
            match i {
                0 => {}
                1 => d.push("Dx".to_string()),
                _ => d.push(format!("Dx^{i}")),
            }
            match j {
                0 => {}
                1 => d.push("Dy".to_string()),
                _ => d.push(format!("Dy^{j}")),
            }
            let cs = c.to_string();
            let (negative, body) = if c.num().len() == 1 && c.num().leading_sign() < 0 {
                (true, c.neg().to_string())
            } else {
                (false, cs)
            };
            if n == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let simple = !body.contains(' ') && !body.contains('/');
            let coeff = if simple { body } else { format!("({body})") };
            if d.is_empty() {
                f.write_str(&coeff)?;
            } else if coeff == "1" {
                f.write_str(&d.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", d.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> Lpdo {
        s.parse().unwrap()
    }

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn leibniz_composition() {
        assert_eq!(Lpdo::dx().compose(&Lpdo::scalar(Expr::x())), op("x*Dx + 1"));
        assert_eq!(
            op("Dy + y").compose(&op("Dx + x")),
            op("Dx*Dy + y*Dx + x*Dy + x*y")
        );
        assert_eq!(Lpdo::dx().compose(&Lpdo::dy()), op("Dx*Dy"));
    }

    #[test]
    fn operator_text_uses_composition() {
        assert_eq!(op("Dx*x"), op("x*Dx + 1"));
        assert_eq!(op("(Dx + Dy)/2"), op("1/2*Dx + 1/2*Dy"));
        assert_eq!(op("Dx^2"), Lpdo::monomial(2, 0, Expr::one()));
        assert!(matches!(
            Lpdo::parse("1/Dx"),
            Err(LpdoError::DivisionByOperator)
        ));
        assert!(matches!(
            Lpdo::parse("exp(Dx)"),
            Err(LpdoError::OperatorInKernel("exp"))
        ));
    }

    #[test]
    fn linear_combinations() {
        let c = linear_combine(&[(Expr::one(), Lpdo::dx()), (Expr::integer(-1), Lpdo::dx())]);
        assert!(c.is_zero());
        let l = op("Dx*Dy");
        let m = op("Dx - Dy");
        assert_eq!(
            linear_combine(&[(Expr::one(), l), (Expr::one(), m)]),
            op("Dx*Dy + Dx - Dy")
        );
        assert_eq!(
            linear_combine(&[(Expr::integer(2), op("Dx + q*Dy"))]),
            op("2*Dx + 2*q*Dy")
        );
    }

    #[test]
    fn symbols() {
        let s = op("Dx*Dy + a*Dx").symbol().unwrap();
        assert_eq!(s.degree(), 2);
        assert_eq!(s.coeff(1, 1), Expr::one());
        assert_eq!(s.terms().count(), 1);
        let s = op("Dx + q*Dy + r").symbol().unwrap();
        assert_eq!(s.coeff(1, 0), Expr::one());
        assert_eq!(s.coeff(0, 1), e("q"));
        let s = op("Dx^2 + 3").symbol().unwrap();
        assert_eq!(s.coeff(2, 0), Expr::one());
        assert_eq!(Lpdo::zero().symbol(), Err(LpdoError::ZeroOperator));
    }

    #[test]
    fn gauge_examples() {
        let alpha = e("alpha");
        assert_eq!(Lpdo::dx().gauge(&alpha), op("Dx + alpha_x"));
        assert_eq!(
            op("Dx*Dy").gauge(&alpha),
            op("Dx*Dy + alpha_y*Dx + alpha_x*Dy + alpha_xy + alpha_x*alpha_y")
        );
        assert_eq!(
            op("Dx + q*Dy + r").gauge(&alpha),
            op("Dx + q*Dy + r + alpha_x + q*alpha_y")
        );
    }

    #[test]
    fn gauge_matches_conjugation_by_exp() {
        // exp(-α) ∘ A ∘ exp(α), composed literally with kernel coefficients.
        let alpha = e("x*y + y^2");
        let a = op("Dx^2*Dy + q*Dy^2 + a*Dx + c");
        let g = Lpdo::scalar(alpha.exp());
        let ginv = Lpdo::scalar(alpha.neg().exp());
        assert_eq!(ginv.compose(&a).compose(&g), a.gauge(&alpha));
    }

    #[test]
    fn apply_examples() {
        assert!(op("Dx*Dy").apply(&e("x + y")).is_zero());
        assert_eq!(op("Dx - Dy").apply(&e("x*y")), e("y - x"));
        assert_eq!(op("Dx*Dy + a*Dx + b*Dy + c").apply(&Expr::one()), e("c"));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "Dx*Dy + y*Dx + x*Dy + (x*y + 1)",
            "-Dx + Dy",
            "Dx - y/x*Dy",
            "(a + b)*Dx^2*Dy - 1/2*Dy^2 + exp(x)",
            "0",
        ] {
            let o = op(s);
            assert_eq!(op(&o.to_string()), o, "{s} printed as {o}");
        }
        assert_eq!(op("Dx*Dy + y*Dx + x*Dy + (x*y+1)").to_string(), "Dx*Dy + y*Dx + x*Dy + (x*y + 1)");
    }

    #[test]
    fn json_shape() {
        let o = op("Dx - Dy + x");
        let v = serde_json::to_value(&o).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"terms":[
                {"dx":1,"dy":0,"coeff":"1"},
                {"dx":0,"dy":1,"coeff":"-1"},
                {"dx":0,"dy":0,"coeff":"x"}
            ]})
        );
        let back: Lpdo = serde_json::from_value(v).unwrap();
        assert_eq!(back, o);
    }
}
