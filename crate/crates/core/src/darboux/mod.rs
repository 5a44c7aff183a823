//! Darboux transformations `N ∘ L = L1 ∘ M` for `L = DxDy + aDx + bDy + c`.

mod linear;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::expr::{Expr, ExprError, Var};
use crate::lpdo::{Lpdo, LpdoError, TermJson};

use linear::Row;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DarbouxError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Lpdo(#[from] LpdoError),
    #[error("not of the form Dx*Dy + a*Dx + b*Dy + c: {0}")]
    NotHyperbolic(String),
    #[error("not of the form Dx + q*Dy + r: {0}")]
    NotFirstOrder(String),
    #[error("q is identically zero")]
    ZeroQ,
    #[error("solution {index} is not in the kernel of L: L(psi) = {residual}")]
    NotInKernel { index: usize, residual: String },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("expected {expected} solutions, got {got}")]
    SolutionCount { expected: usize, got: usize },
    #[error("chaining mismatch: the second transformation starts at {found}, expected {expected}")]
    ChainingMismatch { expected: String, found: String },
    #[error("cannot scale by an expression that is identically zero")]
    ZeroScale,
    #[error("reconstructed invariants {found} differ from the targets {expected}")]
    ReconstructionMismatch { expected: String, found: String },
}

type Result<T> = std::result::Result<T, DarbouxError>;

fn nonzero(e: &Expr) -> bool {
    !e.zero_test().zero
}

/// `Dx*Dy + a*Dx + b*Dy + c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicL {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
}

impl HyperbolicL {
    pub fn new(a: Expr, b: Expr, c: Expr) -> Self {
        HyperbolicL { a, b, c }
    }

    /// `Dx*Dy`.
    pub fn plain() -> Self {
        Self::new(Expr::zero(), Expr::zero(), Expr::zero())
    }

    /// Coefficients named by the jet symbols `a`, `b`, `c`.
    pub fn generic() -> Self {
        Self::new(Expr::symbol("a"), Expr::symbol("b"), Expr::symbol("c"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_lpdo(&Lpdo::parse(text)?)
    }

    pub fn to_lpdo(&self) -> Lpdo {
        Lpdo::from_terms([
            ((1, 1), Expr::one()),
            ((1, 0), self.a.clone()),
            ((0, 1), self.b.clone()),
            ((0, 0), self.c.clone()),
        ])
    }

    pub fn from_lpdo(op: &Lpdo) -> Result<Self> {
        let allowed = [(1, 1), (1, 0), (0, 1), (0, 0)];
        if !op.coeff(1, 1).is_one() || op.terms().any(|(k, _)| !allowed.contains(k)) {
            return Err(DarbouxError::NotHyperbolic(op.to_string()));
        }
        Ok(Self::new(op.coeff(1, 0), op.coeff(0, 1), op.coeff(0, 0)))
    }

    pub fn apply(&self, f: &Expr) -> Expr {
        self.to_lpdo().apply(f)
    }
}

/// `Dx + q*Dy + r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstOrderM {
    pub q: Expr,
    pub r: Expr,
}

impl FirstOrderM {
    pub fn new(q: Expr, r: Expr) -> Self {
        FirstOrderM { q, r }
    }

    pub fn generic() -> Self {
        Self::new(Expr::symbol("q"), Expr::symbol("r"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_lpdo(&Lpdo::parse(text)?)
    }

    pub fn to_lpdo(&self) -> Lpdo {
        Lpdo::from_terms([
            ((1, 0), Expr::one()),
            ((0, 1), self.q.clone()),
            ((0, 0), self.r.clone()),
        ])
    }

    pub fn from_lpdo(op: &Lpdo) -> Result<Self> {
        let allowed = [(1, 0), (0, 1), (0, 0)];
        if !op.coeff(1, 0).is_one() || op.terms().any(|(k, _)| !allowed.contains(k)) {
            return Err(DarbouxError::NotFirstOrder(op.to_string()));
        }
        Ok(Self::new(op.coeff(0, 1), op.coeff(0, 0)))
    }
}

/// A triple `(M, N, L1)` for `L` together with the leftover equations of
/// the construction. When every residual vanishes, `N ∘ L = L1 ∘ M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxWitness {
    pub l: HyperbolicL,
    pub m: Lpdo,
    pub n: Lpdo,
    pub l1: HyperbolicL,
    pub residuals: Vec<Expr>,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    #[serde(rename = "L")]
    l: HyperbolicL,
    #[serde(rename = "M")]
    m: Vec<TermJson>,
    #[serde(rename = "N")]
    n: Vec<TermJson>,
    #[serde(rename = "L1")]
    l1: HyperbolicL,
    residuals: Vec<Expr>,
}

impl Serialize for DarbouxWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessJson {
            l: self.l.clone(),
            m: self.m.to_json_terms(),
            n: self.n.to_json_terms(),
            l1: self.l1.clone(),
            residuals: self.residuals.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DarbouxWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WitnessJson::deserialize(d)?;
        Ok(DarbouxWitness {
            l: j.l,
            m: Lpdo::from_json_terms(&j.m),
            n: Lpdo::from_json_terms(&j.n),
            l1: j.l1,
            residuals: j.residuals,
        })
    }
}

impl DarbouxWitness {
    /// `M = 1`, `N = 1`, `L1 = L`.
    pub fn identity(l: &HyperbolicL) -> Self {
        DarbouxWitness {
            l: l.clone(),
            m: Lpdo::one(),
            n: Lpdo::one(),
            l1: l.clone(),
            residuals: Vec::new(),
        }
    }

    /// `N ∘ L − L1 ∘ M`.
    pub fn defect(&self) -> Lpdo {
        self.n
            .compose(&self.l.to_lpdo())
            .sub(&self.l1.to_lpdo().compose(&self.m))
    }

    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(|r| !nonzero(r))
    }

    /// Exact intertwining plus the symbol conditions.
    pub fn is_valid(&self) -> bool {
        let same_symbol = match (self.n.symbol(), self.m.symbol()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
        same_symbol && self.defect().is_zero()
    }
}

/// `π_L(M)`: removes every mixed derivative `Dx^i Dy^j` (`i, j ≥ 1`) by
/// subtracting left multiples of `L`, largest total degree first and larger
/// `i` first among equal degrees.
pub fn reduce_mixed(l: &HyperbolicL, m: &Lpdo) -> Lpdo {
    let lop = l.to_lpdo();
    let mut out = m.clone();
    loop {
        let next = out
            .terms()
            .filter(|((i, j), _)| *i >= 1 && *j >= 1)
            .map(|(&(i, j), c)| ((i + j, i), j, c.clone()))
            .max_by(|a, b| a.0.cmp(&b.0));
        let Some(((_, i), j, c)) = next else {
            return out;
        };
        let shift = Lpdo::monomial(i - 1, j - 1, c).compose(&lop);
        out = out.sub(&shift);
    }
}

/// Largest powers of `Dx` and `Dy` in `π_L(M)`.
pub fn bidegree(l: &HyperbolicL, m: &Lpdo) -> Result<(u32, u32)> {
    let r = reduce_mixed(l, m);
    if r.is_zero() {
        return Err(LpdoError::ZeroOperator.into());
    }
    let mi = r.terms().map(|((i, _), _)| *i).max().unwrap_or(0);
    let nj = r.terms().map(|((_, j), _)| *j).max().unwrap_or(0);
    Ok((mi, nj))
}

/// `M + A ∘ L`.
pub fn expand(m: &Lpdo, a: &Lpdo, l: &HyperbolicL) -> Lpdo {
    m.add(&a.compose(&l.to_lpdo()))
}

const A1: usize = 0;
const B1: usize = 1;
const N0: usize = 2;
const C1: usize = 3;

/// Matches `N ∘ L = L1 ∘ M` for a first-order `M` with `N` sharing the
/// symbol of `M` and an unknown free term. Rows are ordered by decreasing
/// total degree, then decreasing power of `Dx`.
fn match_first_order(
    l: &HyperbolicL,
    m: &Lpdo,
) -> Result<(Lpdo, HyperbolicL, Vec<((u32, u32), Expr)>)> {
    let lop = l.to_lpdo();
    let top = Lpdo::from_terms(
        m.terms()
            .filter(|((i, j), _)| i + j == 1)
            .map(|(k, c)| (*k, c.clone())),
    );
    let d0 = top.compose(&lop).sub(&Lpdo::monomial(1, 1, Expr::one()).compose(m));
    let parts = [
        Lpdo::dx().compose(m).neg(),
        Lpdo::dy().compose(m).neg(),
        lop.clone(),
        m.neg(),
    ];
    let mut keys: BTreeSet<(u32, u32)> = (0..=2)
        .flat_map(|i| (0..=2 - i).map(move |j| (i, j)))
        .collect();
    keys.extend(d0.terms().map(|(k, _)| *k));
    for p in &parts {
        keys.extend(p.terms().map(|(k, _)| *k));
    }
    let mut keys: Vec<_> = keys.into_iter().collect();
    keys.sort_by(|(i1, j1), (i2, j2)| (i2 + j2, i2).cmp(&(i1 + j1, i1)));
    let rows = keys
        .into_iter()
        .map(|(i, j)| Row {
            key: (i, j),
            coeffs: parts.iter().map(|p| p.coeff(i, j)).collect(),
            constant: d0.coeff(i, j),
        })
        .collect();
    let sol = linear::solve(rows, 4)?;
    let v = sol.values;
    let n = top.add(&Lpdo::scalar(v[N0].clone()));
    let l1 = HyperbolicL::new(v[A1].clone(), v[B1].clone(), v[C1].clone());
    Ok((n, l1, sol.residuals))
}

/// Laplace transformation: `M = Dy + a` for direction `x`, `M = Dx + b`
/// for direction `y`.
pub fn laplace(l: &HyperbolicL, direction: Var) -> Result<DarbouxWitness> {
    let m = match direction {
        Var::X => Lpdo::dy().add(&Lpdo::scalar(l.a.clone())),
        Var::Y => Lpdo::dx().add(&Lpdo::scalar(l.b.clone())),
    };
    let (n, l1, residuals) = match_first_order(l, &m)?;
    if let Some((_, r)) = residuals.iter().find(|(_, r)| nonzero(r)) {
        return Err(DarbouxError::Degenerate(format!(
            "Laplace matching left residual {r}"
        )));
    }
    Ok(DarbouxWitness {
        l: l.clone(),
        m,
        n,
        l1,
        residuals: Vec::new(),
    })
}

/// Rescaling by a unit `p`: `M' = p M`, `N' = p N`, `L1' = p ∘ L1 ∘ p⁻¹`.
pub fn left_scale(w: &DarbouxWitness, p: &Expr) -> Result<DarbouxWitness> {
    if !nonzero(p) {
        return Err(DarbouxError::ZeroScale);
    }
    let pinv = p.recip()?;
    let l1 = Lpdo::scalar(p.clone())
        .compose(&w.l1.to_lpdo())
        .compose(&Lpdo::scalar(pinv));
    Ok(DarbouxWitness {
        l: w.l.clone(),
        m: w.m.scale(p),
        n: w.n.scale(p),
        l1: HyperbolicL::from_lpdo(&l1)?,
        residuals: w.residuals.iter().map(|r| r.mul(p)).collect(),
    })
}

/// Chains `w1: L → L1` with `w2: L1 → L2`. Residuals are the nonzero
/// coefficients of the composed intertwining defect.
pub fn compose_dt(w1: &DarbouxWitness, w2: &DarbouxWitness) -> Result<DarbouxWitness> {
    if w2.l != w1.l1 {
        return Err(DarbouxError::ChainingMismatch {
            expected: w1.l1.to_lpdo().to_string(),
            found: w2.l.to_lpdo().to_string(),
        });
    }
    let mut out = DarbouxWitness {
        l: w1.l.clone(),
        m: w2.m.compose(&w1.m),
        n: w2.n.compose(&w1.n),
        l1: w2.l1.clone(),
        residuals: Vec::new(),
    };
    out.residuals = out.defect().terms().map(|(_, c)| c.clone()).collect();
    Ok(out)
}

fn check_kernel(l: &HyperbolicL, solutions: &[Expr]) -> Result<()> {
    for (index, psi) in solutions.iter().enumerate() {
        let r = l.apply(psi);
        if nonzero(&r) {
            return Err(DarbouxError::NotInKernel {
                index,
                residual: r.to_string(),
            });
        }
    }
    Ok(())
}

fn det(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Expr::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let t = m[0][col].mul(&det(&minor(m, col)));
                acc = if col % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

/// Drops the first row and the given column.
fn minor(m: &[Vec<Expr>], col: usize) -> Vec<Vec<Expr>> {
    m[1..]
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(k, _)| *k != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// `ψ ↦ W_{m,n}(ψ, ψ_1, …, ψ_{m+n})`, the determinant with rows
/// `(f, Dx f, …, Dx^m f, Dy f, …, Dy^n f)` for `f = ψ, ψ_1, …`, expanded
/// along the first row.
///
/// The input counts as degenerate when the coefficient of `Dx^m` (for
/// `m > 0`) or of `Dy^n` (for `n > 0`) vanishes.
pub fn wronskian_mn(l: &HyperbolicL, solutions: &[Expr], m: u32, n: u32) -> Result<Lpdo> {
    let size = (m + n) as usize;
    if solutions.len() != size {
        return Err(DarbouxError::SolutionCount {
            expected: size,
            got: solutions.len(),
        });
    }
    check_kernel(l, solutions)?;
    let cols: Vec<(u32, u32)> = std::iter::once((0, 0))
        .chain((1..=m).map(|i| (i, 0)))
        .chain((1..=n).map(|j| (0, j)))
        .collect();
    let mut rows = vec![vec![Expr::zero(); cols.len()]];
    for psi in solutions {
        rows.push(cols.iter().map(|&(i, j)| psi.diff_xy(i, j)).collect());
    }
    let mut out = Lpdo::zero();
    for (k, &(i, j)) in cols.iter().enumerate() {
        let cof = det(&minor(&rows, k));
        let cof = if k % 2 == 0 { cof } else { cof.neg() };
        out.add_term(i, j, cof);
    }
    let leading = [(m > 0).then_some((m, 0)), (n > 0).then_some((0, n))];
    for (i, j) in leading.into_iter().flatten() {
        if !nonzero(&out.coeff(i, j)) {
            return Err(DarbouxError::Degenerate(format!(
                "the coefficient of Dx^{i}*Dy^{j} vanishes"
            )));
        }
    }
    Ok(out)
}

/// The (1,1) Wronskian formula normalized so that the `Dx` coefficient is one.
pub fn darboux11(l: &HyperbolicL, psi1: &Expr, psi2: &Expr) -> Result<FirstOrderM> {
    check_kernel(l, &[psi1.clone(), psi2.clone()])?;
    let d = psi2.mul(&psi1.dy()).sub(&psi1.mul(&psi2.dy()));
    if !nonzero(&d) {
        return Err(DarbouxError::Degenerate(
            "psi1*psi2_y - psi2*psi1_y vanishes".into(),
        ));
    }
    let alpha = psi1.mul(&psi2.dx()).sub(&psi2.mul(&psi1.dx()));
    let beta = psi2.dy().mul(&psi1.dx()).sub(&psi2.dx().mul(&psi1.dy()));
    Ok(FirstOrderM::new(alpha.div(&d)?, beta.div(&d)?))
}

/// Unit factors `u_k` with `u_k * residual_k = E_k`, where `E_k` are the
/// published existence conditions.
pub fn residual_factors(q: &Expr) -> [Expr; 2] {
    [q.clone(), q.clone()]
}

/// Solves `N ∘ L = L1 ∘ M` by coefficient matching. The residuals are the
/// two equations left over (coefficients of `Dy` and of order zero),
/// multiplied by the unit factors of [`residual_factors`] so that they agree
/// with [`existence_conditions`].
pub fn solve_intertwining(l: &HyperbolicL, m: &FirstOrderM) -> Result<DarbouxWitness> {
    if !nonzero(&m.q) {
        return Err(DarbouxError::ZeroQ);
    }
    let mop = m.to_lpdo();
    let (n, l1, residuals) = match_first_order(l, &mop)?;
    let factors = residual_factors(&m.q);
    let mut out = Vec::new();
    for (key, r) in residuals {
        match key {
            (0, 1) => out.push(factors[0].mul(&r)),
            (0, 0) => out.push(factors[1].mul(&r)),
            _ if nonzero(&r) => {
                return Err(DarbouxError::Degenerate(format!(
                    "unexpected residual at Dx^{}*Dy^{}: {r}",
                    key.0, key.1
                )))
            }
            _ => {}
        }
    }
    Ok(DarbouxWitness {
        l: l.clone(),
        m: mop,
        n,
        l1,
        residuals: out,
    })
}

/// The two left-hand sides of the existence system for `(L, M)`.
pub fn existence_conditions(l: &HyperbolicL, m: &FirstOrderM) -> (Expr, Expr) {
    let (a, b, c) = (&l.a, &l.b, &l.c);
    let (q, r) = (&m.q, &m.r);
    let (qx, qy, qxy) = (q.dx(), q.dy(), q.diff_xy(1, 1));
    let q2 = q.mul(q);
    let e1 = q.mul(&r.dx()).neg()
        + q2.mul(&r.dy())
        + qx.mul(r)
        - b.mul(&qx)
        + b.dx().mul(q)
        + q2.mul(&(b.dy() - a.mul(&qy) - a.dx()))
        - q2.mul(q).mul(&a.dy())
        + qy.mul(&qx)
        - qxy.mul(q);
    let ar = a.mul(r);
    let e2 = c.mul(&qx).neg()
        + (c.sub(&ar)).mul(&qy).mul(q)
        + (ar.add(&r.dy())).mul(&qx)
        + (c.dy() - r.mul(&a.dy())).mul(&q2)
        + (r.mul(&r.dy()) - a.mul(&r.dx()) - r.dy().mul(b) - r.diff_xy(1, 1) - r.mul(&a.dx())
            + c.dx())
        .mul(q);
    (e1, e2)
}

/// `L'` with `L'(psi1) = L'(psi2) = 0` and free term `c`, from the 2×2
/// linear system in `a`, `b`.
pub fn hyperbolic_with_kernel(psi1: &Expr, psi2: &Expr, c: &Expr) -> Result<HyperbolicL> {
    let det = psi1.dx().mul(&psi2.dy()).sub(&psi1.dy().mul(&psi2.dx()));
    if !nonzero(&det) {
        return Err(DarbouxError::Degenerate(
            "psi1_x*psi2_y - psi1_y*psi2_x vanishes".into(),
        ));
    }
    // a*f_x + b*f_y = -(f_xy + c*f) for f = psi1, psi2.
    let rhs = |f: &Expr| f.diff_xy(1, 1).add(&c.mul(f)).neg();
    let (r1, r2) = (rhs(psi1), rhs(psi2));
    let a = r1.mul(&psi2.dy()).sub(&r2.mul(&psi1.dy())).div(&det)?;
    let b = psi1.dx().mul(&r2).sub(&psi2.dx().mul(&r1)).div(&det)?;
    Ok(HyperbolicL::new(a, b, c.clone()))
}

/// Builds a pair whose kernel contains `z1` and `z*z1` and whose gauge
/// invariant `R` equals `targets.r`; the free term `c` enters `R` affinely
/// and is solved for. The full invariant tuple is then checked against the
/// targets.
pub fn reconstruct_pair(
    targets: &crate::invariants::GaugeInvariants,
    z: &Expr,
    z1: &Expr,
) -> Result<(HyperbolicL, FirstOrderM)> {
    if z.dx().is_zero() && z.dy().is_zero() {
        return Err(DarbouxError::Degenerate("z is constant".into()));
    }
    if !nonzero(z1) {
        return Err(DarbouxError::Degenerate("z1 vanishes".into()));
    }
    let w = z.mul(z1);
    let r_at = |c: &Expr| -> Result<Expr> {
        let l = hyperbolic_with_kernel(z1, &w, c)?;
        let m = darboux11(&l, z1, &w)?;
        Ok(crate::invariants::gauge_invariants(&l, &m).r)
    };
    let r0 = r_at(&Expr::zero())?;
    let slope = r_at(&Expr::one())?.sub(&r0);
    if !nonzero(&slope) {
        return Err(DarbouxError::Degenerate(
            "R does not depend on the free term".into(),
        ));
    }
    let c0 = targets.r.sub(&r0).div(&slope)?;
    let l = hyperbolic_with_kernel(z1, &w, &c0)?;
    let m = darboux11(&l, z1, &w)?;
    let found = crate::invariants::gauge_invariants(&l, &m);
    if found != *targets {
        return Err(DarbouxError::ReconstructionMismatch {
            expected: serde_json::to_string(targets).unwrap_or_default(),
            found: serde_json::to_string(&found).unwrap_or_default(),
        });
    }
    Ok((l, m))
}

#[cfg(test)]
mod tests;
