//! Gauge and gauged-evolution invariants of pairs `(L, M)`, and the
//! existence conditions written in terms of them.

use serde::{Deserialize, Serialize};

use crate::darboux::{DarbouxError, FirstOrderM, HyperbolicL};
use crate::expr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("q is identically zero")]
    ZeroQ,
    #[error("degenerate z: {0}")]
    DegenerateZ(&'static str),
    #[error(transparent)]
    Darboux(#[from] DarbouxError),
}

type Result<T> = std::result::Result<T, InvariantError>;

/// `(q, m, h, R)` with `m = a_x − b_y`, `h = ab − c + a_x`, `R = r − b − qa`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeInvariants {
    pub q: Expr,
    pub m: Expr,
    pub h: Expr,
    #[serde(rename = "R")]
    pub r: Expr,
}

/// `(q, I2, I3)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionInvariants {
    pub q: Expr,
    #[serde(rename = "I2")]
    pub i2: Expr,
    #[serde(rename = "I3")]
    pub i3: Expr,
}

fn nonzero(e: &Expr) -> bool {
    !e.zero_test().zero
}

fn require_q(q: &Expr) -> Result<()> {
    if nonzero(q) {
        Ok(())
    } else {
        Err(InvariantError::ZeroQ)
    }
}

/// Division by an expression already known to be nonzero.
fn over(n: &Expr, d: &Expr) -> Expr {
    n.div(d).expect("nonzero divisor")
}

pub fn gauge_invariants(l: &HyperbolicL, m: &FirstOrderM) -> GaugeInvariants {
    let (h, k) = laplace_invariants(l);
    GaugeInvariants {
        q: m.q.clone(),
        m: h.sub(&k),
        h,
        r: m.r.sub(&l.b).sub(&m.q.mul(&l.a)),
    }
}

/// `(h, k) = (ab − c + a_x, ab − c + b_y)`.
pub fn laplace_invariants(l: &HyperbolicL) -> (Expr, Expr) {
    let base = l.a.mul(&l.b).sub(&l.c);
    (base.add(&l.a.dx()), base.add(&l.b.dy()))
}

/// Gauges both operators by `exp(α)` and then replaces `L` by `L + β M`.
pub fn gauged_evolution(
    l: &HyperbolicL,
    m: &FirstOrderM,
    alpha: &Expr,
    beta: &Expr,
) -> (HyperbolicL, FirstOrderM) {
    let lg = l.to_lpdo().gauge(alpha);
    let mg = m.to_lpdo().gauge(alpha);
    let l1 = lg.add(&mg.scale(beta));
    (
        HyperbolicL::from_lpdo(&l1).expect("gauge keeps the hyperbolic form"),
        FirstOrderM::from_lpdo(&mg).expect("gauge keeps the first-order form"),
    )
}

/// Builds `(I2, I3)` from gauge invariants.
pub fn evolution_from_gauge(g: &GaugeInvariants) -> Result<EvolutionInvariants> {
    require_q(&g.q)?;
    let rq_x = over(&g.r, &g.q).dx();
    let i2 = g.m.mul(&Expr::integer(2)).sub(&g.r.dy()).add(&rq_x);
    let i3 = g
        .h
        .mul(&Expr::integer(2))
        .add(&rq_x)
        .sub(&over(&g.r.mul(&g.r), &g.q.mul(&Expr::integer(2))));
    Ok(EvolutionInvariants {
        q: g.q.clone(),
        i2,
        i3,
    })
}

pub fn evolution_invariants(l: &HyperbolicL, m: &FirstOrderM) -> Result<EvolutionInvariants> {
    evolution_from_gauge(&gauge_invariants(l, m))
}

/// `(Q_x, Q_xy, Q_xxy)` for `Q = ln q`, as rational functions of the jets of `q`.
fn log_jets(q: &Expr) -> (Expr, Expr, Expr) {
    let qx = over(&q.dx(), q);
    let qxy = qx.dy();
    let qxxy = qxy.dx();
    (qx, qxy, qxxy)
}

/// `I3_x + q I3_y + (q_y − q_x/q) I3 − Q_x Q_xy + Q_xxy` with `Q = ln q`.
pub fn i3_residual(q: &Expr, i3: &Expr) -> Result<Expr> {
    require_q(q)?;
    let (lx, lxy, lxxy) = log_jets(q);
    let coeff = q.dy().sub(&over(&q.dx(), q));
    Ok(i3.dx()
        .add(&q.mul(&i3.dy()))
        .add(&coeff.mul(i3))
        .sub(&lx.mul(&lxy))
        .add(&lxxy))
}

/// `(I2 + Q_xy, i3_residual(q, I3))`; both vanish iff a transformation exists.
pub fn invariant_conditions(inv: &EvolutionInvariants) -> Result<(Expr, Expr)> {
    require_q(&inv.q)?;
    let (_, lxy, _) = log_jets(&inv.q);
    Ok((inv.i2.add(&lxy), i3_residual(&inv.q, &inv.i3)?))
}

/// The existence system written in gauge invariants: `(Ω, second)`.
pub fn reduced_conditions(q: &Expr, r: &Expr, h: &Expr, m: &Expr) -> (Expr, Expr) {
    let (qx, qy, qxy) = (q.dx(), q.dy(), q.diff_xy(1, 1));
    let q2 = q.mul(q);
    let omega = q2.mul(m).mul(&Expr::integer(-2))
        + q2.mul(&r.dy())
        + qx.mul(r)
        + qy.mul(&qx)
        - q.mul(&r.dx())
        - qxy.mul(q);
    let second = qx.mul(h) - q.mul(&h.dx()) - q2.mul(&h.dy()) - qx.mul(m)
        + qx.mul(&r.dy())
        + q.mul(&m.dx())
        - q.mul(&r.diff_xy(1, 1))
        - qy.mul(q).mul(h)
        - q.mul(r).mul(m)
        + q.mul(r).mul(&r.dy());
    (omega, second)
}

fn z_jets(z: &Expr) -> Result<(Expr, Expr)> {
    let (zx, zy) = (z.dx(), z.dy());
    if !nonzero(&zx) {
        return Err(InvariantError::DegenerateZ("z_x vanishes"));
    }
    if !nonzero(&zy) {
        return Err(InvariantError::DegenerateZ("z_y vanishes"));
    }
    Ok((zx, zy))
}

/// `−z_xxy/z_x + z_xx z_xy/z_x² + z_xy²/(2 z_x z_y)`.
pub fn i30(z: &Expr) -> Result<Expr> {
    let (zx, zy) = z_jets(z)?;
    let (zxx, zxy, zxxy) = (z.diff_xy(2, 0), z.diff_xy(1, 1), z.diff_xy(2, 1));
    Ok(over(&zxxy, &zx).neg()
        + over(&zxx.mul(&zxy), &zx.mul(&zx))
        + over(&zxy.mul(&zxy), &zx.mul(&zy).mul(&Expr::integer(2))))
}

/// `q = −z_x/z_y`, `I2 = B_y − A_x`, `I3 = −A_x + AB/2` with
/// `A = z_xy/z_x`, `B = z_xy/z_y`.
pub fn wronskian_invariants(z: &Expr) -> Result<EvolutionInvariants> {
    let (zx, zy) = z_jets(z)?;
    let zxy = z.diff_xy(1, 1);
    let a = over(&zxy, &zx);
    let b = over(&zxy, &zy);
    Ok(EvolutionInvariants {
        q: over(&zx, &zy).neg(),
        i2: b.dy().sub(&a.dx()),
        i3: a.mul(&b).mul(&Expr::ratio(1, 2)).sub(&a.dx()),
    })
}
