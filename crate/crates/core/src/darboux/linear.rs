//! Gaussian elimination for affine systems with expression coefficients.

use crate::expr::{Expr, ExprError};

/// One equation `constant + Σ coeffs[k] * u_k = 0`.
#[derive(Clone, Debug)]
pub(crate) struct Row<K> {
    pub key: K,
    pub coeffs: Vec<Expr>,
    pub constant: Expr,
}

pub(crate) struct Solution<K> {
    pub values: Vec<Expr>,
    /// Reduced constants of the rows that did not receive a pivot, in input order.
    pub residuals: Vec<(K, Expr)>,
}

/// Rows are processed in the given order; each row takes as pivot the first
/// unknown (in index order) that still has a nonzero coefficient after the
/// earlier pivots are eliminated. Unknowns that never get a pivot are set
/// to zero.
pub(crate) fn solve<K: Clone>(rows: Vec<Row<K>>, unknowns: usize) -> Result<Solution<K>, ExprError> {
    let mut pivots: Vec<(usize, Row<K>)> = Vec::new();
    let mut residuals = Vec::new();
    for mut row in rows {
        for (p, prow) in &pivots {
            let f = row.coeffs[*p].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..unknowns {
                row.coeffs[k] = row.coeffs[k].sub(&f.mul(&prow.coeffs[k]));
            }
            row.constant = row.constant.sub(&f.mul(&prow.constant));
        }
        match (0..unknowns).find(|&k| !row.coeffs[k].is_zero()) {
            Some(p) => {
                let inv = row.coeffs[p].recip()?;
                for c in row.coeffs.iter_mut() {
                    *c = c.mul(&inv);
                }
                row.constant = row.constant.mul(&inv);
                pivots.push((p, row));
            }
            None => residuals.push((row.key, row.constant)),
        }
    }
    let mut values = vec![Expr::zero(); unknowns];
    for (p, row) in pivots.iter().rev() {
        let mut v = row.constant.neg();
        for k in 0..unknowns {
            if k != *p && !row.coeffs[k].is_zero() {
                v = v.sub(&row.coeffs[k].mul(&values[k]));
            }
        }
        values[*p] = v;
    }
    Ok(Solution { values, residuals })
}
