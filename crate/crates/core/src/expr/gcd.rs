//! Multivariate polynomial GCD over Q.
//!
//! Polynomials are converted to a plain representation in which every atom
//! is an independent variable, except that exponentials along a common ray
//! share one variable. A common divisor found there maps back to a common
//! divisor of the original polynomials, so cancelling it is always sound.
//!
//! The driver strips monomial content and reduces through variables that
//! occur in only one argument. Coprime pairs are recognized from modular
//! univariate images; otherwise the modular algorithm runs, with a primitive
//! pseudo-remainder sequence as fallback.

mod modular;

use std::collections::BTreeMap;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::{Monomial, Poly};
use super::{Atom, Expr};

type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Plain {
    nvars: usize,
    terms: BTreeMap<Exps, BigRational>,
}

impl Plain {
    fn zero(nvars: usize) -> Self {
        Plain {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Plain::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    fn add_term(&mut self, e: Exps, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn sub(&self, other: &Plain) -> Plain {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    fn mul(&self, other: &Plain) -> Plain {
        let mut out = Plain::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    fn mul_term(&self, e: &[u32], c: &BigRational) -> Plain {
        let mut out = Plain::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let ee: Exps = e1.iter().zip(e).map(|(a, b)| a + b).collect();
            out.terms.insert(ee, c1 * c);
        }
        out
    }

    fn leading(&self) -> Option<(&Exps, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Scales so the lexicographically leading coefficient is one.
    fn monic(&self) -> Plain {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = lc.recip();
                Plain {
                    nvars: self.nvars,
                    terms: self.terms.iter().map(|(e, c)| (e.clone(), c * &inv)).collect(),
                }
            }
        }
    }

    fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    fn uses(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    fn min_exponents(&self) -> Exps {
        let mut mins: Option<Exps> = None;
        for e in self.terms.keys() {
            mins = Some(match mins {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        mins.unwrap_or_else(|| vec![0; self.nvars])
    }

    fn shift_down(&self, by: &[u32]) -> Plain {
        Plain {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients as a polynomial in variable `v`, keyed by degree.
    fn coefficients_in(&self, v: usize) -> BTreeMap<u32, Plain> {
        let mut out: BTreeMap<u32, Plain> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ee = e.clone();
            let d = ee[v];
            ee[v] = 0;
            out.entry(d)
                .or_insert_with(|| Plain::zero(self.nvars))
                .terms
                .insert(ee, c.clone());
        }
        out
    }

    fn coefficient_in(&self, v: usize, d: u32) -> Plain {
        let mut out = Plain::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == d {
                let mut ee = e.clone();
                ee[v] = 0;
                out.terms.insert(ee, c.clone());
            }
        }
        out
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    fn div_exact(&self, divisor: &Plain) -> Option<Plain> {
        let (lead_e, lead_c) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Plain::zero(self.nvars);
        while let Some((e, c)) = rem.leading() {
            if e.iter().zip(lead_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exps = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let qc = c / lead_c;
            for (de, dc) in &divisor.terms {
                let te: Exps = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
                rem.add_term(te, -(dc * &qc));
            }
            quot.add_term(qe, qc);
        }
        Some(quot)
    }
}

/// Pseudo-remainder of `a` by `b` as univariate polynomials in `v`.
fn pseudo_rem(a: &Plain, b: &Plain, v: usize) -> Plain {
    let db = b.degree_in(v);
    let lcb = b.coefficient_in(v, db);
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let dr = r.degree_in(v);
        if dr < db {
            return r;
        }
        let lcr = r.coefficient_in(v, dr);
        let mut shift = vec![0; r.nvars];
        shift[v] = dr - db;
        let lead_part = lcr.mul(&b.mul_term(&shift, &BigRational::one()));
        r = lcb.mul(&r).sub(&lead_part);
    }
}

fn content_in(p: &Plain, v: usize) -> Plain {
    let mut acc: Option<Plain> = None;
    for (_, c) in p.coefficients_in(v) {
        acc = Some(match acc {
            None => c.monic(),
            Some(g) => gcd(&g, &c),
        });
        if acc.as_ref().is_some_and(Plain::is_constant) {
            break;
        }
    }
    acc.unwrap_or_else(|| Plain::zero(p.nvars))
}

fn primitive_part(p: &Plain, v: usize) -> Plain {
    let c = content_in(p, v);
    if c.is_constant() {
        return p.monic();
    }
    p.div_exact(&c)
        .expect("content divides its polynomial")
        .monic()
}

fn gcd(a: &Plain, b: &Plain) -> Plain {
    let n = a.nvars;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Plain::constant(n, BigRational::one());
    }
    let ma = a.min_exponents();
    let mb = b.min_exponents();
    let mg: Exps = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let core = gcd_core(&a.shift_down(&ma), &b.shift_down(&mb));
    core.mul_term(&mg, &BigRational::one())
}

fn gcd_core(a: &Plain, b: &Plain) -> Plain {
    let n = a.nvars;
    if a.is_constant() || b.is_constant() {
        return Plain::constant(n, BigRational::one());
    }
    if a.terms.len() == 1 || b.terms.len() == 1 {
        // Monomial content was stripped, so a single term is a constant here.
        return Plain::constant(n, BigRational::one());
    }
    for v in 0..n {
        match (a.uses(v), b.uses(v)) {
            (true, false) => return gcd(&content_in(a, v), b),
            (false, true) => return gcd(a, &content_in(b, v)),
            _ => {}
        }
    }
    if coprime_by_images(a, b) {
        return Plain::constant(n, BigRational::one());
    }
    // Cheap exits: one argument divides the other.
    let (small, large) = if a.terms.len() <= b.terms.len() { (a, b) } else { (b, a) };
    if large.div_exact(small).is_some() {
        return small.monic();
    }
    if let Some(g) = modular::gcd(a, b) {
        return g;
    }
    let v = (0..n)
        .filter(|&v| a.uses(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .expect("non-constant polynomial uses a variable");
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides").monic();
    let mut q = b.div_exact(&cb).expect("content divides").monic();
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break primitive_part(&q, v);
        }
        if r.degree_in(v) == 0 {
            break Plain::constant(n, BigRational::one());
        }
        p = q;
        q = primitive_part(&r, v);
    };
    c.mul(&g).monic()
}

const PRIME: u64 = 4_611_686_018_427_387_847; // 2^62 - 57

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn rational_mod(c: &BigRational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let n = c.numer().mod_floor(&p).to_u64()?;
    let d = c.denom().mod_floor(&p).to_u64()?;
    (d != 0).then(|| mul_mod(n, inv_mod(d)))
}

/// Image of `p` as a univariate polynomial in `v` (dense, low degree first)
/// after substituting `points` for the other variables, modulo `PRIME`.
fn univariate_image(p: &Plain, v: usize, points: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (e, c) in &p.terms {
        let mut t = rational_mod(c)?;
        for (k, &ek) in e.iter().enumerate() {
            if k != v && ek > 0 {
                t = mul_mod(t, pow_mod(points[k], ek as u64));
            }
        }
        let slot = &mut out[e[v] as usize];
        *slot = (*slot + t) % PRIME;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().expect("nonempty"), inv);
            let shift = a.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                let t = mul_mod(f, bk);
                a[k + shift] = (a[k + shift] + PRIME - t) % PRIME;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when `a` and `b` are certainly coprime. For each shared variable the
/// other variables are specialized at a point where the leading coefficient
/// of `a` survives; a common factor of positive degree would survive as well.
fn coprime_by_images(a: &Plain, b: &Plain) -> bool {
    let n = a.nvars;
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed % PRIME
    };
    for v in 0..n {
        if !(a.uses(v) && b.uses(v)) {
            continue;
        }
        let points: Vec<u64> = (0..n).map(|_| next()).collect();
        let (Some(ia), Some(ib)) = (univariate_image(a, v, &points), univariate_image(b, v, &points))
        else {
            return false;
        };
        if ia.last() == Some(&0) || univariate_gcd_degree(ia, ib) > 0 {
            return false;
        }
    }
    true
}

type Coords = BTreeMap<(Poly, Monomial), BigRational>;

/// Coordinates of an exponential argument: coefficient of each numerator
/// monomial, keyed together with the denominator.
fn coords(arg: &Expr) -> Coords {
    arg.num()
        .terms()
        .map(|(m, c)| ((arg.den().clone(), m.clone()), c.clone()))
        .collect()
}

/// `v -= f * w`.
fn axpy(v: &mut Coords, f: &BigRational, w: &Coords) {
    for (k, c) in w {
        let entry = v.entry(k.clone()).or_insert_with(BigRational::zero);
        *entry -= f * c;
        if entry.is_zero() {
            v.remove(k);
        }
    }
}

/// Writes every exponential argument over a basis drawn from the arguments
/// themselves. Returns the basis and, per argument, its rational coefficients.
fn exp_basis(args: &[&Expr]) -> (Vec<Expr>, Vec<Vec<BigRational>>) {
    // Echelon rows: (pivot key, vector, combination of basis arguments).
    let mut rows: Vec<((Poly, Monomial), Coords, Vec<BigRational>)> = Vec::new();
    let mut basis: Vec<Expr> = Vec::new();
    let mut out = Vec::new();
    for arg in args {
        let mut v = coords(arg);
        let mut combo = vec![BigRational::zero(); basis.len()];
        for (pivot, w, wc) in &rows {
            let Some(c) = v.get(pivot) else { continue };
            let f = c / &w[pivot];
            axpy(&mut v, &f, w);
            for (k, x) in wc.iter().enumerate() {
                combo[k] += &f * x;
            }
        }
        if v.is_empty() {
            out.push(combo);
            continue;
        }
        // v = arg - combo, so the new row is arg minus the old combination.
        let t = basis.len();
        basis.push((*arg).clone());
        for row in rows.iter_mut() {
            row.2.push(BigRational::zero());
        }
        let mut rc: Vec<BigRational> = combo.iter().map(|x| -x).collect();
        rc.push(BigRational::one());
        let pivot = v.keys().next().expect("nonempty").clone();
        rows.push((pivot, v, rc));
        let mut unit = vec![BigRational::zero(); t + 1];
        unit[t] = BigRational::one();
        out.push(unit);
    }
    let n = basis.len();
    for c in out.iter_mut() {
        c.resize(n, BigRational::zero());
    }
    (basis, out)
}

/// Maps atoms to plain variables.
///
/// Exponentials are written over a rational basis of their arguments, so
/// `exp(a)` becomes a Laurent monomial `E_1^{n_1} ... E_k^{n_k}`. Each
/// polynomial is shifted by a power of the `E_j` so its exponents start at
/// zero; these powers are units and do not change quotients.
struct VarTable {
    vars: Vec<Atom>,
    index: BTreeMap<Atom, Vec<(usize, i64)>>,
}

impl VarTable {
    fn new(polys: &[&Poly]) -> Self {
        let mut atoms: Vec<Atom> = polys.iter().flat_map(|p| p.atoms()).collect();
        atoms.sort();
        atoms.dedup();
        let mut vars = Vec::new();
        let mut index = BTreeMap::new();
        let mut exps = Vec::new();
        for atom in atoms {
            match &atom {
                Atom::Exp(arg) => exps.push((atom.clone(), arg.clone())),
                _ => {
                    index.insert(atom.clone(), vec![(vars.len(), 1)]);
                    vars.push(atom);
                }
            }
        }
        if exps.is_empty() {
            return VarTable { vars, index };
        }
        let args: Vec<&Expr> = exps.iter().map(|(_, a)| a.as_ref()).collect();
        let (basis, coeffs) = exp_basis(&args);
        let first = vars.len();
        for (j, b) in basis.iter().enumerate() {
            let den = coeffs
                .iter()
                .fold(BigInt::one(), |l, c| l.lcm(c[j].denom()));
            vars.push(Atom::Exp(Arc::new(b.scale(&BigRational::new(BigInt::one(), den.clone())))));
            for ((atom, _), c) in exps.iter().zip(&coeffs) {
                if c[j].is_zero() {
                    continue;
                }
                let n = (&c[j] * BigRational::from_integer(den.clone()))
                    .to_integer()
                    .to_i64()
                    .expect("small multiplicity");
                index
                    .entry(atom.clone())
                    .or_insert_with(Vec::new)
                    .push((first + j, n));
            }
        }
        VarTable { vars, index }
    }

    /// Plain image of `p` and the shift that was applied to each variable.
    fn to_plain(&self, p: &Poly) -> (Plain, Vec<i64>) {
        let n = self.vars.len();
        let mut rows: Vec<(Vec<i64>, &BigRational)> = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut e = vec![0i64; n];
            for (atom, k) in m.powers() {
                for &(idx, mult) in &self.index[atom] {
                    e[idx] += *k as i64 * mult;
                }
            }
            rows.push((e, c));
        }
        let mut shift = vec![0i64; n];
        for (e, _) in &rows {
            for (s, &k) in shift.iter_mut().zip(e) {
                *s = (*s).max(-k);
            }
        }
        let mut out = Plain::zero(n);
        for (e, c) in rows {
            let e = e.iter().zip(&shift).map(|(k, s)| (k + s) as u32).collect();
            out.add_term(e, c.clone());
        }
        (out, shift)
    }

    fn to_poly(&self, p: &Plain, shift: &[i64]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &p.terms {
            let mut m = Monomial::one();
            let mut plain_part = Vec::new();
            for (idx, &k) in e.iter().enumerate() {
                let k = k as i64 - shift[idx];
                if k == 0 {
                    continue;
                }
                match &self.vars[idx] {
                    Atom::Exp(w) => m = m.mul(&Monomial::exp_multiple(w, k)),
                    atom => plain_part.push((atom.clone(), k as u32)),
                }
            }
            let m = Monomial::from_sorted(plain_part).mul(&m);
            out.add_term(m, c.clone());
        }
        out
    }
}

/// Cancels the greatest common divisor of `num` and `den`.
///
/// Returns the reduced pair; the common factor is discarded.
pub(crate) fn cancel(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let (_, qn, qd) = split(num, den);
    (qn, qd)
}

/// `(g, a/g, b/g)` for `g = gcd(a, b)`, up to units `exp(...)`.
pub(crate) fn split(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let table = VarTable::new(&[a, b]);
    let (pa, sa) = table.to_plain(a);
    let (pb, sb) = table.to_plain(b);
    let g = gcd(&pa, &pb);
    if g.is_constant() {
        return (Poly::one(), a.clone(), b.clone());
    }
    let qa = pa.div_exact(&g).expect("gcd divides");
    let qb = pb.div_exact(&g).expect("gcd divides");
    let zero = vec![0; g.nvars];
    (
        table.to_poly(&g, &zero),
        table.to_poly(&qa, &sa),
        table.to_poly(&qb, &sb),
    )
}

/// Plain GCD of two polynomials.
#[cfg(test)]
fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    split(a, b).0
}
