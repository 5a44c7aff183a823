//! Dense modular gcd after Brown.
//!
//! Images modulo word-sized primes are computed by evaluating one variable at
//! a time and interpolating, then lifted by Chinese remaindering. A lifted
//! candidate is only returned after exact trial division over Q, so unlucky
//! primes or points can cost time but never correctness.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Exps, Plain};

type Mp = BTreeMap<Exps, u64>;
type Zp = BTreeMap<Exps, BigInt>;

const MAX_PRIMES: usize = 64;
const EXTRA_POINTS: usize = 24;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    add_mod(a, p - b, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62`, largest first.
fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) + 1;
    std::iter::from_fn(move || loop {
        n -= 2;
        if is_prime(n) {
            return Some(n);
        }
    })
}

// Univariate polynomials mod p, dense, lowest degree first.

fn u_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn u_deg(a: &[u64]) -> usize {
    a.len().saturating_sub(1)
}

fn u_eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
}

fn u_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    u_trim(out)
}

/// `(quotient, remainder)`; `b` must be nonzero.
fn u_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = u_trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod(*b.last().expect("nonzero divisor"), p);
    let mut q = vec![0; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = mul_mod(*r.last().expect("nonempty"), inv, p);
        q[shift] = f;
        for (k, &bk) in b.iter().enumerate() {
            r[k + shift] = sub_mod(r[k + shift], mul_mod(f, bk, p), p);
        }
        r = u_trim(r);
    }
    (u_trim(q), r)
}

fn u_monic(a: Vec<u64>, p: u64) -> Vec<u64> {
    match a.last() {
        None => a,
        Some(&lc) => {
            let inv = inv_mod(lc, p);
            a.into_iter().map(|c| mul_mod(c, inv, p)).collect()
        }
    }
}

fn u_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (u_trim(a.to_vec()), u_trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = u_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    u_monic(a, p)
}

// Sparse multivariate polynomials mod p.

fn mp_add_term(p_: &mut Mp, e: Exps, c: u64, p: u64) {
    if c == 0 {
        return;
    }
    match p_.get_mut(&e) {
        Some(v) => {
            *v = add_mod(*v, c, p);
            if *v == 0 {
                p_.remove(&e);
            }
        }
        None => {
            p_.insert(e, c);
        }
    }
}

fn mp_scale(a: &Mp, c: u64, p: u64) -> Mp {
    if c == 0 {
        return Mp::new();
    }
    a.iter().map(|(e, &x)| (e.clone(), mul_mod(x, c, p))).collect()
}

fn mp_monic(a: Mp, p: u64) -> Mp {
    match a.iter().next_back() {
        None => a,
        Some((_, &lc)) => {
            let inv = inv_mod(lc, p);
            mp_scale(&a, inv, p)
        }
    }
}

/// Sets `x_v = alpha`.
fn mp_eval(a: &Mp, v: usize, alpha: u64, p: u64) -> Mp {
    let mut out = Mp::new();
    for (e, &c) in a {
        let mut ee = e.clone();
        let k = std::mem::replace(&mut ee[v], 0);
        mp_add_term(&mut out, ee, mul_mod(c, pow_mod(alpha, k as u64, p), p), p);
    }
    out
}

/// Groups `a` by its monomial in the other variables; each group is a
/// univariate polynomial in `x_v`.
fn coeffs_in(a: &Mp, v: usize) -> BTreeMap<Exps, Vec<u64>> {
    let mut out: BTreeMap<Exps, Vec<u64>> = BTreeMap::new();
    for (e, &c) in a {
        let mut ee = e.clone();
        let k = std::mem::replace(&mut ee[v], 0) as usize;
        let slot = out.entry(ee).or_default();
        if slot.len() <= k {
            slot.resize(k + 1, 0);
        }
        slot[k] = c;
    }
    out
}

fn from_coeffs(groups: BTreeMap<Exps, Vec<u64>>, v: usize, p: u64) -> Mp {
    let mut out = Mp::new();
    for (e, u) in groups {
        for (k, c) in u.into_iter().enumerate() {
            let mut ee = e.clone();
            ee[v] = k as u32;
            mp_add_term(&mut out, ee, c, p);
        }
    }
    out
}

fn content_in(a: &Mp, v: usize, p: u64) -> Vec<u64> {
    let mut g: Vec<u64> = Vec::new();
    for u in coeffs_in(a, v).values() {
        g = u_gcd(&g, u, p);
        if g.len() == 1 {
            break;
        }
    }
    g
}

fn div_univariate(a: &Mp, u: &[u64], v: usize, p: u64) -> Mp {
    if u.len() <= 1 {
        return a.clone();
    }
    let groups = coeffs_in(a, v)
        .into_iter()
        .map(|(e, c)| (e, u_divrem(&c, u, p).0))
        .collect();
    from_coeffs(groups, v, p)
}

fn mul_univariate(a: &Mp, u: &[u64], v: usize, p: u64) -> Mp {
    let groups = coeffs_in(a, v)
        .into_iter()
        .map(|(e, c)| (e, u_mul(&c, u, p)))
        .collect();
    from_coeffs(groups, v, p)
}

/// Leading coefficient with respect to the variables other than `x_v`.
fn lc_in(a: &Mp, v: usize) -> Vec<u64> {
    coeffs_in(a, v)
        .into_iter()
        .next_back()
        .map(|(_, u)| u_trim(u))
        .unwrap_or_default()
}

fn deg_in(a: &Mp, v: usize) -> usize {
    a.keys().map(|e| e[v] as usize).max().unwrap_or(0)
}

fn mp_div_exact(a: &Mp, d: &Mp, p: u64) -> Option<Mp> {
    let (le, &lc) = d.iter().next_back()?;
    let inv = inv_mod(lc, p);
    let mut rem = a.clone();
    let mut quot = Mp::new();
    while let Some((e, &c)) = rem.iter().next_back() {
        if e.iter().zip(le).any(|(x, y)| x < y) {
            return None;
        }
        let qe: Exps = e.iter().zip(le).map(|(x, y)| x - y).collect();
        let qc = mul_mod(c, inv, p);
        for (de, &dc) in d {
            let te: Exps = de.iter().zip(&qe).map(|(x, y)| x + y).collect();
            mp_add_term(&mut rem, te, p - mul_mod(dc, qc, p), p);
        }
        quot.insert(qe, qc);
    }
    Some(quot)
}

fn univariate_gcd(a: &Mp, b: &Mp, nvars: usize, p: u64) -> Mp {
    let dense = |m: &Mp| -> Vec<u64> {
        let mut u = vec![0; deg_in(m, 0) + 1];
        for (e, &c) in m {
            u[e[0] as usize] = c;
        }
        u
    };
    let g = u_gcd(&dense(a), &dense(b), p);
    let mut out = Mp::new();
    for (k, c) in g.into_iter().enumerate() {
        let mut e = vec![0; nvars];
        e[0] = k as u32;
        mp_add_term(&mut out, e, c, p);
    }
    out
}

/// Monic gcd over `Z_p[x_0..=x_v]`; `None` when too many evaluation points
/// turn out unlucky.
fn pgcd(a: &Mp, b: &Mp, v: usize, p: u64) -> Option<Mp> {
    if a.is_empty() {
        return Some(mp_monic(b.clone(), p));
    }
    if b.is_empty() {
        return Some(mp_monic(a.clone(), p));
    }
    let nvars = a.keys().next().expect("nonempty").len();
    if v == 0 {
        return Some(univariate_gcd(a, b, nvars, p));
    }
    if deg_in(a, v) == 0 && deg_in(b, v) == 0 {
        return pgcd(a, b, v - 1, p);
    }
    let (ca, cb) = (content_in(a, v, p), content_in(b, v, p));
    let c = u_gcd(&ca, &cb, p);
    let a = div_univariate(a, &ca, v, p);
    let b = div_univariate(b, &cb, v, p);
    let (la, lb) = (lc_in(&a, v), lc_in(&b, v));
    let g = u_gcd(&la, &lb, p);
    let bound = deg_in(&a, v).min(deg_in(&b, v)) + u_deg(&g);
    let mut h: Option<(Mp, Exps)> = None;
    let mut q: Vec<u64> = vec![1];
    let mut count = 0;
    let mut tries = 0;
    let mut alpha = 0u64;
    while tries < bound + 1 + EXTRA_POINTS {
        alpha += 1;
        if u_eval(&la, alpha, p) == 0 || u_eval(&lb, alpha, p) == 0 {
            continue;
        }
        tries += 1;
        let image = pgcd(&mp_eval(&a, v, alpha, p), &mp_eval(&b, v, alpha, p), v - 1, p)?;
        let image = mp_scale(&mp_monic(image, p), u_eval(&g, alpha, p), p);
        let lm = image.keys().next_back().expect("nonzero image").clone();
        if lm.iter().all(|&k| k == 0) {
            // The images are coprime, so the primitive parts are too.
            let mut one = Mp::new();
            one.insert(vec![0; nvars], 1);
            return Some(mp_monic(mul_univariate(&one, &c, v, p), p));
        }
        let mut stable = false;
        match &mut h {
            Some((cur, cur_lm)) => match lm.cmp(cur_lm) {
                Ordering::Greater => continue,
                Ordering::Less => {
                    h = Some((image, lm));
                    q = vec![p - alpha, 1];
                    count = 1;
                }
                Ordering::Equal => {
                    let at = mp_eval(cur, v, alpha, p);
                    let mut diff = image;
                    for (e, c) in at {
                        mp_add_term(&mut diff, e, p - c, p);
                    }
                    if diff.is_empty() {
                        stable = true;
                    } else {
                        let f = inv_mod(u_eval(&q, alpha, p), p);
                        let step = mul_univariate(&mp_scale(&diff, f, p), &q, v, p);
                        for (e, c) in step {
                            mp_add_term(cur, e, c, p);
                        }
                    }
                    q = u_mul(&q, &[p - alpha, 1], p);
                    count += 1;
                }
            },
            None => {
                h = Some((image, lm));
                q = vec![p - alpha, 1];
                count = 1;
            }
        }
        if stable || count > bound {
            let (cur, _) = h.as_ref().expect("set above");
            let cand = div_univariate(cur, &content_in(cur, v, p), v, p);
            if mp_div_exact(&a, &cand, p).is_some() && mp_div_exact(&b, &cand, p).is_some() {
                return Some(mp_monic(mul_univariate(&cand, &c, v, p), p));
            }
        }
    }
    None
}

/// Integer polynomial with content one, proportional to `a`.
fn primitive_integer(a: &Plain) -> Zp {
    let den = a
        .terms
        .values()
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut out: Zp = a
        .terms
        .iter()
        .map(|(e, c)| (e.clone(), (c * BigRational::from_integer(den.clone())).to_integer()))
        .collect();
    let g = out.values().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_one() && !g.is_zero() {
        for c in out.values_mut() {
            *c /= &g;
        }
    }
    out
}

fn reduce(a: &Zp, p: u64) -> Mp {
    let pb = BigInt::from(p);
    a.iter()
        .filter_map(|(e, c)| {
            let r = c.mod_floor(&pb).to_u64().expect("reduced below p");
            (r != 0).then(|| (e.clone(), r))
        })
        .collect()
}

fn symmetric(residues: &Zp, modulus: &BigInt) -> Zp {
    let half: BigInt = modulus >> 1;
    residues
        .iter()
        .map(|(e, r)| {
            let v = if r > &half { r - modulus } else { r.clone() };
            (e.clone(), v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// Gcd of two nonzero polynomials with the same variable set, normalized to
/// be monic; `None` if the modular method gives up.
pub(super) fn gcd(a: &Plain, b: &Plain) -> Option<Plain> {
    let n = a.nvars;
    if n == 0 {
        return None;
    }
    let (za, zb) = (primitive_integer(a), primitive_integer(b));
    let (lea, lca) = za.iter().next_back()?;
    let (leb, lcb) = zb.iter().next_back()?;
    let gamma = lca.gcd(lcb);
    let mut lifted: Option<(Zp, Exps, BigInt)> = None;
    let mut previous: Option<Zp> = None;
    for p in primes().take(MAX_PRIMES) {
        let pb = BigInt::from(p);
        let gp = gamma.mod_floor(&pb).to_u64().expect("reduced below p");
        if gp == 0 {
            continue;
        }
        let (ap, bp) = (reduce(&za, p), reduce(&zb, p));
        if ap.keys().next_back() != Some(lea) || bp.keys().next_back() != Some(leb) {
            continue;
        }
        let Some(image) = pgcd(&ap, &bp, n - 1, p) else { continue };
        let image = mp_scale(&mp_monic(image, p), gp, p);
        let lm = image.keys().next_back().expect("nonzero image").clone();
        if lm.iter().all(|&k| k == 0) {
            return Some(Plain::constant(n, BigRational::one()));
        }
        let as_residues =
            |m: &Mp| -> Zp { m.iter().map(|(e, &c)| (e.clone(), BigInt::from(c))).collect() };
        let restart = match &lifted {
            None => true,
            Some((_, cur_lm, _)) => match lm.cmp(cur_lm) {
                Ordering::Greater => continue,
                Ordering::Less => true,
                Ordering::Equal => false,
            },
        };
        if restart {
            lifted = Some((as_residues(&image), lm, pb));
            previous = None;
        } else {
            let (res, _, modulus) = lifted.as_mut().expect("set");
            let minv = BigInt::from(inv_mod((*modulus).mod_floor(&pb).to_u64().expect("small"), p));
            let mut keys: Vec<Exps> = res.keys().cloned().collect();
            keys.extend(image.keys().cloned());
            keys.sort();
            keys.dedup();
            for k in keys {
                let r1 = res.get(&k).cloned().unwrap_or_default();
                let r2 = BigInt::from(image.get(&k).copied().unwrap_or(0));
                let t = ((r2 - &r1) * &minv).mod_floor(&pb);
                res.insert(k, r1 + &*modulus * t);
            }
            *modulus *= &pb;
        }
        let (res, _, modulus) = lifted.as_ref().expect("set");
        let candidate = symmetric(res, modulus);
        if previous.as_ref() == Some(&candidate) {
            let g = candidate.values().fold(BigInt::zero(), |g, c| g.gcd(c));
            let plain = Plain {
                nvars: n,
                terms: candidate
                    .iter()
                    .map(|(e, c)| (e.clone(), BigRational::new(c.clone(), g.abs())))
                    .collect(),
            };
            if a.div_exact(&plain).is_some() && b.div_exact(&plain).is_some() {
                return Some(plain.monic());
            }
        }
        previous = Some(candidate);
    }
    None
}
