//! Sparse multivariate polynomials over the rationals.
//!
//! Monomials are power products of [`Atom`]s. At most one `exp` kernel
//! appears in a monomial, always with exponent one: products of exponentials
//! are merged into a single kernel whose argument is the sum of the factors'
//! arguments, and `exp(0)` disappears.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Atom, Expr};

/// A power product of atoms, kept sorted by atom with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: Vec<(Atom, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { powers: Vec::new() }
    }

    pub fn atom(atom: Atom) -> Self {
        Self::atom_pow(atom, 1)
    }

    /// `atom^k`; exponentials are folded into a single kernel `exp(k*u)`.
    pub fn atom_pow(atom: Atom, k: u32) -> Self {
        if k == 0 {
            return Monomial::one();
        }
        match atom {
            Atom::Exp(arg) if k > 1 => {
                let scaled = arg.as_ref().mul(&Expr::integer(k as i64));
                Monomial::exp_of(scaled)
            }
            atom => Monomial {
                powers: vec![(atom, k)],
            },
        }
    }

    /// `exp(k*arg)`.
    pub(crate) fn exp_multiple(arg: &Expr, k: i64) -> Self {
        Monomial::exp_of(arg.mul(&Expr::integer(k)))
    }

    fn exp_of(arg: Expr) -> Self {
        if arg.is_zero() {
            Monomial::one()
        } else {
            Monomial {
                powers: vec![(Atom::Exp(Arc::new(arg)), 1)],
            }
        }
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn powers(&self) -> &[(Atom, u32)] {
        &self.powers
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().map(|(_, k)| *k).sum()
    }

    pub fn exponent(&self, atom: &Atom) -> u32 {
        self.powers
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, k)| *k)
            .unwrap_or(0)
    }

    /// Argument of the exponential kernel carried by this monomial, if any.
    pub fn exp_arg(&self) -> Option<&Arc<Expr>> {
        self.powers.iter().find_map(|(a, _)| match a {
            Atom::Exp(arg) => Some(arg),
            _ => None,
        })
    }

    pub fn has_kernel(&self) -> bool {
        self.powers.iter().any(|(a, _)| a.is_kernel())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut powers = Vec::with_capacity(self.powers.len() + other.powers.len());
        let mut exp_args: Vec<Arc<Expr>> = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.powers, &other.powers);
        while i < a.len() || j < b.len() {
            let next = if i == a.len() {
                j += 1;
                b[j - 1].clone()
            } else if j == b.len() {
                i += 1;
                a[i - 1].clone()
            } else {
                match a[i].0.cmp(&b[j].0) {
                    Ordering::Less => {
                        i += 1;
                        a[i - 1].clone()
                    }
                    Ordering::Greater => {
                        j += 1;
                        b[j - 1].clone()
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (a[i - 1].0.clone(), a[i - 1].1 + b[j - 1].1)
                    }
                }
            };
            match next {
                (Atom::Exp(arg), k) => {
                    for _ in 0..k {
                        exp_args.push(arg.clone());
                    }
                }
                other => powers.push(other),
            }
        }
        let mut m = Monomial { powers };
        match exp_args.len() {
            0 => {}
            1 => m.powers.push((Atom::Exp(exp_args.pop().expect("one argument")), 1)),
            _ => {
                let sum = exp_args
                    .iter()
                    .fold(Expr::zero(), |acc, arg| acc.add(arg.as_ref()));
                if !sum.is_zero() {
                    m.powers.push((Atom::Exp(Arc::new(sum)), 1));
                }
            }
        }
        m
    }

    /// Divides out one power of `atom`, returning `None` if it is absent.
    pub fn reduce_atom(&self, atom: &Atom) -> Option<Monomial> {
        let idx = self.powers.iter().position(|(a, _)| a == atom)?;
        let mut powers = self.powers.clone();
        if powers[idx].1 == 1 {
            powers.remove(idx);
        } else {
            powers[idx].1 -= 1;
        }
        Some(Monomial { powers })
    }

    pub(crate) fn from_sorted(powers: Vec<(Atom, u32)>) -> Monomial {
        debug_assert!(powers.windows(2).all(|w| w[0].0 < w[1].0));
        Monomial { powers }
    }
}

/// Graded lexicographic order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.powers.cmp(&other.powers))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.terms.len() {
            0 => None,
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || self.as_constant().is_some()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Largest term in the monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn has_kernel(&self) -> bool {
        self.terms.keys().any(Monomial::has_kernel)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut out, rest) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &rest.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.mul(mono), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &small.terms {
            for (n, d) in &large.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Atoms occurring in any monomial.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = self
            .terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|(a, _)| a.clone()))
            .collect();
        atoms.sort();
        atoms.dedup();
        atoms
    }

    /// Sign of the leading coefficient, `0` for the zero polynomial.
    pub fn leading_sign(&self) -> i32 {
        match self.leading() {
            None => 0,
            Some((_, c)) if c.is_negative() => -1,
            Some(_) => 1,
        }
    }
}
