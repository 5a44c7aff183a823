//! Canonical text form. Every printed expression parses back to itself.

use std::fmt::{self, Display, Write};

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{Monomial, Poly};
use super::{Atom, Expr, JetVar};

pub(crate) fn jet_name(j: &JetVar) -> String {
    let mut s = j.symbol.to_string();
    if j.dx + j.dy > 0 {
        s.push('_');
        s.extend(std::iter::repeat_n('x', j.dx as usize));
        s.extend(std::iter::repeat_n('y', j.dy as usize));
    }
    s
}

impl Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&jet_name(self))
    }
}

fn write_atom(out: &mut String, atom: &Atom) {
    match atom {
        Atom::X => out.push('x'),
        Atom::Y => out.push('y'),
        Atom::Jet(j) => out.push_str(&jet_name(j)),
        Atom::Exp(arg) => {
            let _ = write!(out, "exp({arg})");
        }
        Atom::Ln(arg) => {
            let _ = write!(out, "ln({arg})");
        }
    }
}

fn write_monomial(out: &mut String, m: &Monomial) {
    for (i, (atom, k)) in m.powers().iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write_atom(out, atom);
        if *k > 1 {
            let _ = write!(out, "^{k}");
        }
    }
}

/// Terms are printed from the leading monomial down.
fn write_poly(out: &mut String, p: &Poly) {
    if p.is_zero() {
        out.push('0');
        return;
    }
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let negative = c.is_negative();
        let abs: BigRational = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if m.is_one() {
            let _ = write!(out, "{abs}");
        } else {
            if !abs.is_one() {
                let _ = write!(out, "{abs}*");
            }
            write_monomial(out, m);
        }
    }
}

fn needs_parens(p: &Poly) -> bool {
    p.len() > 1
}

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if self.den().is_one() {
            write_poly(&mut out, self.num());
        } else {
            let mut num = String::new();
            write_poly(&mut num, self.num());
            let mut den = String::new();
            write_poly(&mut den, self.den());
            // A single numerator term reads correctly under left-associative `/`.
            if needs_parens(self.num()) {
                let _ = write!(out, "({num})");
            } else {
                out.push_str(&num);
            }
            out.push('/');
            if needs_parens(self.den()) || den.contains('*') || den.contains('/') {
                let _ = write!(out, "({den})");
            } else {
                out.push_str(&den);
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(s: &str) {
        let e: Expr = s.parse().unwrap();
        let printed = e.to_string();
        let back: Expr = printed.parse().unwrap();
        assert_eq!(back, e, "{s} printed as {printed}");
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "0",
            "-3/4",
            "x*y^2 - 2*a_xy",
            "-y/x",
            "1/(2*x*y)",
            "(x + 1)/(x - y)",
            "-(x + 1)/(x - y)",
            "exp(-x)*q + ln(1 + z_x)",
            "psi1_xy/(psi1*q^2)",
            "-1/2*x/y",
        ] {
            roundtrip(s);
        }
    }

    #[test]
    fn canonical_strings_are_stable() {
        let e: Expr = "y/x * (-1)".parse().unwrap();
        assert_eq!(e.to_string(), "-y/x");
        let e: Expr = "1/(2*x*y)".parse().unwrap();
        assert_eq!(e.to_string(), "1/2/(x*y)");
    }
}
