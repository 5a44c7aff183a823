//! Jet-aware substitution.
//!
//! A binding `f_J ↦ e` replaces the jet `f_J` by `e` and every further
//! derivative `f_{JK}` by `∂_K e`. Binding the bare symbol (`J` empty) is an
//! ordinary function substitution; binding a proper jet such as `b_y` leaves
//! the lower jets (`b`, `b_x`, ...) free.

use std::collections::BTreeMap;

use super::{Atom, Expr, ExprError, JetVar, Var};

#[derive(Clone, Debug, Default)]
pub struct Bindings {
    entries: Vec<(JetVar, Expr)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds the whole function symbol `name`.
    pub fn symbol(mut self, name: &str, value: Expr) -> Self {
        self.entries.push((JetVar::base(name), value));
        self
    }

    /// Binds the jet `jet` and all of its derivatives.
    pub fn jet(mut self, jet: JetVar, value: Expr) -> Self {
        self.entries.push((jet, value));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn validate(&self) -> Result<(), ExprError> {
        for (i, (a, _)) in self.entries.iter().enumerate() {
            for (b, _) in &self.entries[i + 1..] {
                if a.is_derivative_of(b) || b.is_derivative_of(a) {
                    return Err(ExprError::ConflictingBinding(super::display::jet_name(a)));
                }
            }
        }
        Ok(())
    }

    fn lookup(&self, jet: &JetVar) -> Result<Option<&(JetVar, Expr)>, ExprError> {
        let mut found = None;
        for entry in &self.entries {
            if jet.is_derivative_of(&entry.0) {
                if found.is_some() {
                    return Err(ExprError::ConflictingBinding(super::display::jet_name(jet)));
                }
                found = Some(entry);
            }
        }
        Ok(found)
    }
}

impl Expr {
    /// Substitutes bound jets, differentiating bindings as required.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Expr, ExprError> {
        bindings.validate()?;
        let mut memo: BTreeMap<JetVar, Expr> = BTreeMap::new();
        substitute_inner(self, bindings, &mut memo)
    }
}

fn substitute_inner(
    e: &Expr,
    bindings: &Bindings,
    memo: &mut BTreeMap<JetVar, Expr>,
) -> Result<Expr, ExprError> {
    if bindings.is_empty() {
        return Ok(e.clone());
    }
    e.map_atoms(&mut |atom| match atom {
        Atom::X => Ok(Expr::x()),
        Atom::Y => Ok(Expr::y()),
        Atom::Jet(j) => {
            if let Some(v) = memo.get(j) {
                return Ok(v.clone());
            }
            let value = match bindings.lookup(j)? {
                Some((base, value)) => value
                    .diff_n(Var::X, j.dx - base.dx)
                    .diff_n(Var::Y, j.dy - base.dy),
                None => Expr::jet(j.clone()),
            };
            memo.insert(j.clone(), value.clone());
            Ok(value)
        }
        Atom::Exp(arg) => Ok(substitute_inner(arg, bindings, memo)?.exp()),
        Atom::Ln(arg) => substitute_inner(arg, bindings, memo)?.ln(),
    })
}
