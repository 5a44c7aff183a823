//! Exact symbolic engine for Darboux transformations of operators
//! `L = DxDy + a Dx + b Dy + c`.
//!
//! - [`expr`]: canonical differential-rational expressions.
//! - [`lpdo`]: the operator ring `K[Dx, Dy]`.
//! - [`darboux`]: construction, verification and normalization of
//!   Darboux transformations.
//! - [`invariants`]: gauge and gauged-evolution invariants of pairs `(L, M)`.
//! - [`verify`]: deterministic verification suites for the identities the
//!   engine relies on.

pub mod expr;
pub mod darboux;
pub mod invariants;
pub mod lpdo;
pub mod verify;

pub use expr::{Expr, ExprError, JetVar, Var};
pub use lpdo::{Lpdo, LpdoError};
