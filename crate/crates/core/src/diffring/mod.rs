//! Differential expressions over declared field generators.

mod context;
mod expr;
mod integrate;
mod variational;

pub use context::{Context, Gen};
pub use expr::{q, qr, Atom, DiffExpr, ExprDisplay, Monomial, Q};
pub use integrate::{antiderivative, integrate_total_derivative, reduce, Reduction};
pub use variational::{euler_derivative, frechet, frechet_row, LocalOperatorRow, Substitution};

pub(crate) use expr::format_expr;
