//! Exact calculus of pseudo-differential operators with finitely many
//! rank-one nonlocal tails, and the Poisson-bracket machinery of constrained
//! KP hierarchies built on top of it.
//!
//! The layers, bottom up:
//!
//! * [`diffring`]: differential expressions in named fields, with `J(..)`
//!   antiderivative symbols and `E(..)` exponential symbols, reduction modulo
//!   total derivatives, Euler and Fréchet derivatives.
//! * [`psido`]: operators `Σ c_k ∂^k + Σ a ∂⁻¹ b` with exact products.
//! * [`structures`]: Lax families, covectors, Hamiltonian maps, bracket
//!   tables and their verification and transfer.
//! * [`hierarchy`], [`miura`], [`conformal`]: flows, factorizations and
//!   composite-field brackets.
//! * [`cli`]: the text syntax and the verification driver behind the binary.

pub mod cli;
pub mod conformal;
pub mod diffring;
pub mod error;
pub mod hierarchy;
pub mod miura;
pub mod psido;
pub mod structures;

pub use error::{Error, Result};
