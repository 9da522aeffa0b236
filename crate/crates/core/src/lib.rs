//! Weighted uniform polynomial approximation on `[-1, 1]` with A* weights
//! that may vanish at finitely many points.
//!
//! The crate provides weights and their class constants ([`weights`]),
//! the point/interval geometry at the polynomial scale `ρ_n` ([`geometry`]),
//! weighted moduli of smoothness ([`moduli`]), weighted minimax polynomial
//! approximation ([`minimax`], [`cheb`]) and numerical verification suites
//! for the direct, inverse and realization results ([`verify`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::excessive_precision)]

pub mod cheb;
pub mod cli;
pub mod error;
pub mod function;
pub mod geometry;
pub mod minimax;
pub mod moduli;
pub mod quadrature;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
