//! Realization functional and numerical verification suites.

pub mod polyineq;
pub mod report;
pub mod suites;

pub use polyineq::verify_polynomial_inequalities;
pub use report::{Criterion, Flag, Row, VerdictReport};
pub use suites::{
    near_best_pair, near_best_report, realization_functional, weighted_derivative_norm, Grids, Verifier,
    DEFAULT_THRESHOLD, SOLVER_SLACK,
};
