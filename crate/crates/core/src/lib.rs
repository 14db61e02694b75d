//! Periodic orbits of the Lorenz system by harmonic balance.
//!
//! Each phase coordinate of a cycle is approximated by a trigonometric
//! polynomial with an unknown frequency. The coefficients solve a closed
//! nonlinear algebraic system ([`hbsystem`]), found by Newton's method
//! ([`newton`]) with continuation in the harmonic count ([`continuation`]).
//! Candidates are checked by extended-precision Taylor-series integration
//! over one period ([`taylor`]).

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuation;
pub mod error;
pub mod hbsystem;
pub mod newton;
pub mod scalar;
pub mod solution;
pub mod taylor;
pub mod trigpoly;

pub use error::{Error, Result};
pub use hbsystem::{HarmonicSolution, LorenzParams, ResidualSystem};
pub use scalar::{ExtReal, Real};
pub use solution::SolutionFile;
pub use taylor::{verify_cycle, TaylorConfig, VerificationReport};
pub use trigpoly::TrigPolynomial;
