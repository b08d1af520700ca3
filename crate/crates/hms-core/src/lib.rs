//! Exact toolkit for high-multiplicity scheduling on identical and uniform
//! machines, built around configuration integer programs.
//!
//! The crate covers a full pipeline at "desk scale" (small, exhaustively
//! checkable sizes), with every algebraic step carried out in exact
//! arbitrary-precision arithmetic:
//!
//! * [`model`] — instances with few distinct processing times and large
//!   multiplicities, schedules as configuration multisets, and a brute-force
//!   reference optimizer.
//! * [`kernel`] — balancing kernelization: preassign a common job block per
//!   machine so that residual multiplicities are polynomially bounded, plus
//!   the swap machinery that bounds per-type imbalance of good schedules.
//! * [`exact`] — decision and optimization for makespan, machine cover, and
//!   envy objectives via configuration dynamic programming over the kernel.
//! * [`pqrep`] — builders that express scheduling-type problems as a pair of
//!   polytopes (per-machine polytope P, aggregation polytope Q) in equality
//!   form, and the translation of such pairs into n-fold integer programs.
//! * [`pqsolve`] — exhaustive lattice-point enumeration and a multiplicity-
//!   compressed search for integer solutions of polytope pairs.
//! * [`relax`] — exact LP machinery: the convexified block relaxation,
//!   uniformization, proximity budgets, anchor shifting, and the coefficient
//!   preprocessing pipeline.
//! * [`ftreduce`] — sign-preserving coefficient reduction of rows via
//!   simultaneous Diophantine approximation (exact LLL), with a verified
//!   search fallback.
//! * [`uniform`] — reductions from uniform machines to identical machines by
//!   adding one dummy job type per machine speed.
//! * [`approx`] — additive approximation via slot relaxation and local
//!   search over job-size classes.
//! * [`hull`] — integer-hull vertex enumeration and closed-form vertex-count
//!   bounds for comparison.
//! * [`suite`] — seeded randomized property suites used by the CLI and the
//!   acceptance tests.

pub mod arith;
pub mod io;

pub mod guard;
pub mod lp;

pub mod model;

pub mod kernel;

pub mod exact;

pub mod lattice;
pub mod pqrep;
pub mod pqsolve;

pub mod ftreduce;
pub mod relax;

pub mod uniform;

pub mod approx;

pub mod hull;

pub mod suite;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Invalid` covers malformed or semantically inconsistent inputs,
/// `Guard` marks aborts due to configured resource limits, and
/// `Contract` reports violated internal invariants (these indicate bugs or
/// inputs that break a documented precondition of a subroutine).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("contract breached: {0}")]
    Contract(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
    pub fn guard(msg: impl Into<String>) -> Self {
        Error::Guard(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
