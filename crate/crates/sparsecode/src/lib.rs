//! Achievability bounds for random linear codes with sparse generator
//! matrices over the binary symmetric and binary erasure channels.
//!
//! A message `x` of `k` bits is encoded as `z = A·x` over GF(2) by an `n×k`
//! generator matrix `A` drawn from one of two random ensembles (i.i.d.
//! Bernoulli entries, or rows of fixed weight). The decoder draws its output
//! from the posterior `P(x | y)`, whose success probability is `E[P(X|Y)]`.
//! This crate evaluates finite-blocklength lower bounds on the
//! ensemble-average success probability of that decoder, inverts them into
//! achievable-rate curves, fits error exponents, and cross-checks everything
//! against exhaustive enumeration at tiny sizes and seeded Monte Carlo at
//! moderate sizes.
//!
//! Modules:
//! - [`gf2`]: word-packed bit vectors and matrices (encode, rank, row
//!   selection) — the kernel under everything else.
//! - [`ensemble`]: generator-matrix distributions and their row-overlap
//!   parity probabilities.
//! - [`channel`]: BSC/BEC noise application and exact posterior computation.
//! - [`bounds`]: log-domain bound evaluation, rate inversion, exponent fits,
//!   margin diagnostics, density sweeps, and the normal-approximation
//!   baseline.
//! - [`montecarlo`]: exhaustive oracles and seeded Monte Carlo estimators.
//! - [`cli`]: the reproducible experiment runner behind the `sparsecode`
//!   binary (CSV output plus a checksummed run manifest).
//!
//! See the crate examples for one runnable program per capability.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod ensemble;
pub mod gf2;
pub mod montecarlo;
pub mod numeric;
pub mod rng;

pub use channel::ChannelSpec;
pub use ensemble::EnsembleSpec;
pub use gf2::{BitMatrix, BitVector};

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operand shapes do not agree (vector length vs. matrix dimension).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An enumeration guard would be exceeded; the message names the guard.
    #[error("size guard: {0}")]
    SizeGuard(String),
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A requested computation cannot proceed (e.g. an infeasible
    /// typicality filter or an impossible channel observation).
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Configuration file / flag errors from the experiment runner.
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
