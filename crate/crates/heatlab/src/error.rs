//! Crate-wide error type.
//!
//! Numerical operations that can fail on malformed input (wrong domain kind,
//! negative time, unnormalized densities, degenerate kernel rows, bad
//! configs) return [`Result`]. Programmer errors such as mixing fields from
//! different grids panic via `assert!` instead — they are bugs, not data.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("{what} = {value} is outside its domain: {constraint}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Time parameters for the semigroups and envelope solvers must be ≥ 0
    /// (strictly positive where the operation degenerates at 0).
    #[error("time parameter {what} = {value} must satisfy {constraint}")]
    BadTime {
        what: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The operation is defined only on the other grid topology.
    #[error("{op} requires a {required} grid")]
    WrongTopology { op: &'static str, required: &'static str },

    /// The operation is not defined for this semigroup kind.
    #[error("{op} is not available for the {kind} semigroup: {why}")]
    UnsupportedSemigroup {
        op: &'static str,
        kind: &'static str,
        why: &'static str,
    },

    /// A density failed the probability-normalization contract.
    #[error("density mass {mass} deviates from 1 by more than {tol}")]
    NotNormalized { mass: f64, tol: f64 },

    /// A transition-kernel row failed its mass sanity check.
    #[error("kernel row mass {mass} at node {node} deviates from 1 by more than 1e-6")]
    KernelMass { mass: f64, node: usize },

    /// The implicit solver produced non-finite values.
    #[error("{op} produced a non-finite value (step {step})")]
    NumericalBlowup { op: &'static str, step: usize },

    /// Campaign configuration errors (unknown ids, missing fields, parse).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
