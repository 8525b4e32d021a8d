//! A numerical laboratory for sharp inequalities along heat flow on
//! one-dimensional model spaces.
//!
//! The crate provides four layers:
//!
//! - **scalar analysis** ([`gaussian`]): the Gaussian cumulative `Phi`, its
//!   inverse, the isoperimetric profile `I = phi ∘ Phi⁻¹`, and the curvature
//!   rate functions `sigma(K,t)`, `kappa(K,t)` that control how distances and
//!   gradients scale under the flow;
//! - **fields and semigroups** ([`grid`], [`field`], [`measure`], [`mask`],
//!   [`semigroup`], [`distribution`]): scalar fields on uniform line/circle
//!   grids, weighted invariant measures, and three Markov semigroups — the
//!   Euclidean heat semigroup (exact Gaussian kernel), the
//!   Ornstein–Uhlenbeck semigroup (Mehler formula via Gauss–Hermite
//!   quadrature), and a generic weighted diffusion on the circle
//!   (Crank–Nicolson);
//! - **variational solvers** ([`hopf_lax`], [`transport`]): the
//!   inf-convolution (Hopf–Lax) semigroup computed by an exact
//!   lower-envelope-of-parabolas algorithm with a brute-force oracle, its
//!   vanishing-viscosity approximation, and exact 1D quadratic optimal
//!   transport through quantile functions;
//! - **the check registry** ([`registry`]): a campaign runner that evaluates a
//!   catalogue of Harnack-type, isoperimetric, commutation, contraction and
//!   entropy–transport inequalities over seeded function families and reports
//!   signed worst-case margins with the location where each worst case occurs.
//!
//! Everything is deterministic under a fixed seed; reports render to CSV and
//! JSON via the `heatlab` binary (`run`, `list`, `report`).

pub mod error;
pub mod gaussian;
pub mod grid;
pub mod field;
pub mod interp;
pub mod measure;
pub mod mask;
pub mod tridiag;
pub mod hermite;
pub mod semigroup;
pub mod distribution;
pub mod hopf_lax;
pub mod transport;
pub mod registry;

pub use error::{Error, Result};
