//! # fisher-bohm
//!
//! Numerical checks of the link between the mean Bohmian quantum potential and
//! the Fisher information of the position density, for one-dimensional pure
//! states on uniform grids.
//!
//! The crate is organized bottom-up:
//!
//! - [`grid_state`]: grids, wavefunctions, analytic test states, finite
//!   difference / spectral derivatives, Simpson quadrature and the momentum
//!   space transform.
//! - [`bohmian`]: local (Bohmian) momentum, osmotic momentum, quantum
//!   potential, Fisher information and the identity `Q̄ = ħ²I/(8m)`.
//! - [`bounds`]: moments, the decomposition `Var(P̂) = Var(P_q) + ħ²I/4`
//!   checked against momentum space, the Heisenberg / Robertson-Schrödinger /
//!   Cramér-Rao bound chain, the gap `Δ`, and a Monte-Carlo Cramér-Rao
//!   demonstration.
//! - [`dynamics`]: split-step evolution, Bohmian trajectory ensembles and
//!   bound tracking over time.
//! - [`report`]: JSON run configuration, corpus runs and CSV/JSON output.
//!
//! Data-parallel loops go through [`exec::Exec`]; disabling the default
//! `parallel` feature yields a purely sequential build with identical results.

#![forbid(unsafe_code)]
// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bohmian;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod grid_state;
pub mod report;
pub mod sampling;
pub mod tolerances;

pub use error::{Error, Result};
pub use exec::Exec;
pub use grid_state::{AnalyticState, Grid1D, Scheme, Wavefunction};
pub use tolerances::Tolerances;
