//! Time evolution, Bohmian trajectory ensembles and bound tracking.
//!
//! Evolution uses Strang splitting with an exact (spectral) kinetic step and
//! aborts instead of wrapping when density reaches the grid edges.
//! Trajectories follow `dx/dt = p_q/m` with RK4, cubic interpolation of the
//! velocity in space and linear interpolation between stored snapshots.

mod evolve;
mod potential;
mod tracking;
mod trajectories;

pub use evolve::{
    continuity_residual, energy, split_step_evolve, Evolution, EvolutionConfig, Snapshot,
};
pub use potential::Potential;
pub use tracking::{bounds_over_time, TimePoint};
pub use trajectories::{
    equivariance_distance, integrate_trajectories, quantile_positions, sample_initial_positions,
    TrajectoryEnsemble, MIN_TRAJECTORIES,
};
