use serde::{Deserialize, Serialize};

use super::evolve::{energy, Evolution};
use crate::bounds::{bounds_report, moment_stats, BoundsReport, MomentStats};
use crate::error::Result;
use crate::exec::Exec;
use crate::tolerances::Tolerances;

/// Moments and bounds of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub stats: MomentStats,
    pub bounds: BoundsReport,
}

/// [`BoundsReport`] at every stored snapshot.
pub fn bounds_over_time(
    evolution: &Evolution,
    tol: &Tolerances,
    exec: Exec,
) -> Result<Vec<TimePoint>> {
    exec.map_slice(&evolution.snapshots, |s| {
        let stats = moment_stats(&s.psi, tol)?;
        Ok(TimePoint {
            t: s.t,
            norm: s.psi.norm(),
            energy: energy(&s.psi, &evolution.potential, tol)?,
            bounds: bounds_report(&stats, tol),
            stats,
        })
    })
    .into_iter()
    .collect()
}
