use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::evolve::Evolution;
use crate::bohmian::{FieldOptions, PolarFields};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid_state::{simpson, Grid1D};
use crate::sampling::{ks_distance, InverseCdf};
use crate::tolerances::Tolerances;

/// Minimum number of usable trajectories for a KS comparison.
pub const MIN_TRAJECTORIES: usize = 1000;

fn check_normalized(rho: &[f64], grid: &Grid1D) -> Result<()> {
    grid.check_len(rho.len())?;
    let norm = simpson(rho, grid.dx());
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { norm, tol: 1e-6 });
    }
    Ok(())
}

/// `n` independent draws from `rho0` by inverse-CDF sampling.
pub fn sample_initial_positions(
    rho0: &[f64],
    grid: &Grid1D,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_normalized(rho0, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(InverseCdf::new(rho0, grid)?.sample(n, &mut rng))
}

/// Deterministic stratified positions `F⁻¹((k + ½)/n)`.
pub fn quantile_positions(rho0: &[f64], grid: &Grid1D, n: usize) -> Result<Vec<f64>> {
    check_normalized(rho0, grid)?;
    let inv = InverseCdf::new(rho0, grid)?;
    Ok((0..n)
        .map(|k| inv.quantile((k as f64 + 0.5) / n as f64))
        .collect())
}

/// Particle positions at every stored snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEnsemble {
    pub initial_positions: Vec<f64>,
    pub times: Vec<f64>,
    /// `positions[snapshot][particle]`; `NaN` after a trajectory is flagged.
    pub positions: Vec<Vec<f64>>,
    /// Trajectories that entered a node region or left the grid.
    pub flagged: Vec<bool>,
    pub dt_traj: f64,
}

impl TrajectoryEnsemble {
    pub fn n_particles(&self) -> usize {
        self.initial_positions.len()
    }

    pub fn n_flagged(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }

    /// Positions of unflagged particles at `snapshot`.
    pub fn active_positions(&self, snapshot: usize) -> Vec<f64> {
        self.positions[snapshot]
            .iter()
            .zip(&self.flagged)
            .filter(|(_, f)| !**f)
            .map(|(x, _)| *x)
            .collect()
    }

    /// Whether unflagged particles keep their initial ordering at every
    /// snapshot (trajectories cannot cross in one dimension).
    pub fn order_preserved(&self) -> bool {
        let mut order: Vec<usize> = (0..self.n_particles())
            .filter(|&i| !self.flagged[i])
            .collect();
        order.sort_by(|&a, &b| self.initial_positions[a].total_cmp(&self.initial_positions[b]));
        self.positions
            .iter()
            .all(|snap| order.windows(2).all(|w| snap[w[0]] <= snap[w[1]]))
    }

    /// Largest displacement of any unflagged particle over the run.
    pub fn max_displacement(&self) -> f64 {
        (0..self.n_particles())
            .filter(|&i| !self.flagged[i])
            .flat_map(|i| {
                self.positions
                    .iter()
                    .map(move |s| (s[i] - self.initial_positions[i]).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Velocity `p_q/m` on the nodes of one snapshot (`NaN` at nodes).
struct VelocityField {
    x_min: f64,
    dx: f64,
    v: Vec<f64>,
}

impl VelocityField {
    /// Four-point Lagrange interpolation; `None` off the grid or when a
    /// stencil node is masked.
    fn at(&self, x: f64) -> Option<f64> {
        let n = self.v.len();
        let s = (x - self.x_min) / self.dx;
        if !(s >= 0.0 && s <= (n - 1) as f64) {
            return None;
        }
        let j = (s.floor() as usize).clamp(1, n - 3);
        let t = s - j as f64;
        let (a, b, c, d) = (self.v[j - 1], self.v[j], self.v[j + 1], self.v[j + 2]);
        // nodes at t = −1, 0, 1, 2
        let val = -a * t * (t - 1.0) * (t - 2.0) / 6.0
            + b * (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
            - c * (t + 1.0) * t * (t - 2.0) / 2.0
            + d * (t + 1.0) * t * (t - 1.0) / 6.0;
        val.is_finite().then_some(val)
    }
}

/// RK4 across one snapshot interval of length `span` in `m` steps, with the
/// velocity interpolated linearly in time between `fa` and `fb`.
fn advance(fa: &VelocityField, fb: &VelocityField, mut x: f64, span: f64, m: usize) -> Option<f64> {
    let h = span / m as f64;
    let vel =
        |x: f64, theta: f64| -> Option<f64> { Some((1.0 - theta) * fa.at(x)? + theta * fb.at(x)?) };
    for s in 0..m {
        let th = s as f64 / m as f64;
        let half = (s as f64 + 0.5) / m as f64;
        let end = (s as f64 + 1.0) / m as f64;
        let k1 = vel(x, th)?;
        let k2 = vel(x + 0.5 * h * k1, half)?;
        let k3 = vel(x + 0.5 * h * k2, half)?;
        let k4 = vel(x + h * k3, end)?;
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Some(x)
}

/// Follows `dx/dt = p_q(x, t)/m` from each initial position.
///
/// `dt_traj` must divide every snapshot interval. Trajectories are
/// independent, so `exec` only changes wall time.
pub fn integrate_trajectories(
    evolution: &Evolution,
    positions: &[f64],
    dt_traj: f64,
    tol: &Tolerances,
    exec: Exec,
) -> Result<TrajectoryEnsemble> {
    if !(dt_traj.is_finite() && dt_traj > 0.0) {
        return Err(Error::Config(format!(
            "dt_traj must be positive, got {dt_traj}"
        )));
    }
    let snaps = &evolution.snapshots;
    let times = evolution.times();
    let mut substeps = Vec::with_capacity(snaps.len().saturating_sub(1));
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let k = (span / dt_traj).round();
        if k < 1.0 || (k * dt_traj - span).abs() > 1e-9 * span {
            return Err(Error::Precondition(format!(
                "dt_traj = {dt_traj} does not divide the snapshot interval {span}"
            )));
        }
        substeps.push(k as usize);
    }
    let fields: Vec<VelocityField> = exec
        .map_slice(snaps, |s| {
            let f = PolarFields::compute(&s.psi, FieldOptions::with_eps(tol.eps_node))?;
            let m = s.psi.mass();
            Ok(VelocityField {
                x_min: s.psi.grid().x_min(),
                dx: s.psi.grid().dx(),
                v: f.p_q.iter().map(|p| p / m).collect(),
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let n_snap = snaps.len();
    let paths: Vec<(Vec<f64>, bool)> = exec.map_slice(positions, |&x0| {
        let mut path = Vec::with_capacity(n_snap);
        path.push(x0);
        let mut x = x0;
        for (k, &m) in substeps.iter().enumerate() {
            match advance(&fields[k], &fields[k + 1], x, times[k + 1] - times[k], m) {
                Some(next) => {
                    x = next;
                    path.push(x);
                }
                None => {
                    path.resize(n_snap, f64::NAN);
                    return (path, true);
                }
            }
        }
        (path, false)
    });

    let mut out = vec![Vec::with_capacity(positions.len()); n_snap];
    let mut flagged = Vec::with_capacity(positions.len());
    for (p, f) in &paths {
        flagged.push(*f);
        for (row, x) in out.iter_mut().zip(p) {
            row.push(*x);
        }
    }
    Ok(TrajectoryEnsemble {
        initial_positions: positions.to_vec(),
        times,
        positions: out,
        flagged,
        dt_traj,
    })
}

/// KS distance between the unflagged particles at `snapshot` and `density`
/// (normalized by quadrature).
pub fn equivariance_distance(
    ensemble: &TrajectoryEnsemble,
    snapshot: usize,
    density: &[f64],
    grid: &Grid1D,
) -> Result<f64> {
    if snapshot >= ensemble.positions.len() {
        return Err(Error::Precondition(format!(
            "snapshot {snapshot} out of range ({} stored)",
            ensemble.positions.len()
        )));
    }
    let xs = ensemble.active_positions(snapshot);
    if xs.len() < MIN_TRAJECTORIES {
        return Err(Error::TooFewTrajectories {
            got: xs.len(),
            needed: MIN_TRAJECTORIES,
        });
    }
    let cdf = InverseCdf::new(density, grid)?;
    Ok(ks_distance(&xs, |x| cdf.cdf(x)))
}
