use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::potential::Potential;
use crate::error::{Error, Result};
use crate::grid_state::spectral::{plan, wavenumbers};
use crate::grid_state::{calculus_central4, momentum_moments, simpson, Wavefunction};
use crate::tolerances::Tolerances;

fn default_dt() -> f64 {
    1e-3
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub potential: Potential,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_final: f64,
    /// Steps between stored snapshots.
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

impl EvolutionConfig {
    pub fn new(potential: Potential, dt: f64, t_final: f64, snapshot_stride: usize) -> Self {
        Self {
            potential,
            dt,
            t_final,
            snapshot_stride,
        }
    }

    pub fn validate(&self, psi: &Wavefunction) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::Config(format!(
                "t_final ({}) must be at least dt ({})",
                self.t_final, self.dt
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        self.potential.validate(psi.grid())
    }

    /// Number of steps and the step actually used: `dt` is shrunk slightly
    /// so that a whole number of steps lands exactly on `t_final`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt).round().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub psi: Wavefunction,
}

/// Stored snapshots of one evolution. The first is the initial state and the
/// last is at `t_final`; all but possibly the last interval are
/// `snapshot_stride·dt` long.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub snapshots: Vec<Snapshot>,
    /// Step actually used.
    pub dt: f64,
    pub steps: usize,
    pub potential: Vec<f64>,
}

impl Evolution {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("an evolution stores at least one snapshot")
    }
}

/// Strang-split propagation `e^{−iVdt/2ħ} e^{−iTdt/ħ} e^{−iVdt/2ħ}`.
///
/// The edge amplitude is checked after every step; the run aborts with
/// [`Error::BoundaryLeakage`] rather than let the periodic kinetic step wrap
/// density around the grid.
pub fn split_step_evolve(
    psi0: &Wavefunction,
    cfg: &EvolutionConfig,
    tol: &Tolerances,
) -> Result<Evolution> {
    cfg.validate(psi0)?;
    if !psi0.is_spectral() {
        return Err(Error::NonSpectral);
    }
    psi0.check_boundary_decay(tol.boundary_eps)?;
    let grid = psi0.grid();
    let (hbar, mass) = (psi0.hbar(), psi0.mass());
    let n = grid.len();
    let (steps, dt) = cfg.steps();

    let v = cfg.potential.on_grid(grid, mass);
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if dt * vmax / hbar > 0.5 {
        return Err(Error::UnstableStep(dt * vmax / hbar));
    }
    let half_v: Vec<Complex64> = v
        .iter()
        .map(|vi| Complex64::from_polar(1.0, -vi * dt / (2.0 * hbar)))
        .collect();
    // the 1/n of the inverse transform is folded into the kinetic factor
    let kinetic: Vec<Complex64> = wavenumbers(n, grid.dx())
        .iter()
        .map(|k| Complex64::from_polar(1.0 / n as f64, -hbar * k * k * dt / (2.0 * mass)))
        .collect();
    let fwd = plan(n, false);
    let inv = plan(n, true);

    let mut amps = psi0.amplitudes().to_vec();
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        psi: psi0.clone(),
    }];
    for step in 1..=steps {
        amps.iter_mut().zip(&half_v).for_each(|(a, h)| *a *= h);
        fwd.process(&mut amps);
        amps.iter_mut().zip(&kinetic).for_each(|(a, k)| *a *= k);
        inv.process(&mut amps);
        amps.iter_mut().zip(&half_v).for_each(|(a, h)| *a *= h);

        let peak = amps.iter().fold(0.0f64, |m, a| m.max(a.norm()));
        let edge = amps[0].norm().max(amps[n - 1].norm());
        if !(edge < tol.boundary_eps * peak) {
            return Err(Error::BoundaryLeakage {
                ratio: edge / peak,
                limit: tol.boundary_eps,
            });
        }
        if step % cfg.snapshot_stride == 0 || step == steps {
            let psi = psi0.with_amplitudes(amps.clone());
            let norm = psi.norm();
            if (norm - 1.0).abs() > tol.tol_norm {
                return Err(Error::NotNormalized {
                    norm,
                    tol: tol.tol_norm,
                });
            }
            snapshots.push(Snapshot {
                t: step as f64 * dt,
                psi,
            });
        }
    }
    Ok(Evolution {
        snapshots,
        dt,
        steps,
        potential: v,
    })
}

/// `⟨H⟩ = ⟨P̂²⟩/2m + ∫Vρ`, with `⟨P̂²⟩` from momentum space.
pub fn energy(psi: &Wavefunction, potential: &[f64], tol: &Tolerances) -> Result<f64> {
    psi.grid().check_len(potential.len())?;
    let m = momentum_moments(psi, tol.boundary_eps)?;
    let rho = psi.density();
    let vrho: Vec<f64> = rho.iter().zip(potential).map(|(r, v)| r * v).collect();
    Ok(m.second / (2.0 * psi.mass()) + simpson(&vrho, psi.grid().dx()))
}

/// Probability current `j = (ħ/m)·Im(ψ*ψ')`, defined everywhere including
/// nodes.
fn current(psi: &Wavefunction) -> Result<Vec<f64>> {
    let d = calculus_central4(psi.amplitudes(), psi.grid().dx(), 1)?;
    let c = psi.hbar() / psi.mass();
    Ok(psi
        .amplitudes()
        .iter()
        .zip(&d)
        .map(|(a, da)| c * (a.conj() * da).im)
        .collect())
}

/// L2 norm of `∂ρ/∂t + ∂j/∂x` between two snapshots, with the time
/// derivative as a forward difference and `j` averaged over both ends.
pub fn continuity_residual(a: &Snapshot, b: &Snapshot) -> Result<f64> {
    let grid = a.psi.grid();
    if grid != b.psi.grid() {
        return Err(Error::Precondition(
            "snapshots live on different grids".into(),
        ));
    }
    let dt = b.t - a.t;
    if !(dt > 0.0) {
        return Err(Error::Precondition(
            "snapshots must be in increasing time order".into(),
        ));
    }
    let (ja, jb) = (current(&a.psi)?, current(&b.psi)?);
    let j: Vec<f64> = ja.iter().zip(&jb).map(|(x, y)| 0.5 * (x + y)).collect();
    let dj = calculus_central4(&j, grid.dx(), 1)?;
    let (ra, rb) = (a.psi.density(), b.psi.density());
    let sq: Vec<f64> = (0..grid.len())
        .map(|i| ((rb[i] - ra[i]) / dt + dj[i]).powi(2))
        .collect();
    Ok(simpson(&sq, grid.dx()).sqrt())
}
