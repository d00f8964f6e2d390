use serde::{Deserialize, Serialize};

use crate::bohmian::{FieldOptions, PolarFields};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid_state::{simpson, AnalyticState, Grid1D, Wavefunction};
use crate::sampling::{stream_rng, InverseCdf};
use crate::tolerances::Tolerances;

/// Relative mismatch between `ρ(μ + s)` and `ρ(μ − s)` above which a
/// density is rejected as asymmetric.
const SYMMETRY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrlbConfig {
    pub n_samples: usize,
    pub n_trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub exec: Exec,
}

impl CrlbConfig {
    pub fn new(n_samples: usize, n_trials: usize, seed: u64) -> Self {
        Self {
            n_samples,
            n_trials,
            seed,
            exec: Exec::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples < 10 {
            return Err(Error::Precondition(format!(
                "n_samples must be at least 10, got {}",
                self.n_samples
            )));
        }
        if self.n_trials < 1000 {
            return Err(Error::Precondition(format!(
                "n_trials must be at least 1000, got {}",
                self.n_trials
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrlbOutcome {
    /// Variance of the sample-mean estimator across trials.
    pub empirical_var: f64,
    /// `1/(n_samples·I)`.
    pub crlb: f64,
    pub fisher: f64,
    pub ratio: f64,
    pub n_samples: usize,
    pub n_trials: usize,
}

impl CrlbOutcome {
    /// `empirical_var ≥ crlb·(1 − 3/√n_trials)`.
    pub fn respects_bound(&self) -> bool {
        self.empirical_var >= self.crlb * (1.0 - 3.0 / (self.n_trials as f64).sqrt())
    }
}

/// Largest `|ρ(μ+s) − ρ(μ−s)|` over the grid, relative to `max ρ`.
fn asymmetry(rho: &[f64], grid: &Grid1D) -> f64 {
    let norm = simpson(rho, grid.dx());
    let xs = grid.xs();
    let mu = simpson(
        &rho.iter().zip(&xs).map(|(r, x)| r * x).collect::<Vec<_>>(),
        grid.dx(),
    ) / norm;
    let peak = rho.iter().cloned().fold(0.0, f64::max);
    let at = |x: f64| -> f64 {
        let s = (x - grid.x_min()) / grid.dx();
        if s < 0.0 || s > (grid.len() - 1) as f64 {
            return 0.0;
        }
        let j = (s.floor() as usize).min(grid.len() - 2);
        let t = s - j as f64;
        rho[j] * (1.0 - t) + rho[j + 1] * t
    };
    xs.iter()
        .zip(rho)
        .map(|(&x, &r)| (r - at(2.0 * mu - x)).abs())
        .fold(0.0, f64::max)
        / peak
}

/// Location-estimation experiment `y = θ + x`, `x ~ ρ`, at `θ = 0`.
///
/// Each trial draws `n_samples` values by inverse-CDF sampling from its own
/// ChaCha8 stream, so the result does not depend on `cfg.exec`. The sample
/// mean is the estimator; it is unbiased only for symmetric densities, which
/// is checked.
pub fn crlb_monte_carlo(
    psi: &Wavefunction,
    cfg: &CrlbConfig,
    tol: &Tolerances,
) -> Result<CrlbOutcome> {
    cfg.validate()?;
    let rho = psi.density();
    let a = asymmetry(&rho, psi.grid());
    if a > SYMMETRY_TOL {
        return Err(Error::AsymmetricDensity(a));
    }
    let fisher =
        PolarFields::compute(psi, FieldOptions::with_eps(tol.eps_node))?.fisher_information();
    let inv = InverseCdf::new(&rho, psi.grid())?;

    let estimates = cfg.exec.map_range(cfg.n_trials, |t| {
        let mut rng = stream_rng(cfg.seed, t as u64);
        inv.sample(cfg.n_samples, &mut rng).iter().sum::<f64>() / cfg.n_samples as f64
    });
    let m = cfg.n_trials as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let empirical_var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let crlb = 1.0 / (cfg.n_samples as f64 * fisher);
    Ok(CrlbOutcome {
        empirical_var,
        crlb,
        fisher,
        ratio: empirical_var / crlb,
        n_samples: cfg.n_samples,
        n_trials: cfg.n_trials,
    })
}

/// [`crlb_monte_carlo`] for an analytic state sampled on `grid`.
pub fn crlb_monte_carlo_state(
    state: &AnalyticState,
    grid: &Grid1D,
    mass: f64,
    hbar: f64,
    cfg: &CrlbConfig,
    tol: &Tolerances,
) -> Result<CrlbOutcome> {
    cfg.validate()?;
    let psi = state.sample(grid, mass, hbar, tol)?;
    crlb_monte_carlo(&psi, cfg, tol)
}
