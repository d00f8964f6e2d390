use serde::{Deserialize, Serialize};

use super::config::{GridConfig, Physics, RunConfig, StateKind, StateSpec};
use crate::bohmian::{FieldOptions, PolarFields};
use crate::bounds::{
    bounds_report, crlb_monte_carlo, moment_stats, BoundsReport, CrlbOutcome, MomentStats,
};
use crate::dynamics::{
    bounds_over_time, continuity_residual, equivariance_distance, integrate_trajectories,
    sample_initial_positions, split_step_evolve, TimePoint,
};
use crate::error::{Error, Result};
use crate::grid_state::{random_band_limited, Grid1D, Scheme, Wavefunction};
use crate::sampling::ks_critical;
use crate::tolerances::Tolerances;

pub const EXIT_OK: i32 = 0;
/// A bound-chain or identity check failed.
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
/// Leakage, instability, node-dominated states and similar.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Static moments and bounds (plus the optional Cramér-Rao experiment).
    Verify,
    /// Everything in `Verify`, then evolution and optional trajectories.
    Evolve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub software: String,
    pub version: String,
    pub config_hash: String,
    pub mode: RunMode,
    pub grid: GridConfig,
    pub physics: Physics,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Numerical,
    Input,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordError {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<&Error> for RecordError {
    fn from(e: &Error) -> Self {
        Self {
            kind: if e.is_numerical() {
                ErrorKind::Numerical
            } else {
                ErrorKind::Input
            },
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrlbRecord {
    pub outcome: Option<CrlbOutcome>,
    /// Why the experiment was not run (asymmetric density).
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub n_particles: usize,
    pub n_flagged: usize,
    pub order_preserved: bool,
    pub ks_initial: f64,
    pub ks_final: f64,
    /// KS critical value at the 1 % level for the usable particle count.
    pub ks_critical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsRecord {
    pub dt: f64,
    pub steps: usize,
    pub max_norm_drift: f64,
    pub energy_drift: f64,
    pub max_continuity_residual: f64,
    pub chain_ok_all: bool,
    pub time_series: Vec<TimePoint>,
    pub trajectories: Option<TrajectorySummary>,
}

/// Gridded field values for plotting; `NaN` at masked points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldData {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub p_q: Vec<f64>,
    pub osmotic: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: String,
    pub family: String,
    pub status: Status,
    pub error: Option<RecordError>,
    pub stats: Option<MomentStats>,
    pub bounds: Option<BoundsReport>,
    pub crlb: Option<CrlbRecord>,
    pub dynamics: Option<DynamicsRecord>,
    /// Not serialized; see [`super::emit_plot_data`].
    #[serde(skip)]
    pub fields: Option<FieldData>,
}

impl StateRecord {
    /// Whether a completed record failed a chain, gap or identity check at
    /// any time.
    pub fn violation(&self) -> bool {
        let statics = self.bounds.is_some_and(|b| !b.ok());
        let dynamic = self
            .dynamics
            .as_ref()
            .is_some_and(|d| d.time_series.iter().any(|p| !p.bounds.ok()));
        statics || dynamic
    }

    /// Chain ordering held statically and at every snapshot.
    pub fn chain_ok(&self) -> bool {
        self.bounds.is_some_and(|b| b.chain_ok)
            && self.dynamics.as_ref().is_none_or(|d| d.chain_ok_all)
    }

    fn forbidden(&self) -> bool {
        self.bounds.is_some_and(|b| b.forbidden)
            || self
                .dynamics
                .as_ref()
                .is_some_and(|d| d.time_series.iter().any(|p| p.bounds.forbidden))
    }

    fn all_bounds(&self) -> impl Iterator<Item = &BoundsReport> {
        self.bounds.iter().chain(
            self.dynamics
                .iter()
                .flat_map(|d| d.time_series.iter().map(|p| &p.bounds)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_states: usize,
    pub n_ok: usize,
    pub n_errored: usize,
    pub n_numerical_errors: usize,
    pub n_input_errors: usize,
    pub n_chain_ok: usize,
    pub n_chain_violations: usize,
    pub n_identity_violations: usize,
    pub n_forbidden: usize,
    pub max_residual_q: f64,
    pub max_residual_var: f64,
    pub max_residual_cov: f64,
    pub max_residual_mean: f64,
    pub exit_code: i32,
}

impl Summary {
    pub fn from_records(records: &[StateRecord]) -> Self {
        let done: Vec<&StateRecord> = records.iter().filter(|r| r.status == Status::Ok).collect();
        let errs: Vec<&RecordError> = records.iter().filter_map(|r| r.error.as_ref()).collect();
        let n_numerical = errs
            .iter()
            .filter(|e| e.kind == ErrorKind::Numerical)
            .count();
        let n_chain_ok = done.iter().filter(|r| r.chain_ok()).count();
        let n_identity_violations = done
            .iter()
            .filter(|r| r.all_bounds().any(|b| !b.identities_ok))
            .count();
        let max = |f: fn(&BoundsReport) -> f64| {
            done.iter()
                .flat_map(|r| r.all_bounds())
                .map(f)
                .fold(0.0, f64::max)
        };
        let violations = done.iter().any(|r| r.violation());
        let exit_code = if violations {
            EXIT_VIOLATION
        } else if n_numerical > 0 {
            EXIT_NUMERICAL
        } else if !errs.is_empty() {
            EXIT_CONFIG
        } else {
            EXIT_OK
        };
        Self {
            n_states: records.len(),
            n_ok: done.len(),
            n_errored: errs.len(),
            n_numerical_errors: n_numerical,
            n_input_errors: errs.len() - n_numerical,
            n_chain_ok,
            n_chain_violations: done.len() - n_chain_ok,
            n_identity_violations,
            n_forbidden: done.iter().filter(|r| r.forbidden()).count(),
            max_residual_q: max(|b| b.residual_q_identity),
            max_residual_var: max(|b| b.residual_var_identity),
            max_residual_cov: max(|b| b.residual_cov_identity),
            max_residual_mean: max(|b| b.residual_mean_identity),
            exit_code,
        }
    }
}

/// One swept parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: String,
    pub value: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusResult {
    pub provenance: Provenance,
    pub sweep: Option<SweepPoint>,
    pub records: Vec<StateRecord>,
    pub summary: Summary,
}

impl CorpusResult {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}

fn sample(spec: &StateSpec, grid: &Grid1D, cfg: &RunConfig) -> Result<Wavefunction> {
    let Physics { hbar, mass } = cfg.physics;
    match spec.kind {
        StateKind::Analytic(s) => s.sample(grid, mass, hbar, &cfg.tolerances),
        StateKind::Random(r) => {
            let psi = random_band_limited(grid, r.seed, mass, hbar)?;
            psi.check_boundary_decay(cfg.tolerances.boundary_eps)
                .map_err(|e| Error::GridTooSmall(format!("random_band_limited: {e}")))?;
            Ok(psi)
        }
    }
}

/// Plotting fields use Fourier derivatives when the state allows them: they
/// resolve the density tails far better than the finite-difference stencils.
fn field_data(psi: &Wavefunction, tol: &Tolerances) -> Result<FieldData> {
    let scheme = if psi.is_spectral() {
        Scheme::Spectral
    } else {
        Scheme::Central4
    };
    let f = PolarFields::compute(
        psi,
        FieldOptions {
            eps_node: tol.eps_node,
            scheme,
        },
    )?;
    Ok(FieldData {
        x: psi.grid().xs(),
        rho: f.rho.clone(),
        p_q: f.p_q.clone(),
        osmotic: f.osmotic.clone(),
        q: f.q.clone(),
    })
}

fn run_dynamics(psi: &Wavefunction, cfg: &RunConfig) -> Result<DynamicsRecord> {
    let tol = &cfg.tolerances;
    let evo_cfg = cfg
        .dynamics
        .as_ref()
        .ok_or_else(|| Error::Config("evolve needs a dynamics section".into()))?;
    let ev = split_step_evolve(psi, evo_cfg, tol)?;
    let series = bounds_over_time(&ev, tol, cfg.exec)?;
    let e0 = series[0].energy;
    let e1 = series[series.len() - 1].energy;
    let max_continuity_residual = ev
        .snapshots
        .windows(2)
        .map(|w| continuity_residual(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let trajectories = match &cfg.trajectories {
        None => None,
        Some(t) => {
            let grid = psi.grid();
            let x0 = sample_initial_positions(&psi.density(), grid, t.n_particles, t.seed)?;
            let ens = integrate_trajectories(&ev, &x0, t.dt_traj.unwrap_or(ev.dt), tol, cfg.exec)?;
            let last = ev.snapshots.len() - 1;
            let usable = ens.n_particles() - ens.n_flagged();
            Some(TrajectorySummary {
                n_particles: ens.n_particles(),
                n_flagged: ens.n_flagged(),
                order_preserved: ens.order_preserved(),
                ks_initial: equivariance_distance(&ens, 0, &psi.density(), grid)?,
                ks_final: equivariance_distance(&ens, last, &ev.last().psi.density(), grid)?,
                ks_critical: ks_critical(usable, 0.01),
            })
        }
    };
    Ok(DynamicsRecord {
        dt: ev.dt,
        steps: ev.steps,
        max_norm_drift: series
            .iter()
            .map(|p| (p.norm - 1.0).abs())
            .fold(0.0, f64::max),
        energy_drift: ((e1 - e0) / e0).abs(),
        max_continuity_residual,
        chain_ok_all: series.iter().all(|p| p.bounds.chain_ok),
        time_series: series,
        trajectories,
    })
}

fn process_state(spec: &StateSpec, grid: &Grid1D, cfg: &RunConfig, mode: RunMode) -> StateRecord {
    let mut rec = StateRecord {
        id: spec.id.clone(),
        family: spec.kind.family().to_owned(),
        status: Status::Ok,
        error: None,
        stats: None,
        bounds: None,
        crlb: None,
        dynamics: None,
        fields: None,
    };
    let tol = &cfg.tolerances;
    let result = (|| -> Result<()> {
        let psi = sample(spec, grid, cfg)?;
        let stats = moment_stats(&psi, tol)?;
        rec.bounds = Some(bounds_report(&stats, tol));
        rec.stats = Some(stats);
        rec.fields = Some(field_data(&psi, tol)?);
        if let Some(c) = &cfg.crlb {
            let mut c = *c;
            c.exec = cfg.exec;
            rec.crlb = Some(match crlb_monte_carlo(&psi, &c, tol) {
                Ok(o) => CrlbRecord {
                    outcome: Some(o),
                    skipped: None,
                },
                Err(e @ (Error::AsymmetricDensity(_) | Error::NonSpectral)) => CrlbRecord {
                    outcome: None,
                    skipped: Some(e.to_string()),
                },
                Err(e) => return Err(e),
            });
        }
        if mode == RunMode::Evolve {
            rec.dynamics = Some(run_dynamics(&psi, cfg)?);
        }
        Ok(())
    })();
    if let Err(e) = result {
        rec.status = Status::Error;
        rec.error = Some(RecordError::from(&e));
    }
    rec
}

/// Runs every state of `cfg`. Per-state failures are recorded and do not
/// stop the run; only configuration problems abort it.
pub fn run_corpus(cfg: &RunConfig, mode: RunMode) -> Result<CorpusResult> {
    if mode == RunMode::Evolve && cfg.dynamics.is_none() {
        return Err(Error::Config("dynamics: required by evolve".into()));
    }
    let grid = cfg.grid.build()?;
    let records = cfg
        .exec
        .map_slice(&cfg.states, |s| process_state(s, &grid, cfg, mode));
    let summary = Summary::from_records(&records);
    Ok(CorpusResult {
        provenance: Provenance {
            software: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config_hash: cfg.hash.clone(),
            mode,
            grid: cfg.grid,
            physics: cfg.physics,
            tolerances: cfg.tolerances,
        },
        sweep: None,
        records,
        summary,
    })
}
