use serde::{Deserialize, Serialize};

use super::moments::MomentStats;
use crate::tolerances::Tolerances;

/// The three lower bounds on `Var(X̂)·Var(P̂)` and their ordering.
///
/// - Heisenberg `ħ²/4`
/// - Robertson-Schrödinger `ħ²/4 + Cov(x, p_q)²`
/// - Cramér-Rao `ħ²/4 + Var(x)·Var(P_q)`
///
/// `Δ = Var(x)Var(P_q) − Cov(x, p_q)²` is the Cauchy-Schwarz gap between the
/// last two. All comparisons allow `10·tol_identity·product` of slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub product: f64,
    pub bound_heisenberg: f64,
    pub bound_rs: f64,
    pub bound_cr: f64,
    pub delta: f64,
    /// Slack used by every comparison below.
    pub chain_tolerance: f64,
    pub chain_ok: bool,
    /// `product < bound_cr` beyond tolerance; this cannot happen for a valid
    /// state and indicates a numerical failure.
    pub forbidden: bool,
    pub delta_ok: bool,
    pub residual_q_identity: f64,
    pub residual_var_identity: f64,
    pub residual_cov_identity: f64,
    pub residual_mean_identity: f64,
    pub identities_ok: bool,
    pub masked_fraction: f64,
}

impl BoundsReport {
    pub fn ok(&self) -> bool {
        self.chain_ok && self.delta_ok && self.identities_ok
    }
}

pub fn bounds_report(s: &MomentStats, tol: &Tolerances) -> BoundsReport {
    let h2 = s.hbar * s.hbar / 4.0;
    let product = s.var_x * s.var_p_spectral;
    let bound_heisenberg = h2;
    let bound_rs = h2 + s.cov_x_pq * s.cov_x_pq;
    let bound_cr = h2 + s.var_x * s.var_pq;
    let delta = s.var_x * s.var_pq - s.cov_x_pq * s.cov_x_pq;
    let t = tol.tol_variance_identity() * product;
    let forbidden = product < bound_cr - t;
    let chain_ok = !forbidden && bound_cr >= bound_rs - t && bound_rs >= bound_heisenberg - t;
    let delta_ok = delta >= -tol.tol_identity * (s.var_x * s.var_pq).max(h2);

    let rq = s.residual_q_identity;
    let rv = s.residual_var_identity();
    let rc = s.residual_cov_identity();
    let rm = s.residual_mean_identity();
    let identities_ok = rq <= tol.tol_identity
        && rv <= tol.tol_variance_identity()
        && rc <= tol.tol_variance_identity()
        && rm <= tol.tol_variance_identity();
    BoundsReport {
        product,
        bound_heisenberg,
        bound_rs,
        bound_cr,
        delta,
        chain_tolerance: t,
        chain_ok,
        forbidden,
        delta_ok,
        residual_q_identity: rq,
        residual_var_identity: rv,
        residual_cov_identity: rc,
        residual_mean_identity: rm,
        identities_ok,
        masked_fraction: s.masked_fraction,
    }
}
