use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every stage of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of `∫|ψ|²` from one.
    pub tol_norm: f64,
    /// Relative tolerance of the mean-quantum-potential identity; the
    /// variance and covariance identities are held to ten times this.
    pub tol_identity: f64,
    /// Points with `ρ < eps_node · max ρ` are treated as nodes.
    pub eps_node: f64,
    /// Required decay of `|ψ|` at the grid edges relative to its maximum.
    pub boundary_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_norm: 1e-9,
            tol_identity: 1e-6,
            eps_node: 1e-12,
            boundary_eps: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_norm", self.tol_norm),
            ("tol_identity", self.tol_identity),
            ("eps_node", self.eps_node),
            ("boundary_eps", self.boundary_eps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "tolerances.{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Tolerance for the variance and covariance identities.
    pub fn tol_variance_identity(&self) -> f64 {
        10.0 * self.tol_identity
    }
}
