use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_state::Grid1D;

/// Time-independent external potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Free,
    /// `½mω²(x − x0)²`.
    Harmonic {
        omega: f64,
        #[serde(default)]
        x0: f64,
    },
    /// `h·((x/(s/2))² − 1)²`: minima at `±s/2`, barrier `h` at the origin.
    DoubleWell {
        barrier_height: f64,
        separation: f64,
    },
    /// Values on the grid nodes.
    Sampled {
        values: Vec<f64>,
    },
}

impl Potential {
    pub fn validate(&self, grid: &Grid1D) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self {
            Potential::Free => Ok(()),
            Potential::Harmonic { omega, x0 } => {
                if !(omega.is_finite() && *omega > 0.0) || !x0.is_finite() {
                    return bad(format!("harmonic omega must be positive, got {omega}"));
                }
                Ok(())
            }
            Potential::DoubleWell {
                barrier_height,
                separation,
            } => {
                if !(barrier_height.is_finite() && *barrier_height > 0.0)
                    || !(separation.is_finite() && *separation > 0.0)
                {
                    return bad("double_well barrier_height and separation must be positive".into());
                }
                Ok(())
            }
            Potential::Sampled { values } => {
                if values.len() != grid.len() {
                    return bad(format!(
                        "sampled potential has {} values, grid has {}",
                        values.len(),
                        grid.len()
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("sampled potential must be finite".into());
                }
                Ok(())
            }
        }
    }

    /// Potential on every node of `grid`.
    pub fn on_grid(&self, grid: &Grid1D, mass: f64) -> Vec<f64> {
        match self {
            Potential::Free => vec![0.0; grid.len()],
            Potential::Harmonic { omega, x0 } => grid
                .xs()
                .iter()
                .map(|x| 0.5 * mass * omega * omega * (x - x0).powi(2))
                .collect(),
            Potential::DoubleWell {
                barrier_height,
                separation,
            } => grid
                .xs()
                .iter()
                .map(|x| barrier_height * ((2.0 * x / separation).powi(2) - 1.0).powi(2))
                .collect(),
            Potential::Sampled { values } => values.clone(),
        }
    }
}
