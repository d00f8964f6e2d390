//! Moments, the three-tier uncertainty bound chain and the Cramér-Rao
//! Monte-Carlo demonstration.
//!
//! `Var(P̂)` is computed twice: from the momentum-space density (the
//! reference) and as `Var(P_q) + ħ²I/4` from Bohmian fields. The bound chain
//! is always judged with the momentum-space value.

mod chain;
mod crlb;
mod moments;

pub use chain::{bounds_report, BoundsReport};
pub use crlb::{crlb_monte_carlo, crlb_monte_carlo_state, CrlbConfig, CrlbOutcome};
pub use moments::{covariance_identity_residual, moment_stats, CovarianceIdentity, MomentStats};
