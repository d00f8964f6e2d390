//! Grids, wavefunctions, analytic states and the numerical calculus used by
//! everything else.

mod calculus;
mod grid;
pub(crate) mod spectral;
mod state;
mod wavefunction;

pub(crate) use calculus::central4 as calculus_central4;
pub use calculus::{derivative, integrate, simpson, Sample, Scheme};
pub use grid::Grid1D;
pub use spectral::{
    momentum_moments, operator_derivative, spectral_derivative, to_momentum_space, MomentumMoments,
    MomentumSpace,
};
pub use state::{random_band_limited, AnalyticState, ClosedFormMoments, GaussianParams};
pub use wavefunction::{Support, Wavefunction};
