//! Bohmian field quantities and the Fisher information of the position
//! density.
//!
//! The phase `S` is never unwrapped globally; the local momentum
//! `ħ·Im(ψ'/ψ)` is obtained from phase differences between neighbouring
//! nodes (falling back to the complex quotient next to nodes). The quantum potential is evaluated from `ρ` through
//! `R''/R = ρ''/(2ρ) − ρ'²/(4ρ²)`, which stays smooth across sign changes of
//! real wavefunctions. Grid points with `ρ < eps_node · max ρ` are nodes:
//! the fields carry no value there and field quadratures skip them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_state::{simpson, Scheme, Wavefunction};

pub(crate) mod fields;

pub use fields::PolarFields;

/// Largest tolerated fraction of masked points between the outermost
/// unmasked points.
pub const MAX_MASKED_FRACTION: f64 = 0.05;

/// Node threshold and differentiation scheme for field evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldOptions {
    pub eps_node: f64,
    pub scheme: Scheme,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            eps_node: 1e-12,
            scheme: Scheme::Central4,
        }
    }
}

impl FieldOptions {
    pub fn with_eps(eps_node: f64) -> Self {
        Self {
            eps_node,
            ..Self::default()
        }
    }
}

/// A grid field that is undefined at node points.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField {
    /// `NaN` where `mask` is set.
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl MaskedField {
    pub fn get(&self, i: usize) -> Option<f64> {
        (!self.mask[i]).then(|| self.values[i])
    }

    pub fn unmasked(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.mask)
            .enumerate()
            .filter(|(_, (_, m))| !**m)
            .map(|(i, (v, _))| (i, *v))
    }
}

/// Local momentum `p_q = ħ·Im(ψ'/ψ)`, the gradient of the phase.
pub fn local_momentum(psi: &Wavefunction, opts: FieldOptions) -> Result<MaskedField> {
    let f = PolarFields::compute(psi, opts)?;
    Ok(f.masked(&f.p_q))
}

/// Osmotic momentum `ħ·R'/R = ħ·ρ'/(2ρ)`.
pub fn osmotic_momentum(psi: &Wavefunction, opts: FieldOptions) -> Result<MaskedField> {
    let f = PolarFields::compute(psi, opts)?;
    Ok(f.masked(&f.osmotic))
}

/// Quantum potential `Q = −(ħ²/2m)·R''/R`.
pub fn quantum_potential(psi: &Wavefunction, opts: FieldOptions) -> Result<MaskedField> {
    let f = PolarFields::compute(psi, opts)?;
    Ok(f.masked(&f.q))
}

/// Location Fisher information `I = ∫ ρ'²/ρ dx`.
pub fn fisher_information(psi: &Wavefunction, opts: FieldOptions) -> Result<f64> {
    Ok(PolarFields::compute(psi, opts)?.fisher_information())
}

/// Mean quantum potential together with its distance from `ħ²I/(8m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumPotentialMean {
    pub mean_q: f64,
    pub fisher: f64,
    /// `ħ²I/(8m)`.
    pub fisher_side: f64,
    /// `|Q̄ − ħ²I/(8m)|`.
    pub residual: f64,
    /// `residual / |Q̄|`.
    pub relative_residual: f64,
}

pub fn mean_quantum_potential(
    psi: &Wavefunction,
    opts: FieldOptions,
) -> Result<QuantumPotentialMean> {
    Ok(PolarFields::compute(psi, opts)?.quantum_potential_mean())
}

/// `ħ·(Re ψ · Im ψ' − Im ψ · Re ψ')/ρ`; the same quantity as
/// `ħ·Im(ψ'/ψ)` written without a complex division.
pub fn current_form_momentum(psi: Complex64, dpsi: Complex64, hbar: f64) -> f64 {
    hbar * (psi.re * dpsi.im - psi.im * dpsi.re) / psi.norm_sqr()
}

pub(crate) fn support_simpson(psi: &Wavefunction, integrand: impl Fn(usize) -> f64) -> f64 {
    let s = psi.support();
    let v: Vec<f64> = s.range().map(integrand).collect();
    simpson(&v, psi.grid().dx())
}

pub(crate) fn check_fraction(fraction: f64) -> Result<()> {
    if fraction >= MAX_MASKED_FRACTION {
        return Err(Error::NodeDominated(fraction));
    }
    Ok(())
}
