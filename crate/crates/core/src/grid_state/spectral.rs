//! Fourier-side tools: spectral derivatives and the momentum representation.
//!
//! The grid is treated as one period of length `n·dx`; this is harmless only
//! when `ψ` has decayed at both edges, which every public entry point checks.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::wavefunction::Wavefunction;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Signed FFT frequency index of bin `k` out of `n`.
#[inline]
pub(crate) fn signed_index(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Angular wavenumbers `2πk/(n·dx)` in FFT bin order.
pub(crate) fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let base = 2.0 * PI / (n as f64 * dx);
    (0..n).map(|k| base * signed_index(k, n) as f64).collect()
}

/// Derivative of the periodic trigonometric interpolant of `f`.
pub fn spectral_derivative(f: &[Complex64], dx: f64, order: u8) -> Result<Vec<Complex64>> {
    if order != 1 && order != 2 {
        return Err(Error::InvalidParameter(format!(
            "derivative order must be 1 or 2, got {order}"
        )));
    }
    let n = f.len();
    let mut buf = f.to_vec();
    plan(n, false).process(&mut buf);
    let k = wavenumbers(n, dx);
    for (j, b) in buf.iter_mut().enumerate() {
        let factor = match order {
            // the Nyquist bin of an even-length transform has no odd partner
            1 if n.is_multiple_of(2) && j == n / 2 => Complex64::new(0.0, 0.0),
            1 => Complex64::new(0.0, k[j]),
            _ => Complex64::new(-k[j] * k[j], 0.0),
        };
        *b *= factor / n as f64;
    }
    plan(n, true).process(&mut buf);
    Ok(buf)
}

/// Momentum-space amplitudes `ψ̃(p)` on the grid `p_k = 2πħk/(n·dx)`,
/// ordered by increasing `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpace {
    pub p: Vec<f64>,
    pub amps: Vec<Complex64>,
    pub dp: f64,
}

impl MomentumSpace {
    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Σ |ψ̃(p_k)|² dp`; the periodic rectangle rule is exact for the
    /// discrete transform.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dp
    }

    pub fn moments(&self) -> MomentumMoments {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (p, a) in self.p.iter().zip(&self.amps) {
            let w = a.norm_sqr();
            m0 += w;
            m1 += w * p;
            m2 += w * p * p;
        }
        MomentumMoments::from_raw(m1 / m0, m2 / m0)
    }
}

/// First two moments of the momentum operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMoments {
    pub mean: f64,
    pub second: f64,
    pub variance: f64,
}

impl MomentumMoments {
    fn from_raw(mean: f64, second: f64) -> Self {
        Self {
            mean,
            second,
            variance: second - mean * mean,
        }
    }
}

/// Physical-normalization DFT of `ψ`, `ψ̃(p) = (2πħ)^{-1/2} ∫ ψ(x) e^{-ipx/ħ} dx`.
pub fn to_momentum_space(psi: &Wavefunction, boundary_eps: f64) -> Result<MomentumSpace> {
    if !psi.is_spectral() {
        return Err(Error::NonSpectral);
    }
    psi.check_boundary_decay(boundary_eps)?;
    let grid = psi.grid();
    let hbar = psi.hbar();
    let n = grid.len();
    let dx = grid.dx();
    let mut buf = psi.amplitudes().to_vec();
    plan(n, false).process(&mut buf);

    let dp = 2.0 * PI * hbar / (n as f64 * dx);
    let scale = dx / (2.0 * PI * hbar).sqrt();
    let mut pairs: Vec<(i64, Complex64)> = buf
        .into_iter()
        .enumerate()
        .map(|(k, f)| {
            let kk = signed_index(k, n);
            let p = dp * kk as f64;
            // x_j = x_min + j·dx contributes the constant phase e^{-i p x_min/ħ}
            (
                kk,
                f * Complex64::from_polar(scale, -p * grid.x_min() / hbar),
            )
        })
        .collect();
    pairs.sort_by_key(|(k, _)| *k);
    Ok(MomentumSpace {
        p: pairs.iter().map(|(k, _)| dp * *k as f64).collect(),
        amps: pairs.into_iter().map(|(_, a)| a).collect(),
        dp,
    })
}

/// `∂ψ/∂x` by a Fourier method, independent of the finite-difference path.
///
/// Free-space states use the periodic transform of the whole grid. Hard-wall
/// states use the odd extension of the support across the walls (a sine
/// series), which is exact for box eigenstates. Entries outside the support
/// are zero.
pub fn operator_derivative(psi: &Wavefunction) -> Result<Vec<Complex64>> {
    let grid = psi.grid();
    let amps = psi.amplitudes();
    let s = psi.support();
    if !s.walls {
        return spectral_derivative(amps, grid.dx(), 1);
    }
    let m = s.hi - s.lo;
    let mut ext = Vec::with_capacity(2 * m);
    ext.extend_from_slice(&amps[s.lo..=s.hi]);
    ext[0] = Complex64::new(0.0, 0.0);
    ext[m] = Complex64::new(0.0, 0.0);
    for j in (1..m).rev() {
        ext.push(-amps[s.lo + j]);
    }
    let d = spectral_derivative(&ext, grid.dx(), 1)?;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    out[s.lo..=s.hi].copy_from_slice(&d[..=m]);
    Ok(out)
}

/// `⟨P̂⟩` and `⟨P̂²⟩` by the Fourier route: from `|ψ̃(p)|²` for free-space
/// states, and from the sine-series derivative for hard-wall states.
pub fn momentum_moments(psi: &Wavefunction, boundary_eps: f64) -> Result<MomentumMoments> {
    if psi.is_spectral() {
        return Ok(to_momentum_space(psi, boundary_eps)?.moments());
    }
    let hbar = psi.hbar();
    let d = operator_derivative(psi)?;
    let amps = psi.amplitudes();
    let s = psi.support();
    // trapezoid over the support; ψ vanishes on the walls
    let mut norm = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for i in s.range() {
        let w = if i == s.lo || i == s.hi { 0.5 } else { 1.0 };
        norm += w * amps[i].norm_sqr();
        m1 += w * hbar * (amps[i].conj() * d[i]).im;
        m2 += w * hbar * hbar * d[i].norm_sqr();
    }
    Ok(MomentumMoments::from_raw(m1 / norm, m2 / norm))
}
