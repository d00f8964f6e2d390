use num_complex::Complex64;

use super::calculus::simpson;
use super::grid::Grid1D;
use crate::error::{Error, Result};

/// Index range `[lo, hi]` (inclusive) on which a wavefunction lives.
///
/// Free-space states span the whole grid. Hard-wall states are zero outside
/// the walls, vanish on the wall nodes `lo` and `hi`, and are differentiated
/// only inside `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub lo: usize,
    pub hi: usize,
    pub walls: bool,
}

impl Support {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

/// Complex amplitudes on a grid together with `m` and `ħ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid1D,
    amps: Vec<Complex64>,
    mass: f64,
    hbar: f64,
    support: Support,
}

impl Wavefunction {
    /// Wraps already normalized amplitudes; fails if `|1 − ∫|ψ|²| > tol_norm`.
    pub fn new(
        grid: Grid1D,
        amps: Vec<Complex64>,
        mass: f64,
        hbar: f64,
        tol_norm: f64,
    ) -> Result<Self> {
        let psi = Self::unchecked(grid, amps, mass, hbar)?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > tol_norm {
            return Err(Error::NotNormalized {
                norm,
                tol: tol_norm,
            });
        }
        Ok(psi)
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(grid: Grid1D, amps: Vec<Complex64>, mass: f64, hbar: f64) -> Result<Self> {
        let mut psi = Self::unchecked(grid, amps, mass, hbar)?;
        psi.renormalize()?;
        Ok(psi)
    }

    fn unchecked(grid: Grid1D, amps: Vec<Complex64>, mass: f64, hbar: f64) -> Result<Self> {
        grid.check_len(amps.len())?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        let support = Support {
            lo: 0,
            hi: grid.len() - 1,
            walls: false,
        };
        Ok(Self {
            grid,
            amps,
            mass,
            hbar,
            support,
        })
    }

    /// Restricts the state to hard walls at nodes `lo` and `hi`. Amplitudes
    /// outside and on the walls are set to zero, then the state is
    /// renormalized.
    pub fn with_walls(mut self, lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi >= self.grid.len() || hi - lo < 6 {
            return Err(Error::InvalidParameter(format!(
                "wall nodes [{lo}, {hi}] must enclose at least 6 intervals inside the grid"
            )));
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i <= lo || i >= hi {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.support = Support {
            lo,
            hi,
            walls: true,
        };
        self.renormalize()?;
        Ok(self)
    }

    fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("wavefunction has zero norm".into()));
        }
        let s = 1.0 / norm.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// True for states that admit the free-space Fourier treatment.
    pub fn is_spectral(&self) -> bool {
        !self.support.walls
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `∫|ψ|² dx` by Simpson's rule over the support.
    pub fn norm(&self) -> f64 {
        let s = self.support;
        let rho: Vec<f64> = self.amps[s.range()].iter().map(|a| a.norm_sqr()).collect();
        simpson(&rho, self.grid.dx())
    }

    /// Largest edge amplitude relative to the maximum amplitude.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.amps.iter().fold(0.0f64, |m, a| m.max(a.norm()));
        let edge = self.amps[0]
            .norm()
            .max(self.amps[self.amps.len() - 1].norm());
        if max == 0.0 {
            return f64::INFINITY;
        }
        edge / max
    }

    /// Fails with [`Error::BoundaryLeakage`] unless `|ψ|` has decayed at both
    /// edges. Hard-wall states pass trivially.
    pub fn check_boundary_decay(&self, boundary_eps: f64) -> Result<()> {
        if self.support.walls {
            return Ok(());
        }
        let ratio = self.boundary_ratio();
        if !(ratio < boundary_eps) {
            return Err(Error::BoundaryLeakage {
                ratio,
                limit: boundary_eps,
            });
        }
        Ok(())
    }

    /// Multiplies by `exp(i·phase(x))`; density-only quantities are unchanged.
    pub fn with_phase(&self, phase: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for (i, a) in out.amps.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, phase(self.grid.x(i)));
        }
        out
    }

    /// Galilean boost `ψ → ψ·exp(i p0 x/ħ)`.
    pub fn boosted(&self, p0: f64) -> Self {
        let hbar = self.hbar;
        self.with_phase(|x| p0 * x / hbar)
    }

    pub(crate) fn with_amplitudes(&self, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), self.amps.len());
        Self {
            amps,
            ..self.clone()
        }
    }
}
