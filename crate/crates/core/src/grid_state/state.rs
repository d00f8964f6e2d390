use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::wavefunction::Wavefunction;
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

/// Gaussian envelope `|ψ|² = N(x0, σ²)` with phase
/// `S(x) = p0·x + α(x−x0)² + β(x−x0)³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    #[serde(default = "zero")]
    pub x0: f64,
    #[serde(default = "zero")]
    pub p0: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "zero")]
    pub alpha: f64,
    #[serde(default = "zero")]
    pub beta: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        Self {
            x0: 0.0,
            p0: 0.0,
            sigma: 1.0,
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

/// Closed-form test states.
///
/// The three Gaussian families share one parameter set; they differ only in
/// which phase terms a configuration is expected to set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticState {
    Gaussian(GaussianParams),
    ChirpedGaussian(GaussianParams),
    CubicPhaseGaussian(GaussianParams),
    HoEigenstate {
        n: u32,
        #[serde(default = "one")]
        omega: f64,
        #[serde(default = "zero")]
        x0: f64,
    },
    /// `g(x − x0 − a/2) + e^{iφ} g(x − x0 + a/2)` with Gaussian `g` of width
    /// `sigma` and momentum `p0`.
    TwoGaussianSuperposition {
        #[serde(default = "zero")]
        x0: f64,
        #[serde(default = "zero")]
        p0: f64,
        #[serde(default = "one")]
        sigma: f64,
        a: f64,
        #[serde(default = "zero")]
        phi: f64,
    },
    /// `sin(nπ(x − x0)/L)` between hard walls at `x0` and `x0 + L`; `n ≥ 1`.
    BoxEigenstate {
        n: u32,
        #[serde(rename = "L", alias = "length")]
        length: f64,
        #[serde(default = "zero")]
        x0: f64,
    },
}

/// Analytically known moments of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormMoments {
    pub var_x: f64,
    pub var_p: f64,
    pub var_pq: f64,
    pub cov_x_pq: f64,
    pub fisher: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {v}"
        )))
    }
}

/// Normalized Hermite function `φ_n(ξ)` by the three-term recurrence.
fn hermite_function(n: u32, xi: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * xi * prev;
    for k in 1..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * xi * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl AnalyticState {
    pub fn family(&self) -> &'static str {
        match self {
            AnalyticState::Gaussian(_) => "gaussian",
            AnalyticState::ChirpedGaussian(_) => "chirped_gaussian",
            AnalyticState::CubicPhaseGaussian(_) => "cubic_phase_gaussian",
            AnalyticState::HoEigenstate { .. } => "ho_eigenstate",
            AnalyticState::TwoGaussianSuperposition { .. } => "two_gaussian_superposition",
            AnalyticState::BoxEigenstate { .. } => "box_eigenstate",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AnalyticState::Gaussian(p)
            | AnalyticState::ChirpedGaussian(p)
            | AnalyticState::CubicPhaseGaussian(p) => {
                positive("sigma", p.sigma)?;
                for (k, v) in [
                    ("x0", p.x0),
                    ("p0", p.p0),
                    ("alpha", p.alpha),
                    ("beta", p.beta),
                ] {
                    finite(k, v)?;
                }
            }
            AnalyticState::HoEigenstate { omega, x0, .. } => {
                positive("omega", omega)?;
                finite("x0", x0)?;
            }
            AnalyticState::TwoGaussianSuperposition {
                x0,
                p0,
                sigma,
                a,
                phi,
            } => {
                positive("sigma", sigma)?;
                for (k, v) in [("x0", x0), ("p0", p0), ("a", a), ("phi", phi)] {
                    finite(k, v)?;
                }
            }
            AnalyticState::BoxEigenstate { n, length, x0 } => {
                positive("L", length)?;
                finite("x0", x0)?;
                if n == 0 {
                    return Err(Error::InvalidParameter(
                        "box_eigenstate quantum number starts at n = 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Centre and standard deviation of the position density, used for the
    /// grid coverage check.
    fn density_extent(&self, mass: f64, hbar: f64) -> (f64, f64) {
        match *self {
            AnalyticState::Gaussian(p)
            | AnalyticState::ChirpedGaussian(p)
            | AnalyticState::CubicPhaseGaussian(p) => (p.x0, p.sigma),
            AnalyticState::HoEigenstate { n, omega, x0 } => {
                (x0, ((n as f64 + 0.5) * hbar / (mass * omega)).sqrt())
            }
            AnalyticState::TwoGaussianSuperposition { x0, sigma, a, .. } => {
                (x0, (sigma * sigma + a * a / 4.0).sqrt())
            }
            AnalyticState::BoxEigenstate { length, x0, .. } => {
                (x0 + length / 2.0, length / 12f64.sqrt())
            }
        }
    }

    /// Unnormalized closed-form amplitude at `x`.
    pub fn amplitude(&self, x: f64, mass: f64, hbar: f64) -> Complex64 {
        match *self {
            AnalyticState::Gaussian(p)
            | AnalyticState::ChirpedGaussian(p)
            | AnalyticState::CubicPhaseGaussian(p) => {
                let u = x - p.x0;
                let r = (2.0 * PI * p.sigma * p.sigma).powf(-0.25)
                    * (-u * u / (4.0 * p.sigma * p.sigma)).exp();
                let s = p.p0 * x + p.alpha * u * u + p.beta * u * u * u;
                Complex64::from_polar(r, s / hbar)
            }
            AnalyticState::HoEigenstate { n, omega, x0 } => {
                let scale = (mass * omega / hbar).sqrt();
                Complex64::new(scale.sqrt() * hermite_function(n, scale * (x - x0)), 0.0)
            }
            AnalyticState::TwoGaussianSuperposition {
                x0,
                p0,
                sigma,
                a,
                phi,
            } => {
                let g = |c: f64| (-(x - c) * (x - c) / (4.0 * sigma * sigma)).exp();
                let plane = Complex64::from_polar(1.0, p0 * x / hbar);
                plane
                    * (Complex64::new(g(x0 + a / 2.0), 0.0)
                        + Complex64::from_polar(g(x0 - a / 2.0), phi))
            }
            AnalyticState::BoxEigenstate { n, length, x0 } => {
                let u = x - x0;
                if u <= 0.0 || u >= length {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(
                        (2.0 / length).sqrt() * (n as f64 * PI * u / length).sin(),
                        0.0,
                    )
                }
            }
        }
    }

    /// Samples the state on `grid` and renormalizes.
    ///
    /// Fails with [`Error::GridTooSmall`] if the grid does not cover ±5
    /// standard deviations of the density or if `|ψ|` has not decayed to
    /// `boundary_eps` of its peak at the edges. Box walls must sit on grid
    /// nodes.
    pub fn sample(
        &self,
        grid: &Grid1D,
        mass: f64,
        hbar: f64,
        tol: &Tolerances,
    ) -> Result<Wavefunction> {
        self.validate()?;
        if let AnalyticState::BoxEigenstate { length, x0, .. } = *self {
            let lo = grid.node_index(x0, 1e-6);
            let hi = grid.node_index(x0 + length, 1e-6);
            if !grid.contains(x0) || !grid.contains(x0 + length) {
                return Err(Error::GridTooSmall(format!(
                    "box [{x0}, {}] extends outside the grid",
                    x0 + length
                )));
            }
            let lo = lo.ok_or(Error::BoxWallOffGrid(x0))?;
            let hi = hi.ok_or(Error::BoxWallOffGrid(x0 + length))?;
            let amps = (0..grid.len())
                .map(|i| self.amplitude(grid.x(i), mass, hbar))
                .collect();
            return Wavefunction::normalized(*grid, amps, mass, hbar)?.with_walls(lo, hi);
        }

        let (centre, sd) = self.density_extent(mass, hbar);
        if centre - 5.0 * sd < grid.x_min() || centre + 5.0 * sd > grid.x_max() {
            return Err(Error::GridTooSmall(format!(
                "{} needs [{}, {}] (±5 sd), grid is [{}, {}]",
                self.family(),
                centre - 5.0 * sd,
                centre + 5.0 * sd,
                grid.x_min(),
                grid.x_max()
            )));
        }
        let amps = grid
            .xs()
            .iter()
            .map(|&x| self.amplitude(x, mass, hbar))
            .collect();
        let psi = Wavefunction::normalized(*grid, amps, mass, hbar)?;
        psi.check_boundary_decay(tol.boundary_eps)
            .map_err(|e| Error::GridTooSmall(format!("{}: {e}", self.family())))?;
        Ok(psi)
    }

    pub fn closed_form_moments(&self, mass: f64, hbar: f64) -> Option<ClosedFormMoments> {
        match *self {
            AnalyticState::Gaussian(p)
            | AnalyticState::ChirpedGaussian(p)
            | AnalyticState::CubicPhaseGaussian(p) => {
                let s2 = p.sigma * p.sigma;
                // p_q = p0 + 2αu + 3βu², u ~ N(0, σ²)
                let var_pq = 4.0 * p.alpha * p.alpha * s2 + 18.0 * p.beta * p.beta * s2 * s2;
                Some(ClosedFormMoments {
                    var_x: s2,
                    var_p: var_pq + hbar * hbar / (4.0 * s2),
                    var_pq,
                    cov_x_pq: 2.0 * p.alpha * s2,
                    fisher: 1.0 / s2,
                })
            }
            AnalyticState::HoEigenstate { n, omega, .. } => {
                let e = n as f64 + 0.5;
                let var_p = e * hbar * mass * omega;
                Some(ClosedFormMoments {
                    var_x: e * hbar / (mass * omega),
                    var_p,
                    var_pq: 0.0,
                    cov_x_pq: 0.0,
                    fisher: 4.0 * var_p / (hbar * hbar),
                })
            }
            AnalyticState::TwoGaussianSuperposition { .. } => None,
            AnalyticState::BoxEigenstate { n, length, .. } => {
                let k = n as f64 * PI / length;
                Some(ClosedFormMoments {
                    var_x: length * length * (1.0 / 12.0 - 1.0 / (2.0 * (n as f64 * PI).powi(2))),
                    var_p: (hbar * k).powi(2),
                    var_pq: 0.0,
                    cov_x_pq: 0.0,
                    fisher: 4.0 * k * k,
                })
            }
        }
    }
}

/// Seeded smooth random state: a truncated Fourier series with decaying
/// complex coefficients under a wide Gaussian envelope.
///
/// The constant mode dominates the sum of the others, so `|ψ|` stays bounded
/// away from zero wherever the envelope is appreciable and the state has no
/// nodes.
pub fn random_band_limited(grid: &Grid1D, seed: u64, mass: f64, hbar: f64) -> Result<Wavefunction> {
    const MODES: i32 = 4;
    const KAPPA: f64 = 0.6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = rng.random_range(1.0..1.8);
    let centre = rng.random_range(-1.0..1.0);
    let p0 = rng.random_range(-2.0..2.0);
    let ratio = rng.random_range(0.2..0.6);

    let mut coeffs: Vec<(f64, Complex64)> = (-MODES..=MODES)
        .filter(|&k| k != 0)
        .map(|k| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            (
                k as f64 * KAPPA,
                Complex64::new(re, im) * (-(k.abs() as f64) / 2.0).exp(),
            )
        })
        .collect();
    let total: f64 = coeffs.iter().map(|(_, c)| c.norm()).sum();
    for (_, c) in coeffs.iter_mut() {
        *c *= ratio / total;
    }
    coeffs.push((0.0, Complex64::new(1.0, 0.0)));

    let amps = grid
        .xs()
        .iter()
        .map(|&x| {
            let u = x - centre;
            let series: Complex64 = coeffs
                .iter()
                .map(|(k, c)| c * Complex64::from_polar(1.0, k * u))
                .sum();
            series * Complex64::from_polar((-u * u / (4.0 * width * width)).exp(), p0 * x / hbar)
        })
        .collect();
    Wavefunction::normalized(*grid, amps, mass, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_state::integrate;
    use approx::assert_abs_diff_eq;

    fn big() -> Grid1D {
        Grid1D::new(-20.0, 20.0, 4096).unwrap()
    }

    #[test]
    fn parses_family_objects_and_rejects_unknown_keys() {
        let s: AnalyticState = serde_json::from_str(
            r#"{"family": "gaussian", "x0": 0.0, "p0": 0.0, "sigma": 1.0, "alpha": 0.0, "beta": 0.0}"#,
        )
        .unwrap();
        assert_eq!(s, AnalyticState::Gaussian(GaussianParams::default()));
        let b: AnalyticState =
            serde_json::from_str(r#"{"family": "box_eigenstate", "n": 2, "L": 10}"#).unwrap();
        assert_eq!(
            b,
            AnalyticState::BoxEigenstate {
                n: 2,
                length: 10.0,
                x0: 0.0
            }
        );
        assert!(serde_json::from_str::<AnalyticState>(
            r#"{"family": "gaussian", "sigma": 1.0, "omega": 2.0}"#
        )
        .is_err());
        assert!(serde_json::from_str::<AnalyticState>(r#"{"family": "lorentzian"}"#).is_err());
    }

    #[test]
    fn gaussian_is_real_positive_and_normalized() {
        let psi = AnalyticState::Gaussian(GaussianParams::default())
            .sample(&big(), 1.0, 1.0, &Tolerances::default())
            .unwrap();
        assert!(psi.amplitudes().iter().all(|a| a.im == 0.0 && a.re >= 0.0));
        assert_abs_diff_eq!(
            integrate(&psi.density(), psi.grid()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // before renormalization the samples equal the closed form
        let g = big();
        let raw = AnalyticState::Gaussian(GaussianParams::default()).amplitude(0.3, 1.0, 1.0);
        assert_abs_diff_eq!(
            raw.re,
            (2.0 * PI).powf(-0.25) * (-0.09f64 / 4.0).exp(),
            epsilon = 1e-15
        );
        let _ = g;
    }

    #[test]
    fn ho_first_excited_is_odd_with_single_node() {
        let g = Grid1D::new(-20.0, 20.0, 4097).unwrap();
        let psi = AnalyticState::HoEigenstate {
            n: 1,
            omega: 1.0,
            x0: 0.0,
        }
        .sample(&g, 1.0, 1.0, &Tolerances::default())
        .unwrap();
        let a = psi.amplitudes();
        let n = a.len();
        for i in 0..n {
            assert_abs_diff_eq!(a[i].re, -a[n - 1 - i].re, epsilon = 1e-15);
        }
        assert_eq!(a[n / 2].re, 0.0);
        // one sign change among appreciable values
        let signs: Vec<f64> = a
            .iter()
            .filter(|z| z.re.abs() > 1e-12)
            .map(|z| z.re.signum())
            .collect();
        assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = Grid1D::new(-15.0, 15.0, 3001).unwrap();
        for n in 0..6 {
            for m in 0..6 {
                let f: Vec<f64> = g
                    .xs()
                    .iter()
                    .map(|&x| hermite_function(n, x) * hermite_function(m, x))
                    .collect();
                let v = integrate(&f, &g).unwrap();
                assert_abs_diff_eq!(v, if n == m { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn coverage_errors() {
        let g = Grid1D::new(-2.0, 2.0, 64).unwrap();
        assert!(matches!(
            AnalyticState::Gaussian(GaussianParams::default()).sample(
                &g,
                1.0,
                1.0,
                &Tolerances::default()
            ),
            Err(Error::GridTooSmall(_))
        ));
        // ±5σ covered but |ψ| at the edge is still e^{-6.25}
        let g = Grid1D::new(-5.5, 5.5, 256).unwrap();
        assert!(matches!(
            AnalyticState::Gaussian(GaussianParams::default()).sample(
                &g,
                1.0,
                1.0,
                &Tolerances::default()
            ),
            Err(Error::GridTooSmall(_))
        ));
    }

    #[test]
    fn box_state_zero_padded_and_walls_on_nodes() {
        let g = Grid1D::new(-5.0, 15.0, 4097).unwrap();
        let st = AnalyticState::BoxEigenstate {
            n: 1,
            length: 10.0,
            x0: 0.0,
        };
        let psi = st.sample(&g, 1.0, 1.0, &Tolerances::default()).unwrap();
        assert!(!psi.is_spectral());
        let s = psi.support();
        assert_eq!((s.lo, s.hi), (1024, 3072));
        assert!(psi.amplitudes()[..=1024].iter().all(|a| a.norm() == 0.0));
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);

        let off = AnalyticState::BoxEigenstate {
            n: 1,
            length: 10.0,
            x0: 0.001,
        };
        assert!(matches!(
            off.sample(&g, 1.0, 1.0, &Tolerances::default()),
            Err(Error::BoxWallOffGrid(_))
        ));
        let zero = AnalyticState::BoxEigenstate {
            n: 0,
            length: 10.0,
            x0: 0.0,
        };
        assert!(zero.sample(&g, 1.0, 1.0, &Tolerances::default()).is_err());
    }

    #[test]
    fn sampled_moments_match_closed_forms() {
        let g = big();
        let tol = Tolerances::default();
        let states = [
            AnalyticState::Gaussian(GaussianParams {
                sigma: 1.3,
                x0: 0.5,
                ..Default::default()
            }),
            AnalyticState::HoEigenstate {
                n: 3,
                omega: 1.5,
                x0: 0.0,
            },
        ];
        for st in states {
            let psi = st.sample(&g, 1.0, 1.0, &tol).unwrap();
            let cf = st.closed_form_moments(1.0, 1.0).unwrap();
            let rho = psi.density();
            let xs = g.xs();
            let m1 = integrate(
                &rho.iter().zip(&xs).map(|(r, x)| r * x).collect::<Vec<_>>(),
                &g,
            )
            .unwrap();
            let m2 = integrate(
                &rho.iter()
                    .zip(&xs)
                    .map(|(r, x)| r * (x - m1).powi(2))
                    .collect::<Vec<_>>(),
                &g,
            )
            .unwrap();
            assert_abs_diff_eq!(m2, cf.var_x, epsilon = 1e-10);
        }
    }

    #[test]
    fn random_states_are_seeded_and_node_free() {
        let g = big();
        let a = random_band_limited(&g, 7, 1.0, 1.0).unwrap();
        let b = random_band_limited(&g, 7, 1.0, 1.0).unwrap();
        let c = random_band_limited(&g, 8, 1.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.check_boundary_decay(1e-8).unwrap();
    }
}
