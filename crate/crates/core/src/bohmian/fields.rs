use num_complex::Complex64;

use super::{check_fraction, support_simpson, FieldOptions, MaskedField, QuantumPotentialMean};
use crate::error::{Error, Result};
use crate::grid_state::{spectral_derivative, Scheme, Wavefunction};

/// Derived real fields of a wavefunction on its grid.
///
/// `p_q`, `osmotic` and `q` are `NaN` wherever `node_mask` is set; points
/// outside a hard-wall support are always masked.
#[derive(Debug, Clone)]
pub struct PolarFields<'a> {
    psi: &'a Wavefunction,
    pub rho: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub p_q: Vec<f64>,
    pub osmotic: Vec<f64>,
    pub q: Vec<f64>,
    pub node_mask: Vec<bool>,
    /// Masked share of the points between the first and last unmasked point;
    /// decaying tails do not count.
    pub masked_fraction: f64,
    pub(crate) drho: Vec<f64>,
    pub(crate) d2rho: Vec<f64>,
}

fn derivative_slice<T: crate::grid_state::Sample>(
    f: &[T],
    dx: f64,
    order: u8,
    scheme: Scheme,
) -> Result<Vec<T>> {
    match scheme {
        Scheme::Central4 => crate::grid_state::calculus_central4(f, dx, order),
        Scheme::Spectral => {
            let z: Vec<Complex64> = f.iter().map(|v| v.to_complex()).collect();
            Ok(spectral_derivative(&z, dx, order)?
                .into_iter()
                .map(T::from_complex)
                .collect())
        }
    }
}

/// First-derivative central4 weights (node index, weight·12h) at node `i`.
fn central4_weights(i: usize, n: usize) -> [(usize, f64); 5] {
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let fwd = |c: [f64; 5]| std::array::from_fn(|k| (k, c[k]));
    let bwd = |c: [f64; 5]| std::array::from_fn(|k| (n - 1 - k, -c[k]));
    match i {
        0 => fwd(EDGE0),
        1 => fwd(EDGE1),
        _ if i == n - 1 => bwd(EDGE0),
        _ if i == n - 2 => bwd(EDGE1),
        _ => [
            (i - 2, 1.0),
            (i - 1, -8.0),
            (i, 0.0),
            (i + 1, 8.0),
            (i + 2, -1.0),
        ],
    }
}

/// `Im(ψ'/ψ)` at node `i` by differencing the phase relative to node `i`.
///
/// The phase is smooth where the complex amplitude oscillates quickly, so
/// the stencil error involves derivatives of `S` rather than of `ψ`. Returns
/// `None` when a stencil node differs in phase by more than π/2 (a nearby node
/// or an under-resolved phase); the caller then uses the direct quotient.
fn phase_gradient(amps: &[Complex64], i: usize, dx: f64) -> Option<f64> {
    let a = amps[i];
    let mut acc = 0.0;
    for (j, c) in central4_weights(i, amps.len()) {
        if c == 0.0 {
            continue;
        }
        let d = (amps[j] * a.conj()).arg();
        if !(d.abs() <= std::f64::consts::FRAC_PI_2) {
            return None;
        }
        acc += c * d;
    }
    Some(acc / (12.0 * dx))
}

impl<'a> PolarFields<'a> {
    pub fn compute(psi: &'a Wavefunction, opts: FieldOptions) -> Result<Self> {
        if opts.scheme == Scheme::Spectral && !psi.is_spectral() {
            return Err(Error::NonSpectral);
        }
        let n = psi.grid().len();
        let dx = psi.grid().dx();
        let hbar = psi.hbar();
        let mass = psi.mass();
        let s = psi.support();
        let amps = &psi.amplitudes()[s.range()];

        let rho_s: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
        let dpsi = derivative_slice(amps, dx, 1, opts.scheme)?;
        let drho_s = derivative_slice(&rho_s, dx, 1, opts.scheme)?;
        let d2rho_s = derivative_slice(&rho_s, dx, 2, opts.scheme)?;

        let max_rho = rho_s.iter().fold(0.0f64, |m, &r| m.max(r));
        let threshold = opts.eps_node * max_rho;

        let mut rho = vec![0.0; n];
        let mut drho = vec![0.0; n];
        let mut d2rho = vec![0.0; n];
        let mut p_q = vec![f64::NAN; n];
        let mut osmotic = vec![f64::NAN; n];
        let mut q = vec![f64::NAN; n];
        let mut node_mask = vec![true; n];

        for (j, i) in s.range().enumerate() {
            let r = rho_s[j];
            rho[i] = r;
            drho[i] = drho_s[j];
            d2rho[i] = d2rho_s[j];
            if !(r > threshold) {
                continue;
            }
            node_mask[i] = false;
            let grad = match opts.scheme {
                Scheme::Central4 => phase_gradient(amps, j, dx),
                Scheme::Spectral => None,
            };
            p_q[i] = hbar * grad.unwrap_or_else(|| (dpsi[j] / amps[j]).im);
            osmotic[i] = hbar * drho_s[j] / (2.0 * r);
            let r2_over_r = d2rho_s[j] / (2.0 * r) - drho_s[j] * drho_s[j] / (4.0 * r * r);
            q[i] = -hbar * hbar / (2.0 * mass) * r2_over_r;
        }

        let first = node_mask.iter().position(|m| !m).ok_or(Error::AllMasked)?;
        let last = node_mask.iter().rposition(|m| !m).unwrap_or(first);
        let inner_masked = node_mask[first..=last].iter().filter(|m| **m).count();
        let masked_fraction = inner_masked as f64 / (last - first + 1) as f64;
        check_fraction(masked_fraction)?;

        let amplitude = rho.iter().map(|r| r.sqrt()).collect();
        Ok(Self {
            psi,
            rho,
            amplitude,
            p_q,
            osmotic,
            q,
            node_mask,
            masked_fraction,
            drho,
            d2rho,
        })
    }

    pub fn wavefunction(&self) -> &Wavefunction {
        self.psi
    }

    pub(crate) fn masked(&self, values: &[f64]) -> MaskedField {
        MaskedField {
            values: values.to_vec(),
            mask: self.node_mask.clone(),
        }
    }

    /// `∫ ρ·f dx` over unmasked points.
    pub fn density_weighted(&self, values: &[f64]) -> f64 {
        support_simpson(self.psi, |i| {
            if self.node_mask[i] {
                0.0
            } else {
                self.rho[i] * values[i]
            }
        })
    }

    /// Integrand of the Fisher information.
    ///
    /// At masked points inside the support the integrand is replaced by its
    /// limit at a zero of `ρ`, `ρ'²/ρ → 2ρ''`; a node that falls exactly on
    /// a grid point (box walls, odd-parity states on symmetric grids) would
    /// otherwise drop an `O(dx)` contribution.
    pub(crate) fn fisher_integrand(&self, i: usize) -> f64 {
        if self.node_mask[i] {
            (2.0 * self.d2rho[i]).max(0.0)
        } else {
            self.drho[i] * self.drho[i] / self.rho[i]
        }
    }

    pub fn fisher_information(&self) -> f64 {
        support_simpson(self.psi, |i| self.fisher_integrand(i))
    }

    /// `Q̄ = ∫ ρQ dx`; `ρQ` tends to zero at nodes, so masked points
    /// contribute nothing.
    pub fn mean_quantum_potential(&self) -> f64 {
        self.density_weighted(&self.q)
    }

    pub fn quantum_potential_mean(&self) -> QuantumPotentialMean {
        let mean_q = self.mean_quantum_potential();
        let fisher = self.fisher_information();
        let hbar = self.psi.hbar();
        let fisher_side = hbar * hbar / (8.0 * self.psi.mass()) * fisher;
        let residual = (mean_q - fisher_side).abs();
        QuantumPotentialMean {
            mean_q,
            fisher,
            fisher_side,
            residual,
            relative_residual: residual / mean_q.abs(),
        }
    }
}
