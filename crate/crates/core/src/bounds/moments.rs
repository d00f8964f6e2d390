use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohmian::{support_simpson, FieldOptions, PolarFields};
use crate::error::Result;
use crate::grid_state::{momentum_moments, operator_derivative, Wavefunction};
use crate::tolerances::Tolerances;

/// Scalar moments of a state, with `Var(P̂)` by two independent routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentStats {
    pub hbar: f64,
    pub mass: f64,
    pub mean_x: f64,
    pub var_x: f64,
    /// `⟨P̂⟩` from the momentum-space density.
    pub mean_p_op: f64,
    /// `Var(P̂)` from the momentum-space density.
    pub var_p_spectral: f64,
    /// `Var(P_q) + ħ²I/4`.
    pub var_p_bohm: f64,
    pub mean_pq: f64,
    pub var_pq: f64,
    pub cov_x_pq: f64,
    /// `Re Cov(P̂, X̂)` evaluated with operators and a Fourier derivative.
    pub cov_x_p_op: f64,
    pub fisher_i: f64,
    pub mean_q: f64,
    /// `|Q̄ − ħ²I/(8m)| / |Q̄|`.
    pub residual_q_identity: f64,
    pub masked_fraction: f64,
}

impl MomentStats {
    /// `|Var(P̂) − Var(P_q) − ħ²I/4| / Var(P̂)`.
    pub fn residual_var_identity(&self) -> f64 {
        (self.var_p_spectral - self.var_p_bohm).abs() / self.var_p_spectral
    }

    /// `|⟨P̂⟩ − P̄_q|` relative to `max(|⟨P̂⟩|, ħ/σ_x)`.
    pub fn residual_mean_identity(&self) -> f64 {
        let scale = self.mean_p_op.abs().max(self.hbar / self.var_x.sqrt());
        (self.mean_p_op - self.mean_pq).abs() / scale
    }

    /// `|Re Cov(P̂, X̂) − Cov(x, p_q)|` relative to `max(|Cov(x, p_q)|, ħ/2)`.
    pub fn residual_cov_identity(&self) -> f64 {
        let scale = self.cov_x_pq.abs().max(self.hbar / 2.0);
        (self.cov_x_p_op - self.cov_x_pq).abs() / scale
    }

    /// Pearson correlation of `x` and `p_q`; `NaN` when `Var(P_q) = 0`.
    pub fn pearson_x_pq(&self) -> f64 {
        self.cov_x_pq / (self.var_x * self.var_pq).sqrt()
    }
}

/// Both sides of `Re Cov(P̂, X̂) = Cov(x, p_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceIdentity {
    pub operator_side: f64,
    /// Imaginary part left over after the `−iħ/2` correction; zero up to
    /// discretization error.
    pub operator_imaginary: f64,
    pub bohmian_side: f64,
    pub residual: f64,
}

struct OperatorSide {
    mean_x: f64,
    mean_p: Complex64,
    re_cov: f64,
    im_cov: f64,
}

/// `½⟨{X̂, P̂}⟩ − ⟨X̂⟩⟨P̂⟩` without forming the symmetrized operator.
///
/// `⟨X̂P̂⟩ = ∫ ψ* x (−iħψ') dx` and `{P̂, X̂} = 2X̂P̂ − iħ`, so
/// `½⟨{X̂, P̂}⟩ = ⟨X̂P̂⟩ − iħ/2`, which is real; equivalently it is
/// `Re⟨X̂P̂⟩`. The imaginary part is kept as a consistency check.
fn operator_covariance(psi: &Wavefunction) -> Result<OperatorSide> {
    let hbar = psi.hbar();
    let grid = psi.grid();
    let amps = psi.amplitudes();
    let d = operator_derivative(psi)?;
    let minus_i_hbar = Complex64::new(0.0, -hbar);
    let cplx = |f: &dyn Fn(usize) -> Complex64| -> Complex64 {
        Complex64::new(
            support_simpson(psi, |i| f(i).re),
            support_simpson(psi, |i| f(i).im),
        )
    };
    let norm = support_simpson(psi, |i| amps[i].norm_sqr());
    let mean_x = support_simpson(psi, |i| grid.x(i) * amps[i].norm_sqr()) / norm;
    let mean_p = cplx(&|i| amps[i].conj() * minus_i_hbar * d[i]) / norm;
    let xp = cplx(&|i| amps[i].conj() * grid.x(i) * minus_i_hbar * d[i]) / norm;
    let half_anticommutator = xp - Complex64::new(0.0, hbar / 2.0);
    let cov = half_anticommutator - mean_p * mean_x;
    Ok(OperatorSide {
        mean_x,
        mean_p,
        re_cov: cov.re,
        im_cov: cov.im,
    })
}

struct BohmianSide {
    mean_x: f64,
    var_x: f64,
    mean_pq: f64,
    var_pq: f64,
    cov_x_pq: f64,
}

fn bohmian_moments(f: &PolarFields) -> BohmianSide {
    let psi = f.wavefunction();
    let grid = psi.grid();
    let norm = support_simpson(psi, |i| f.rho[i]);
    let mean_x = support_simpson(psi, |i| f.rho[i] * grid.x(i)) / norm;
    let var_x = support_simpson(psi, |i| f.rho[i] * (grid.x(i) - mean_x).powi(2)) / norm;
    let masked = |g: &dyn Fn(usize) -> f64| {
        support_simpson(psi, |i| if f.node_mask[i] { 0.0 } else { f.rho[i] * g(i) }) / norm
    };
    let mean_pq = masked(&|i| f.p_q[i]);
    let var_pq = masked(&|i| (f.p_q[i] - mean_pq).powi(2));
    let cov_x_pq = masked(&|i| (grid.x(i) - mean_x) * (f.p_q[i] - mean_pq));
    BohmianSide {
        mean_x,
        var_x,
        mean_pq,
        var_pq,
        cov_x_pq,
    }
}

/// All moments of `psi`.
///
/// Fails on boundary leakage (the momentum-space route needs decay), on
/// all-masked or node-dominated states.
pub fn moment_stats(psi: &Wavefunction, tol: &Tolerances) -> Result<MomentStats> {
    psi.check_boundary_decay(tol.boundary_eps)?;
    let fields = PolarFields::compute(psi, FieldOptions::with_eps(tol.eps_node))?;
    let b = bohmian_moments(&fields);
    let qm = fields.quantum_potential_mean();
    let mom = momentum_moments(psi, tol.boundary_eps)?;
    let op = operator_covariance(psi)?;
    let hbar = psi.hbar();
    Ok(MomentStats {
        hbar,
        mass: psi.mass(),
        mean_x: b.mean_x,
        var_x: b.var_x,
        mean_p_op: mom.mean,
        var_p_spectral: mom.variance,
        var_p_bohm: b.var_pq + hbar * hbar / 4.0 * qm.fisher,
        mean_pq: b.mean_pq,
        var_pq: b.var_pq,
        cov_x_pq: b.cov_x_pq,
        cov_x_p_op: op.re_cov,
        fisher_i: qm.fisher,
        mean_q: qm.mean_q,
        residual_q_identity: qm.relative_residual,
        masked_fraction: fields.masked_fraction,
    })
}

/// Compares the operator-side real covariance with `Cov(x, p_q)`.
pub fn covariance_identity_residual(
    psi: &Wavefunction,
    tol: &Tolerances,
) -> Result<CovarianceIdentity> {
    let fields = PolarFields::compute(psi, FieldOptions::with_eps(tol.eps_node))?;
    let b = bohmian_moments(&fields);
    let op = operator_covariance(psi)?;
    debug_assert!((op.mean_x - b.mean_x).abs() < 1e-9 * (1.0 + b.mean_x.abs()));
    let _ = op.mean_p;
    let scale = b.cov_x_pq.abs().max(psi.hbar() / 2.0);
    Ok(CovarianceIdentity {
        operator_side: op.re_cov,
        operator_imaginary: op.im_cov,
        bohmian_side: b.cov_x_pq,
        residual: (op.re_cov - b.cov_x_pq).abs() / scale,
    })
}
