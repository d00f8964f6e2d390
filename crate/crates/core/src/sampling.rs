//! Inverse-CDF sampling from gridded densities and the Kolmogorov-Smirnov
//! distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid_state::Grid1D;

/// Piecewise-linear CDF built from a density on a uniform grid by the
/// cumulative trapezoid rule.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    x_min: f64,
    dx: f64,
    cumulative: Vec<f64>,
}

impl InverseCdf {
    pub fn new(density: &[f64], grid: &Grid1D) -> Result<Self> {
        grid.check_len(density.len())?;
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidParameter(
                "density must be finite and non-negative".into(),
            ));
        }
        let dx = grid.dx();
        let mut cumulative = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * dx * (w[0] + w[1]);
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidParameter("density integrates to zero".into()));
        }
        cumulative.iter_mut().for_each(|c| *c /= acc);
        Ok(Self {
            x_min: grid.x_min(),
            dx,
            cumulative,
        })
    }

    /// Position with `F(x) = u` for `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let c = &self.cumulative;
        // first node with F > u, so the cell [j-1, j] brackets u
        let j = c.partition_point(|&v| v <= u).clamp(1, c.len() - 1);
        let (lo, hi) = (c[j - 1], c[j]);
        let t = if hi > lo { (u - lo) / (hi - lo) } else { 0.5 };
        self.x_min + ((j - 1) as f64 + t) * self.dx
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = (x - self.x_min) / self.dx;
        if s <= 0.0 {
            return 0.0;
        }
        let last = self.cumulative.len() - 1;
        if s >= last as f64 {
            return 1.0;
        }
        let j = s.floor() as usize;
        let t = s - j as f64;
        self.cumulative[j] * (1.0 - t) + self.cumulative[j + 1] * t
    }

    /// `n` draws using a ChaCha8 stream.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.random::<f64>())).collect()
    }
}

/// Generator for stream `stream` of the seeded family; streams are
/// independent and identical across runs.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Two-sided Kolmogorov-Smirnov distance `sup |F_n(x) − F(x)|`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        acc.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Asymptotic two-sided KS critical value at significance `alpha`,
/// `sqrt(−ln(α/2)/2)/√n`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
