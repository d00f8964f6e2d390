use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::spectral::spectral_derivative;
use crate::error::{Error, Result};

/// Differentiation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Five-point central differences with fourth-order one-sided stencils
    /// at the two nodes nearest each edge.
    #[default]
    Central4,
    /// Exact derivative of the periodic trigonometric interpolant.
    Spectral,
}

/// Scalar types a derivative can act on.
pub trait Sample:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn to_complex(self) -> Complex64;
    fn from_complex(z: Complex64) -> Self;
}

impl Sample for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
}

impl Sample for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
}

/// First or second derivative of `field` sampled on `grid`.
pub fn derivative<T: Sample>(
    field: &[T],
    grid: &Grid1D,
    order: u8,
    scheme: Scheme,
) -> Result<Vec<T>> {
    grid.check_len(field.len())?;
    match scheme {
        Scheme::Central4 => central4(field, grid.dx(), order),
        Scheme::Spectral => {
            let z: Vec<Complex64> = field.iter().map(|v| v.to_complex()).collect();
            let d = spectral_derivative(&z, grid.dx(), order)?;
            Ok(d.into_iter().map(T::from_complex).collect())
        }
    }
}

/// Fourth-order finite differences on an arbitrary slice with spacing `h`.
pub(crate) fn central4<T: Sample>(f: &[T], h: f64, order: u8) -> Result<Vec<T>> {
    let n = f.len();
    if n < 6 {
        return Err(Error::Precondition(format!(
            "central4 stencils need at least 6 points, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    match order {
        1 => {
            let s = 1.0 / (12.0 * h);
            let left = |f: &dyn Fn(usize) -> T| -> [T; 2] {
                [
                    (f(1) * 48.0 + f(3) * 16.0 - f(0) * 25.0 - f(2) * 36.0 - f(4) * 3.0) * s,
                    (f(2) * 18.0 + f(4) - f(0) * 3.0 - f(1) * 10.0 - f(3) * 6.0) * s,
                ]
            };
            let l = left(&|k| f[k]);
            // mirrored stencil: odd derivative flips sign
            let r = left(&|k| f[n - 1 - k]);
            out.push(l[0]);
            out.push(l[1]);
            for i in 2..n - 2 {
                out.push((f[i - 2] - f[i + 2] + (f[i + 1] - f[i - 1]) * 8.0) * s);
            }
            out.push(r[1] * -1.0);
            out.push(r[0] * -1.0);
        }
        2 => {
            let s = 1.0 / (12.0 * h * h);
            let left = |f: &dyn Fn(usize) -> T| -> [T; 2] {
                [
                    (f(0) * 45.0 + f(2) * 214.0 + f(4) * 61.0
                        - f(1) * 154.0
                        - f(3) * 156.0
                        - f(5) * 10.0)
                        * s,
                    (f(0) * 10.0 + f(3) * 14.0 + f(5) - f(1) * 15.0 - f(2) * 4.0 - f(4) * 6.0) * s,
                ]
            };
            let l = left(&|k| f[k]);
            let r = left(&|k| f[n - 1 - k]);
            out.push(l[0]);
            out.push(l[1]);
            for i in 2..n - 2 {
                out.push(((f[i - 1] + f[i + 1]) * 16.0 - f[i - 2] - f[i + 2] - f[i] * 30.0) * s);
            }
            out.push(r[1]);
            out.push(r[0]);
        }
        o => {
            return Err(Error::InvalidParameter(format!(
                "derivative order must be 1 or 2, got {o}"
            )))
        }
    }
    Ok(out)
}

/// Composite Simpson rule over `grid`.
pub fn integrate(field: &[f64], grid: &Grid1D) -> Result<f64> {
    grid.check_len(field.len())?;
    Ok(simpson(field, grid.dx()))
}

/// Composite Simpson rule for equally spaced samples.
///
/// With an odd number of intervals the last three intervals use Simpson's
/// 3/8 rule, which keeps the rule fourth order. Two samples fall back to the
/// trapezoid rule.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, false)
            } else {
                (n - 4, true)
            };
            let mut acc = 0.0;
            if even_end > 0 {
                let odd: f64 = f[1..even_end].iter().step_by(2).sum();
                let even: f64 = f[2..even_end].iter().step_by(2).sum();
                acc += h / 3.0 * (f[0] + f[even_end] + 4.0 * odd + 2.0 * even);
            }
            if tail {
                let j = even_end;
                acc += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
            }
            acc
        }
    }
}
