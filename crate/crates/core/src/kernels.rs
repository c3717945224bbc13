//! Covariance kernel of the scaled KSS circle process.
//!
//! Homogenizing a degree-`d` KSS polynomial to the unit circle and rescaling
//! time by `√d` turns its real roots into the zeros on `(0, √d·π)` of a
//! stationary, unit-variance Gaussian process with covariance
//!
//! ```text
//! r_d(t) = cos^d(t/√d),        |t| ≤ √d·π .
//! ```
//!
//! Everything here is elementary but numerically delicate for large `d`:
//! `cos^d` is evaluated as `exp(d·ln|cos|)` with explicit sign tracking so
//! the value underflows gracefully instead of losing the sign, and
//! `ln|cos s|` is computed from `ln(1 - sin²s)/2` near `|cos| ≈ 1` where a
//! direct logarithm would throw away six digits.

use crate::error::{Error, Result};

/// Kernel and its first two derivatives at one lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Parameters of the two-piece dominating envelope for `r_d`:
/// `r_d(t) ≤ e^{-α t²/2}` on `[0, a√d)` and `r_d(t) ≤ cos^d(a)` on
/// `[a√d, √d·π/2]`, with `α = 1 - a²/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub a: f64,
    pub alpha: f64,
}

impl BoundParams {
    /// Requires `0 < a < π/2`. The classic split point is `a = 1/2`,
    /// giving `α = 11/12`.
    pub fn new(a: f64) -> Self {
        assert!(a > 0.0 && a < std::f64::consts::FRAC_PI_2);
        BoundParams { a, alpha: 1.0 - a * a / 3.0 }
    }

    /// Envelope value at lag `t ∈ [0, √d·π/2]`.
    pub fn envelope(&self, d: u32, t: f64) -> f64 {
        if t < self.a * (d as f64).sqrt() {
            (-0.5 * self.alpha * t * t).exp()
        } else {
            cos_pow(self.a, d)
        }
    }
}

/// `ln |cos s|` to full relative accuracy.
pub(crate) fn ln_abs_cos(s: f64) -> f64 {
    let sn = s.sin();
    let s2 = sn * sn;
    if s2 <= 0.5 {
        0.5 * (-s2).ln_1p()
    } else {
        s.cos().abs().ln()
    }
}

/// `ln |sin s|` to full relative accuracy (same trick on the other leg).
pub(crate) fn ln_abs_sin(s: f64) -> f64 {
    let c = s.cos();
    let c2 = c * c;
    if c2 <= 0.5 {
        0.5 * (-c2).ln_1p()
    } else {
        s.sin().abs().ln()
    }
}

/// `cos^k(s)` via `exp(k·ln|cos s|)` with sign tracking.
pub(crate) fn cos_pow(s: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0; // avoid 0·(−∞) when cos s == 0
    }
    let sign = if s.cos() < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * ((k as f64) * ln_abs_cos(s)).exp()
}

fn scaled_lag(d: u32, t: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let sd = (d as f64).sqrt();
    if !t.is_finite() || t.abs() > sd * std::f64::consts::PI {
        return Err(Error::Domain(format!(
            "lag t = {t} outside [-√d·π, √d·π] for d = {d}"
        )));
    }
    Ok(t / sd)
}

/// `r_d(t) = cos^d(t/√d)`.
pub fn covariance(d: u32, t: f64) -> Result<f64> {
    let s = scaled_lag(d, t)?;
    Ok(cos_pow(s, d))
}

/// `r_d'(t) = -√d · cos^{d-1}(t/√d) · sin(t/√d)`.
pub fn covariance_d1(d: u32, t: f64) -> Result<f64> {
    let s = scaled_lag(d, t)?;
    Ok(-(d as f64).sqrt() * cos_pow(s, d - 1) * s.sin())
}

/// `r_d''(t) = (d-1) · cos^{d-2}(t/√d) · sin²(t/√d) - cos^d(t/√d)`.
///
/// Only defined for `d ≥ 2`; the `d = 1` process (a single cosine wave) has
/// exactly one zero and is short-circuited by the callers that care.
pub fn covariance_d2(d: u32, t: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(
            "second derivative of the kernel requires degree >= 2".into(),
        ));
    }
    let s = scaled_lag(d, t)?;
    let sn = s.sin();
    Ok((d as f64 - 1.0) * cos_pow(s, d - 2) * sn * sn - cos_pow(s, d))
}

/// Large-`d` limit kernel `e^{-t²/2}`.
pub fn gaussian_limit(t: f64) -> f64 {
    (-0.5 * t * t).exp()
}

/// Kernel with both derivatives at one lag (`d ≥ 2`).
pub fn kernel_point(d: u32, t: f64) -> Result<KernelPoint> {
    Ok(KernelPoint {
        t,
        r: covariance(d, t)?,
        r1: covariance_d1(d, t)?,
        r2: covariance_d2(d, t)?,
    })
}
