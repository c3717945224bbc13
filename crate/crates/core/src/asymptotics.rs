//! Degree-free limit of the two-point machinery: the limit factors g and ρ,
//! the asymptotic variance constant σ² of the normalized zero count — by
//! direct quadrature and by a Hermite-series (Mehler) expansion — and the
//! chaos coefficients a_{2ℓ}, b_k of the underlying L² decomposition.
//!
//! The limit factors are obtained from the finite-degree ones by the kernel
//! limit cos^d(t/√d) → e^{−t²/2}:
//!
//! ```text
//!   g(t) = (1 − (1+t²)e^{−t²}) / (1 − e^{−t²})^{3/2}
//!   ρ(t) = e^{−t²/2} (1 − t² − e^{−t²}) / (1 − e^{−t²} − t² e^{−t²})
//! ```
//!
//! Both are 0/0 at t = 0 and are evaluated by series below [`SERIES_CUT`].

use crate::error::{Error, Result};
use crate::quad::{self, QuadratureResult};
use crate::rice::rice_bracket;

/// Lag below which g and ρ switch to their Taylor series.
pub const SERIES_CUT: f64 = 1e-3;

/// Upper limit replacing ∞ in the σ² integrals. The integrand deficits decay
/// like t²e^{−t²} (from g−1) and t⁴e^{−t²} (from ρ²), so the tail beyond 12
/// is below e^{−144}·poly ≈ 10⁻⁶⁰ — far under every tolerance in use.
pub const T_MAX: f64 = 12.0;

const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

/// The limit pair (g, ρ) at one lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitPoint {
    pub t: f64,
    pub g: f64,
    pub rho: f64,
}

impl LimitPoint {
    pub fn evaluate(t: f64) -> Self {
        LimitPoint { t, g: g_limit(t), rho: rho_limit(t) }
    }
}

/// Limit factor g(t) ∈ [0, 1); 0 at t = 0, ~t/2 for small t, → 1 as t → ∞
/// (saturates to exactly 1.0 in double precision once e^{−t²} underflows the
/// working precision).
pub fn g_limit(t: f64) -> f64 {
    assert!(t >= 0.0 && t.is_finite(), "lag must be finite and nonnegative, got {t}");
    if t <= SERIES_CUT {
        // g = t·(1/2 + u/24 − u²/64 − u³/1280 + 19u⁴/36864 + O(u⁵)), u = t²
        let u = t * t;
        return t
            * (0.5 + u * (1.0 / 24.0 + u * (-1.0 / 64.0 + u * (-1.0 / 1280.0 + u * (19.0 / 36864.0)))));
    }
    let e = -(-t * t).exp_m1(); // 1 − e^{−t²}, cancellation-free
    let num = e - t * t * (1.0 - e); // 1 − (1+t²)e^{−t²}
    (num / (e * e.sqrt())).max(0.0)
}

/// Limit factor ρ(t) ∈ [−1, 0]; → −1 as t → 0, → 0⁻ as t → ∞.
pub fn rho_limit(t: f64) -> f64 {
    assert!(t >= 0.0 && t.is_finite(), "lag must be finite and nonnegative, got {t}");
    let rho = if t <= SERIES_CUT {
        // ρ = −1 + u/6 − u²/72 + 7u³/2160 − 23u⁴/51840 + O(u⁵), u = t²
        let u = t * t;
        -1.0 + u * (1.0 / 6.0 + u * (-1.0 / 72.0 + u * (7.0 / 2160.0 + u * (-23.0 / 51840.0))))
    } else {
        let e = -(-t * t).exp_m1(); // 1 − e^{−t²}
        let num = e - t * t; // 1 − t² − e^{−t²}
        let den = e - t * t * (1.0 - e); // 1 − e^{−t²} − t²e^{−t²}
        (-0.5 * t * t).exp() * num / den
    };
    assert!(rho.abs() <= 1.0 + 1e-10, "limit correlation {rho} out of range at t={t}");
    rho.clamp(-1.0, 1.0)
}

/// Which route produced a σ² value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sigma2Method {
    Direct,
    Mehler,
}

impl Sigma2Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Sigma2Method::Direct => "direct",
            Sigma2Method::Mehler => "mehler",
        }
    }
}

/// σ² with its provenance: the quadrature diagnostics of the integral part
/// and, for the series route, the truncation order used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma2Result {
    pub value: f64,
    pub method: Sigma2Method,
    /// Diagnostics of the integral ∫(…)dt part; `value` is that integral + 1.
    pub quadrature: QuadratureResult,
    pub series_terms_used: Option<u32>,
}

/// Asymptotic variance constant by direct quadrature:
///
/// ```text
///   σ² = (2/π) ∫₀^∞ (g(t)·bracket(ρ(t)) − 1) dt + 1   ≈ 0.5717310489648301
/// ```
///
/// The integrand is continuous on [0, ∞) with value −2/π at t = 0 and decays
/// like a Gaussian; the integral is truncated at [`T_MAX`].
pub fn sigma2_direct(tol: f64) -> Result<Sigma2Result> {
    sigma2_direct_with(tol, T_MAX)
}

/// Same as [`sigma2_direct`] with an explicit truncation point, for
/// stability checks against tighter tolerances and longer tails.
pub fn sigma2_direct_with(tol: f64, t_max: f64) -> Result<Sigma2Result> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(t_max > 1.0) {
        return Err(Error::Domain(format!("truncation point must exceed 1, got {t_max}")));
    }
    let integrand =
        |t: f64| TWO_OVER_PI * (g_limit(t) * rice_bracket(rho_limit(t)) - 1.0);
    let q = quad::integrate(integrand, 0.0, t_max, tol, quad::DEFAULT_MAX_EVALS);
    Ok(Sigma2Result {
        value: q.value + 1.0,
        method: Sigma2Method::Direct,
        quadrature: q,
        series_terms_used: None,
    })
}

/// Probabilists' Hermite polynomial H_n(x): H_0 = 1, H_1 = x,
/// H_{n+1} = x·H_n − n·H_{n−1} (orthogonal under the standard Gaussian).
pub fn hermite(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut hm = 1.0;
            let mut h = x;
            for k in 1..n {
                let next = x * h - k as f64 * hm;
                hm = h;
                h = next;
            }
            h
        }
    }
}

/// Chaos coefficient a_{2ℓ} = 2(−1)^{ℓ+1} / (√(2π)·2^ℓ·ℓ!·(2ℓ−1)) of the
/// absolute-value functional: a_0 = √(2/π), a_2 = 1/√(2π), then alternating
/// and rapidly decaying.
pub fn coeff_a(ell: u32) -> f64 {
    let mut mag = 2.0 / (2.0 * std::f64::consts::PI).sqrt();
    for i in 1..=ell {
        mag /= 2.0 * i as f64; // accumulate 2^ℓ·ℓ!
    }
    let sign = if ell % 2 == 0 { -1.0 } else { 1.0 }; // (−1)^{ℓ+1}
    sign * mag / (2.0 * f64::from(ell) - 1.0)
}

/// Chaos coefficient b_k = φ(0)·H_k(0)/k!: zero for odd k, and
/// (−1)^{k/2} / (√(2π)·2^{k/2}·(k/2)!) for even k.
pub fn coeff_b(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let m = k / 2;
    let mut mag = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    for i in 1..=m {
        mag /= 2.0 * i as f64;
    }
    if m % 2 == 0 { mag } else { -mag }
}

/// The chaos coefficient tables up to a fixed order, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosCoefficients {
    pub q_max: u32,
    /// a_{2ℓ} for ℓ = 0, …, ⌊q_max/2⌋.
    pub a2l: Vec<f64>,
    /// b_k for k = 0, …, q_max (odd entries are exactly zero).
    pub bk: Vec<f64>,
}

impl ChaosCoefficients {
    pub fn up_to(q_max: u32) -> Self {
        ChaosCoefficients {
            q_max,
            a2l: (0..=q_max / 2).map(coeff_a).collect(),
            bk: (0..=q_max).map(coeff_b).collect(),
        }
    }
}

/// Order-q kernel of the chaos decomposition, exposed for diagnostics:
/// f_q(x, y) = Σ_{ℓ=0}^{⌊q/2⌋} b_{q−2ℓ}·a_{2ℓ}·H_{q−2ℓ}(x)·H_{2ℓ}(y).
/// Identically zero for odd q (every term carries a vanishing b or H at 0).
pub fn f_q(q: u32, x: f64, y: f64) -> f64 {
    assert!(q >= 2, "chaos order must be at least 2, got {q}");
    let mut sum = 0.0;
    for ell in 0..=q / 2 {
        let k = q - 2 * ell;
        sum += coeff_b(k) * coeff_a(ell) * hermite(k, x) * hermite(2 * ell, y);
    }
    sum
}

/// Truncated Hermite-series form of the bracket:
///
/// ```text
///   Σ_{ℓ=0}^{L} (2ℓ)!·a_{2ℓ}²·ρ^{2ℓ}  →  (2/π)·(√(1−ρ²) + ρ·arcsin ρ)
/// ```
///
/// The weights w_ℓ = (2ℓ)!·a_{2ℓ}² = (2/π)·C(2ℓ,ℓ)/(4^ℓ(2ℓ−1)²) are built by
/// the recurrence w_{ℓ+1} = w_ℓ·(2ℓ+1)/(2ℓ+2)·((2ℓ−1)/(2ℓ+1))², which avoids
/// factorial overflow at any order. Convergence is geometric in ρ² away from
/// |ρ| = 1 and O(L^{−3/2}) algebraic at |ρ| = 1.
pub fn mehler_bracket(rho: f64, terms: u32) -> f64 {
    assert!(rho.abs() <= 1.0 + 1e-9, "correlation {rho} out of range");
    assert!(terms >= 1, "series needs at least one term past l=0");
    let r2 = (rho * rho).min(1.0);
    let mut w = TWO_OVER_PI;
    let mut pow = 1.0;
    let mut sum = w;
    for ell in 0..terms {
        let l = f64::from(ell);
        let ratio = (2.0 * l + 1.0) / (2.0 * l + 2.0)
            * ((2.0 * l - 1.0) / (2.0 * l + 1.0)).powi(2);
        w *= ratio;
        pow *= r2;
        sum += w * pow;
    }
    sum
}

/// σ² via the Mehler expansion of the bracket under the integral:
///
/// ```text
///   σ² = ∫₀^∞ [ g(t)·Σ_{ℓ=0}^{L} w_ℓ ρ^{2ℓ}(t) − w_0 ] dt + 1
/// ```
///
/// which matches [`sigma2_direct`] as L → ∞. Requires L ≥ 4; truncation
/// error decays geometrically in L because |ρ(t)| ≤ 1 − c·t⁴ near 0 and
/// decays rapidly elsewhere.
pub fn sigma2_mehler(terms: u32, tol: f64) -> Result<Sigma2Result> {
    if terms < 4 {
        return Err(Error::Domain(format!("series order must be at least 4, got {terms}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let integrand = |t: f64| {
        let lp = LimitPoint::evaluate(t);
        lp.g * mehler_bracket(lp.rho, terms) - TWO_OVER_PI
    };
    let q = quad::integrate(integrand, 0.0, T_MAX, tol, quad::DEFAULT_MAX_EVALS);
    Ok(Sigma2Result {
        value: q.value + 1.0,
        method: Sigma2Method::Mehler,
        quadrature: q,
        series_terms_used: Some(terms),
    })
}
