//! Two-point factors of the second-moment integral for the scaled circle
//! process, the second factorial moment of the zero count by adaptive
//! quadrature, and the exact finite-degree variance.
//!
//! All quantities are functions of the degree `d` and the scaled lag
//! `t ∈ (0, √d·π/2]`. Writing s = t/√d, c = cos s, S = sin s and
//!
//! ```text
//!     A = 1 − c^{2d},        B = d·c^{2d−2}·S²,
//! ```
//!
//! the factors are
//!
//! ```text
//!     v = 1 − B/A                    (conditional variance of the derivative)
//!     p = 1/(2π√A)                   (joint density of the process at 0 at two points)
//!     ρ = c^{d−2}·(A − d·S²)/(A − B) (conditional correlation of the derivatives)
//!     g = (A − B)/A^{3/2} = 2π·p·v.
//! ```
//!
//! Every one of these is a 0/0 form at t = 0 (A, B, and A − d·S² all vanish),
//! so below the cutoff [`T_CUT`] the code switches to Taylor expansions of the
//! three reduced polynomials A/t², (A−B)/t⁴ and (A−d·S²)/t⁴ in powers of t²,
//! with coefficients that are exact rationals in 1/d. Above the cutoff the
//! direct formulas are evaluated with `expm1`/`ln_1p` so the worst relative
//! error is ~2·eps/t² ≈ 4·10⁻¹⁰ at the cutoff itself.

use crate::error::{Error, Result};
use crate::kernels::{cos_pow, ln_abs_cos};
use crate::quad;
pub use crate::quad::QuadratureResult;

/// Lag below which the Taylor branches replace the direct formulas.
pub const T_CUT: f64 = 1e-3;

/// All two-point factors at one lag, bundled for table output and for the
/// integrand of the second factorial moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceIntegrand {
    pub d: u32,
    pub t: f64,
    /// Conditional variance factor, in [0, 1].
    pub v: f64,
    /// Joint density factor, positive, ~1/(2πt) as t → 0.
    pub p: f64,
    /// Conditional correlation, in [−1, 1].
    pub rho: f64,
    /// g = 2π·p·v = (A−B)/A^{3/2}, nonnegative.
    pub g: f64,
}

fn check_domain(d: u32, t: f64, min_d: u32) -> Result<f64> {
    if d < min_d {
        return Err(Error::Domain(format!(
            "degree must be at least {min_d}, got {d}"
        )));
    }
    let sd = f64::from(d).sqrt();
    if !t.is_finite() || t <= 0.0 || t > sd * std::f64::consts::FRAC_PI_2 * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "lag must lie in (0, sqrt(d)*pi/2], got t={t} for d={d}"
        )));
    }
    Ok(sd)
}

struct Factors {
    v: f64,
    p: f64,
    rho: f64,
    g: f64,
}

/// Direct evaluation, valid and accurate for t > T_CUT.
fn factors_direct(d: u32, t: f64) -> Factors {
    let dd = f64::from(d);
    let s = t / dd.sqrt();
    let sin_s = s.sin();
    let s2 = sin_s * sin_s;
    let l = ln_abs_cos(s);
    // a = 1 − c^{2d}, computed without cancellation
    let a = -(2.0 * dd * l).exp_m1();
    // b = d·c^{2d−2}·S²
    let b = dd * ((2.0 * dd - 2.0) * l).exp() * s2;
    let v = (1.0 - b / a).clamp(0.0, 1.0);
    let p = 1.0 / (2.0 * std::f64::consts::PI * a.sqrt());
    // numerator A − d·S² and denominator A − B are both O(t⁴)
    let rho = cos_pow(s, d.saturating_sub(2)) * (a - dd * s2) / (a - b);
    let g = ((a - b) / (a * a.sqrt())).max(0.0);
    Factors { v, p, rho, g }
}

/// Taylor branch for t ≤ T_CUT. With τ = t² and δ = 1/d:
///
/// ```text
///   A        = τ·(1 + pa1·τ + pa2·τ² + pa3·τ³ + …)
///   A − B    = τ²·(pv0 + pv1·τ + pv2·τ² + …)
///   A − d·S² = τ²·(pr0 + pr1·τ + pr2·τ² + …)
/// ```
///
/// The rational coefficients below were derived symbolically and validated
/// against a 50-digit oracle; truncation error at t = 10⁻³ is below 10⁻¹⁵
/// relative for every d ≥ 1.
fn factors_taylor(d: u32, t: f64) -> Factors {
    let dd = f64::from(d);
    let di = 1.0 / dd;
    let tau = t * t;

    let pa1 = di / 6.0 - 0.5;
    let pa2 = di * di * (2.0 / 45.0) - di / 6.0 + 1.0 / 6.0;
    let pa3 = di * di * di * (17.0 / 1260.0) - di * di * (7.0 / 120.0) + di / 12.0 - 1.0 / 24.0;
    let pa = 1.0 + tau * (pa1 + tau * (pa2 + tau * pa3));

    let pv0 = 0.5 * (1.0 - di);
    let pv1 = -di * di / 3.0 + di * (2.0 / 3.0) - 1.0 / 3.0;
    let pv2 = -di * di * di * (11.0 / 60.0) + di * di * (19.0 / 40.0) - di * (5.0 / 12.0) + 0.125;
    let pv = pv0 + tau * (pv1 + tau * pv2);

    let pr0 = 0.5 * (di - 1.0);
    let pr1 = (1.0 - di) / 6.0;
    let pr2 = di * di * di / 60.0 - di * di * (7.0 / 120.0) + di / 12.0 - 1.0 / 24.0;
    let pr = pr0 + tau * (pr1 + tau * pr2);

    let s = t / dd.sqrt();
    let v = (tau * pv / pa).clamp(0.0, 1.0);
    let p = 1.0 / (2.0 * std::f64::consts::PI * t * pa.sqrt());
    let rho = if d == 1 {
        f64::NAN // never exposed: public entry points require d ≥ 2 for rho
    } else {
        cos_pow(s, d - 2) * pr / pv
    };
    let g = (t * pv / (pa * pa.sqrt())).max(0.0);
    Factors { v, p, rho, g }
}

fn factors(d: u32, t: f64) -> Factors {
    if t <= T_CUT {
        factors_taylor(d, t)
    } else {
        factors_direct(d, t)
    }
}

/// Largest relative disagreement between the Taylor and direct branches at
/// the cutoff lag, across v, p, ρ and g. A healthy build stays below 10⁻⁸;
/// anything above 10⁻⁶ is treated as a hard failure by the quadrature entry
/// points.
pub fn branch_consistency_gap(d: u32) -> f64 {
    let lo = factors_taylor(d, T_CUT);
    let hi = factors_direct(d, T_CUT);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut gap = rel(lo.v, hi.v).max(rel(lo.p, hi.p)).max(rel(lo.g, hi.g));
    if d >= 2 {
        gap = gap.max(rel(lo.rho, hi.rho));
    }
    gap
}

fn check_branches(d: u32) -> Result<()> {
    let gap = branch_consistency_gap(d);
    if gap > 1e-6 {
        return Err(Error::BranchMismatch { quantity: "rice factors", gap });
    }
    Ok(())
}

/// Conditional variance v(t) of the derivative at one zero given zeros at
/// lag t apart; lies in [0, 1] and vanishes like t² as t → 0.
pub fn conditional_variance(d: u32, t: f64) -> Result<f64> {
    check_domain(d, t, 2)?;
    Ok(factors(d, t).v)
}

/// Joint density factor p(t) of the process vanishing at two points lag t
/// apart; positive and diverging like 1/(2πt) as t → 0.
pub fn joint_density(d: u32, t: f64) -> Result<f64> {
    check_domain(d, t, 1)?;
    Ok(factors(d, t).p)
}

/// Conditional correlation ρ(t) of the two derivatives given zeros at both
/// points; lies in [−1, 1] and tends to −1 as t → 0.
pub fn conditional_correlation(d: u32, t: f64) -> Result<f64> {
    check_domain(d, t, 2)?;
    let rho = factors(d, t).rho;
    if rho.abs() > 1.0 + 1e-10 {
        return Err(Error::CorrelationOutOfRange { value: rho });
    }
    Ok(rho.clamp(-1.0, 1.0))
}

/// The even, convex factor √(1−ρ²) + ρ·arcsin ρ ∈ [1, π/2]. Equivalent to
/// the arctan form √(1−ρ²) + ρ·arctan(ρ/√(1−ρ²)) but finite at |ρ| = 1,
/// where it takes the limiting value π/2.
pub fn rice_bracket(rho: f64) -> f64 {
    debug_assert!(rho.abs() <= 1.0 + 1e-9, "bracket argument {rho} out of range");
    let r = rho.clamp(-1.0, 1.0);
    (1.0 - r * r).sqrt() + r * r.asin()
}

/// Full factor bundle at one lag.
impl RiceIntegrand {
    pub fn evaluate(d: u32, t: f64) -> Result<Self> {
        check_domain(d, t, 2)?;
        let f = factors(d, t);
        if f.rho.abs() > 1.0 + 1e-10 {
            return Err(Error::CorrelationOutOfRange { value: f.rho });
        }
        Ok(RiceIntegrand {
            d,
            t,
            v: f.v,
            p: f.p,
            rho: f.rho.clamp(-1.0, 1.0),
            g: f.g,
        })
    }
}

/// E[N(N−1)], the second factorial moment of the number of real zeros:
///
/// ```text
///   (2√d/π) ∫₀^{√d·π/2} g(t)·bracket(ρ(t)) dt
/// ```
///
/// with the integrand extended by its limit 0 at t = 0. `tol` is an absolute
/// tolerance on the returned value (the prefactor is folded into the
/// quadrature target). Degree 1 short-circuits to 0: a linear polynomial has
/// exactly one real root, so N(N−1) ≡ 0.
pub fn second_factorial_moment(d: u32, tol: f64) -> Result<QuadratureResult> {
    if d == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if d == 1 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            n_evals: 0,
            converged: true,
        });
    }
    check_branches(d)?;
    let sd = f64::from(d).sqrt();
    let prefactor = 2.0 * sd / std::f64::consts::PI;
    let integrand = move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let f = factors(d, t);
        f.g * rice_bracket(f.rho.clamp(-1.0, 1.0))
    };
    let inner = quad::integrate(
        integrand,
        0.0,
        sd * std::f64::consts::FRAC_PI_2,
        tol / prefactor,
        quad::DEFAULT_MAX_EVALS,
    );
    Ok(QuadratureResult {
        value: prefactor * inner.value,
        abs_error_estimate: prefactor * inner.abs_error_estimate,
        n_evals: inner.n_evals,
        converged: inner.converged,
    })
}

/// Exact variance of the real-zero count at finite degree:
/// Var N = E[N(N−1)] − d + √d, using E[N] = √d and E[N²] = E[N(N−1)] + E[N].
/// Degree 1 returns exactly 0 (the count is deterministically 1).
pub fn variance_exact(d: u32, tol: f64) -> Result<f64> {
    if d == 1 {
        return Ok(0.0);
    }
    let sfm = second_factorial_moment(d, tol)?;
    if !sfm.converged {
        return Err(Error::NonConvergence {
            achieved: sfm.abs_error_estimate,
            requested: tol,
            n_evals: sfm.n_evals,
        });
    }
    let dd = f64::from(d);
    Ok(sfm.value - dd + dd.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    const QUAD_TOL: f64 = 1e-9;

    fn assert_rel(actual: f64, expected: f64, rtol: f64) {
        let err = (actual - expected).abs() / expected.abs();
        assert!(err <= rtol, "got {actual:.17e}, want {expected:.17e} (rel {err:.2e})");
    }

    #[test]
    fn closed_forms_at_special_angles() {
        // t = √2·π/4 for d = 2 puts s = π/4, cos = sin = √2/2
        let t2 = SQRT_2 * PI / 4.0;
        assert_rel(conditional_variance(2, t2).unwrap(), 1.0 / 3.0, 1e-14);
        assert_rel(joint_density(2, t2).unwrap(), 1.0 / (PI * 3.0_f64.sqrt()), 1e-14);
        assert!((conditional_correlation(2, t2).unwrap() + 1.0).abs() < 1e-13);

        // t = π/2 for d = 4 puts s = π/4 again
        let t4 = FRAC_PI_2;
        assert_rel(conditional_variance(4, t4).unwrap(), 11.0 / 15.0, 1e-14);
        assert_rel(joint_density(4, t4).unwrap(), 2.0 / (PI * 15.0_f64.sqrt()), 1e-14);
        assert_rel(conditional_correlation(4, t4).unwrap(), -17.0 / 22.0, 1e-14);
    }

    #[test]
    fn small_lag_series_matches_extended_precision_oracle() {
        // 50-digit reference values at t = 10⁻⁴ (deep inside the series branch)
        assert_rel(conditional_variance(50, 1e-4).unwrap(), 4.8999999923233333320e-9, 1e-12);

        // and at the cutoff t = 10⁻³ for several degrees (direct branch)
        struct Anchor {
            d: u32,
            v: f64,
            p: f64,
            rho: f64,
            g: f64,
        }
        let anchors = [
            Anchor {
                d: 2,
                v: 2.5000002083333090278e-7,
                p: 159.15497624917799258,
                rho: -1.0,
                g: 2.5000007291667304687e-4,
            },
            Anchor {
                d: 10,
                v: 4.4999994749999482500e-7,
                p: 159.15498155434188696,
                rho: -0.99999986666667333333,
                g: 4.5000005624998770937e-4,
            },
            Anchor {
                d: 50,
                v: 4.8999992323333201905e-7,
                p: 159.15498261537459368,
                rho: -0.99999984000001226666,
                g: 4.9000004491665159467e-4,
            },
            Anchor {
                d: 1000,
                v: 4.9949991699974993075e-7,
                p: 159.15498286736985800,
                rho: -0.99999983366668047233,
                g: 4.9950004183310940112e-4,
            },
        ];
        for a in anchors {
            assert_rel(conditional_variance(a.d, 1e-3).unwrap(), a.v, 5e-9);
            assert_rel(joint_density(a.d, 1e-3).unwrap(), a.p, 5e-9);
            assert_rel(conditional_correlation(a.d, 1e-3).unwrap(), a.rho, 5e-9);
            let g = RiceIntegrand::evaluate(a.d, 1e-3).unwrap().g;
            assert_rel(g, a.g, 5e-9);
        }
    }

    #[test]
    fn series_and_direct_branches_agree_at_cutoff() {
        for d in [2, 3, 5, 10, 50, 1000, 10_000, 1_000_000] {
            let gap = branch_consistency_gap(d);
            assert!(gap < 1e-8, "branch gap {gap:.3e} at d={d}");
        }
    }

    #[test]
    fn mid_range_reference_values() {
        // 50-digit oracle anchors away from both the cutoff and the endpoint
        let f = RiceIntegrand::evaluate(5, 1.0).unwrap();
        assert_rel(f.v, 0.36654535488507412438, 1e-13);
        assert_rel(f.p, 0.19819349810243560550, 1e-13);
        assert_rel(f.rho, -0.90007342640323336710, 1e-13);
        assert_rel(f.g, 0.45645397300620146595, 1e-13);

        let f = RiceIntegrand::evaluate(20, 2.5).unwrap();
        assert_rel(f.v, 0.98939654557680284711, 1e-13);
        assert_rel(f.p, 0.15926271198457944029, 1e-13);
        assert_rel(f.rho, -0.23964599285578942898, 1e-13);
        assert_rel(f.g, 0.99006649756240171558, 1e-13);

        let f = RiceIntegrand::evaluate(100, 0.3).unwrap();
        assert_rel(f.v, 0.043901395850754759598, 1e-13);
        assert_rel(f.p, 0.54245796095575679639, 1e-13);
        assert_rel(f.rho, -0.98540359669927091360, 1e-13);
        assert_rel(f.g, 0.14963193234005601788, 1e-13);
    }

    #[test]
    fn high_degree_correlation_approaches_limit_value() {
        // d = 10⁴ at t = 1; the limit value is ≈ −0.84442
        let rho = conditional_correlation(10_000, 1.0).unwrap();
        assert_rel(rho, -0.84444477920334619547, 1e-12);
        assert!((rho + 0.8444).abs() < 1e-3);
    }

    #[test]
    fn bracket_values_and_shape() {
        assert_eq!(rice_bracket(0.0), 1.0);
        assert_rel(rice_bracket(1.0), FRAC_PI_2, 1e-15);
        assert_rel(rice_bracket(-1.0), FRAC_PI_2, 1e-15);
        assert_rel(rice_bracket(-0.5), 1.1278247915835880833, 1e-14);
        assert_rel(rice_bracket(0.9), 1.4436824578528381232, 1e-14);
        assert_rel(rice_bracket(-0.8444), 1.3847102675679296798, 1e-14);
        // even, and increasing in |rho| from 1 up to π/2
        let mut prev = 1.0;
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            let b = rice_bracket(r);
            assert!((b - rice_bracket(-r)).abs() < 1e-15);
            assert!(b >= prev - 1e-15 && (1.0..=FRAC_PI_2 + 1e-15).contains(&b));
            prev = b;
        }
    }

    #[test]
    fn factor_invariants_on_grid() {
        // 0 ≤ v ≤ 1, p > 0, |rho| ≤ 1, g ≥ 0, and the identity
        // g·√(1−r²) = v with r the covariance at the same lag.
        for d in (2..=50).step_by(4) {
            let sd = f64::from(d).sqrt();
            for j in 1..=40 {
                let t = sd * FRAC_PI_2 * j as f64 / 40.0;
                let f = RiceIntegrand::evaluate(d, t).unwrap();
                assert!((0.0..=1.0).contains(&f.v), "v={} at d={d} t={t}", f.v);
                assert!(f.p > 0.0);
                assert!(f.rho.abs() <= 1.0);
                assert!(f.g >= 0.0);
                let r = crate::kernels::covariance(d, t).unwrap();
                let lhs = f.g * (1.0 - r * r).sqrt();
                assert!(
                    (lhs - f.v).abs() <= 1e-10 * f.v.max(1e-3),
                    "identity broke at d={d} t={t}: {lhs} vs {}",
                    f.v
                );
            }
        }
    }

    #[test]
    fn degenerate_degree_two_correlation_is_minus_one() {
        let sd = SQRT_2;
        for j in 1..=200 {
            let t = sd * FRAC_PI_2 * j as f64 / 200.0;
            let rho = conditional_correlation(2, t).unwrap();
            assert!((rho + 1.0).abs() < 1e-12, "rho_2({t}) = {rho}");
        }
    }

    #[test]
    fn correlation_tail_envelope_scaled_by_degree() {
        // For s = t/√d ∈ [1/2, π/2] the correlation magnitude is controlled
        // by d·cos^{d−2}(1/2): the numerator ratio (A−dS²)/(A−B) is O(d) at
        // the left edge, not O(1), so the d factor is required.
        for d in [64_u32, 256, 1024] {
            let sd = f64::from(d).sqrt();
            let bound = f64::from(d) * 0.5_f64.cos().powi(d as i32 - 2);
            for j in 0..=100 {
                let t = 0.5 * sd + (sd * FRAC_PI_2 - 0.5 * sd) * j as f64 / 100.0;
                let rho = conditional_correlation(d, t).unwrap();
                assert!(
                    rho.abs() <= bound,
                    "|rho|={} exceeds {bound:.3e} at d={d}, s={}",
                    rho.abs(),
                    t / sd
                );
            }
        }
    }

    #[test]
    fn g_vanishes_at_tiny_lag() {
        let g = RiceIntegrand::evaluate(7, 1e-6).unwrap().g;
        assert!(g < 1e-5, "g(1e-6) = {g}");
        assert!(g > 0.0);
    }

    #[test]
    fn degree_two_factorial_moment_is_sqrt_two() {
        // N_2 ∈ {0, 2} and E N_2 = √2 force E N(N−1) = √2 exactly.
        let sfm = second_factorial_moment(2, QUAD_TOL).unwrap();
        assert!(sfm.converged);
        assert!((sfm.value - SQRT_2).abs() < 1e-8, "sfm(2) = {:.17e}", sfm.value);
        assert!(sfm.abs_error_estimate <= QUAD_TOL);
    }

    #[test]
    fn exact_variance_table() {
        // 50-digit quadrature oracle values
        let table = [
            (2, 0.82842712474619009760),
            (3, 0.92820323027550917411),
            (5, 1.2176923140910359287),
            (10, 1.7617433760823365096),
            (25, 2.8286200144996871711),
            (50, 4.0213596790569833296),
            (100, 5.7021366078110649891),
        ];
        for (d, want) in table {
            let got = variance_exact(d, QUAD_TOL).unwrap();
            assert!((got - want).abs() < 2e-9, "var({d}) = {got:.17e}, want {want:.17e}");
        }
        assert_eq!(variance_exact(1, QUAD_TOL).unwrap(), 0.0);
    }

    #[test]
    fn domain_is_enforced() {
        assert!(conditional_variance(1, 0.5).is_err());
        assert!(conditional_variance(2, 0.0).is_err());
        assert!(conditional_variance(2, -1.0).is_err());
        assert!(conditional_variance(2, SQRT_2 * FRAC_PI_2 + 0.1).is_err());
        assert!(conditional_correlation(1, 0.5).is_err());
        assert!(joint_density(0, 0.5).is_err());
        assert!(joint_density(1, 0.5).is_ok());
        assert!(second_factorial_moment(0, 1e-9).is_err());
        assert!(second_factorial_moment(2, 0.0).is_err());
    }
}
