//! Cross-module checks: the finite-degree Rice factors against their
//! degree-free limits, the variance ratio against the limit constant, and
//! the Monte Carlo mean law against the exact mean √d.

use kss::asymptotics::{self, LimitPoint};
use kss::montecarlo;
use kss::rice::{self, RiceIntegrand};

/// Max |g_d − g| and |ρ_d − ρ| over a fixed lag grid. Both decay like 1/d,
/// with d·max ≈ 0.32 for g and ≈ 0.43 for ρ.
fn factor_gaps(d: u32) -> (f64, f64) {
    let mut gap_g = 0.0_f64;
    let mut gap_rho = 0.0_f64;
    for k in 1..=160 {
        let t = 0.05 * f64::from(k);
        let fin = RiceIntegrand::evaluate(d, t).unwrap();
        let lim = LimitPoint::evaluate(t);
        gap_g = gap_g.max((fin.g - lim.g).abs());
        gap_rho = gap_rho.max((fin.rho - lim.rho).abs());
    }
    (gap_g, gap_rho)
}

#[test]
fn rice_factors_converge_to_their_limits_like_one_over_d() {
    let (g100, r100) = factor_gaps(100);
    let (g1000, r1000) = factor_gaps(1000);
    let (g10000, r10000) = factor_gaps(10_000);

    for (d, gap) in [(100.0, g100), (1000.0, g1000), (10_000.0, g10000)] {
        assert!((0.25..0.40).contains(&(gap * d)), "d·max|g_d − g| = {} at d = {d}", gap * d);
    }
    for (d, gap) in [(100.0, r100), (1000.0, r1000), (10_000.0, r10000)] {
        assert!((0.35..0.50).contains(&(gap * d)), "d·max|ρ_d − ρ| = {} at d = {d}", gap * d);
    }
    assert!(g100 > g1000 && g1000 > g10000);
    assert!(r100 > r1000 && r1000 > r10000);
}

#[test]
fn variance_ratio_approaches_the_limit_constant() {
    // Var(N_d)/√d at d = 100 and 1000, against 50-digit references, closing
    // in on σ² ≈ 0.57173 like 1/d
    let sigma2 = asymptotics::sigma2_direct(1e-10).unwrap().value;
    let r100 = rice::variance_exact(100, 1e-10).unwrap() / 10.0;
    let r1000 = rice::variance_exact(1000, 1e-10).unwrap() / 1000.0_f64.sqrt();
    assert!((r100 - 0.570213660781106499).abs() < 1e-9, "ratio(100) = {r100:.18}");
    assert!((r1000 - 0.57157888811844428).abs() < 1e-9, "ratio(1000) = {r1000:.18}");
    let (d100, d1000) = ((r100 - sigma2).abs(), (r1000 - sigma2).abs());
    assert!(d1000 < d100, "no convergence: |Δ| {d100} → {d1000}");
    assert!((9.0..11.0).contains(&(d100 / d1000)), "not a 1/d trend: {}", d100 / d1000);
}

#[test]
fn monte_carlo_mean_tracks_sqrt_d() {
    for (i, d) in [1u32, 2, 5, 10, 25, 50, 100].into_iter().enumerate() {
        let n = 2000;
        let s = montecarlo::run(d, n, 1900 + i as u64, 1).unwrap();
        let gap = (s.mean - f64::from(d).sqrt()).abs();
        if d == 1 {
            assert_eq!(gap, 0.0);
        } else {
            assert!(gap <= 3.0 * s.se_mean, "d={d}: mean {} vs √d, 3·SE {}", s.mean, 3.0 * s.se_mean);
        }
    }
}
