//! Counting the zeros of a sampled circle form on the open interval
//! (0, π) — equivalently the real roots of the underlying polynomial,
//! since x = cot(u) maps (0, π) bijectively onto ℝ.
//!
//! Two independent routes: a sign-change grid scan with automatic
//! refinement until the count stabilizes, and an exact integer Sturm-chain
//! count for cross-validation at low degree.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sampler::KssSample;
use crate::sturm;

/// Default initial scaled-time grid step (the spacing of evaluation nodes
/// in t = √d·u, so the node count scales like √d).
pub const DEFAULT_GRID_STEP: f64 = 0.05;
/// Default maximum number of grid passes (each pass halves the step).
pub const DEFAULT_MAX_ROUNDS: u32 = 5;

/// Outcome of a stabilized grid count.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCount {
    pub d: u32,
    /// Zeros found on (0, π).
    pub count: u32,
    /// Scaled-time step of the final (accepted) grid.
    pub grid_step_used: f64,
    /// Grid passes performed; stabilization needs at least two.
    pub refinement_rounds: u32,
    /// Cells in the final pass with a near-zero endpoint but no sign
    /// change, which were rescanned at 10x resolution.
    pub flagged_tangencies: u32,
}

struct GridPass {
    count: u32,
    flagged: u32,
}

/// Count zeros by sign changes on grids of step h, h/2, h/4, … until two
/// consecutive passes agree. Each bracketing cell is confirmed by bisection
/// down to width 10⁻¹². Two kinds of same-sign cell get a second look at
/// tenfold resolution: near-tangency cells (an endpoint value within 10⁻⁸
/// of zero relative to the grid scale — these increment
/// `flagged_tangencies`) and dip cells, where the endpoint values are small
/// against the local second difference, the geometric signature of an even
/// root cluster hiding inside the cell. Crossings recovered either way come
/// in pairs, so the count's parity — which must equal the parity of d and
/// is asserted — is preserved by construction.
pub fn count_roots_grid(sample: &KssSample, h: f64, max_rounds: u32) -> Result<RootCount> {
    if !(h > 0.0 && h <= 0.2) {
        return Err(Error::Domain(format!("grid step must lie in (0, 0.2], got {h}")));
    }
    if max_rounds == 0 {
        return Err(Error::Domain("need at least one grid round".into()));
    }
    let d = sample.d;
    let span = f64::from(d).sqrt() * PI;
    let mut m = ((span / h).ceil() as u64).max(4);
    let mut prev: Option<u32> = None;
    for round in 1..=max_rounds {
        let pass = count_on_grid(sample, m as usize);
        if prev == Some(pass.count) {
            assert_eq!(pass.count % 2, d % 2, "root-count parity violated at degree {d}");
            return Ok(RootCount {
                d,
                count: pass.count,
                grid_step_used: span / m as f64,
                refinement_rounds: round,
                flagged_tangencies: pass.flagged,
            });
        }
        prev = Some(pass.count);
        m *= 2;
    }
    Err(Error::UnstableRootCount { d, rounds: max_rounds })
}

/// Exact count via a Sturm chain on the recovered coefficients
/// a_n = b_n·C(d,n)^{1/2}. Only sensible at low degree, where the binomial
/// weights are exactly representable; refuses d > MAX_STURM_DEGREE.
pub fn count_roots_sturm(sample: &KssSample) -> Result<u32> {
    let d = sample.d;
    if d > sturm::MAX_STURM_DEGREE {
        return Err(Error::DegreeTooLarge { d, max: sturm::MAX_STURM_DEGREE });
    }
    let coeffs: Vec<f64> = sample
        .normals
        .iter()
        .zip(sample.log_binomial_half.iter())
        .map(|(b, w)| b * w.exp())
        .collect();
    let count = sturm::count_real_roots(&coeffs)?;
    if sample.normals[d as usize] != 0.0 {
        assert_eq!(count % 2, d % 2, "sturm count parity violated at degree {d}");
    }
    Ok(count)
}

fn count_on_grid(sample: &KssSample, m: usize) -> GridPass {
    let du = PI / m as f64;
    let node = |j: usize| if j == m { PI } else { j as f64 * du };
    let mut v = Vec::with_capacity(m + 1);
    for j in 0..=m {
        v.push(value_at(sample, node(j), du));
    }

    let max_abs = v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let near_zero_gate = 1e-8 * f64::from(sample.d).sqrt() * max_abs;
    // A pair of roots strictly inside a cell forces the smaller endpoint
    // value below ~κ(w/2)² while the second difference of the nodes is
    // ≈ 2κw² (κ = local half-curvature), so endpoint ≤ 0.75·|Δ²v| is a
    // conservative geometric trigger for hidden even clusters.
    let second_diff = |i: usize| -> f64 {
        if i == 0 || i == m {
            0.0
        } else {
            (v[i - 1] - 2.0 * v[i] + v[i + 1]).abs()
        }
    };

    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut flagged = 0u32;
    for j in 0..m {
        let (lo, hi) = (node(j), node(j + 1));
        let (a, b) = (v[j], v[j + 1]);
        if is_positive(a) != is_positive(b) {
            brackets.push((lo, hi));
            continue;
        }
        let small = a.abs().min(b.abs());
        let near_zero = small < near_zero_gate;
        let dip = small <= 0.75 * second_diff(j).max(second_diff(j + 1));
        if near_zero {
            flagged += 1;
        }
        if near_zero || dip {
            rescan_cell(sample, lo, hi, a, b, &mut brackets);
        }
    }
    for &(lo, hi) in &brackets {
        bisect_confirm(sample, lo, hi);
    }
    GridPass { count: brackets.len() as u32, flagged }
}

/// Re-examine a same-sign cell at 10× resolution; if the signs still hide a
/// crossing, probe the interpolated vertex of the deepest dip. Any crossings
/// found here come in pairs (the cell's endpoint signs agree), preserving
/// count parity by construction.
fn rescan_cell(
    sample: &KssSample,
    lo: f64,
    hi: f64,
    v_lo: f64,
    v_hi: f64,
    brackets: &mut Vec<(f64, f64)>,
) {
    let sub = (hi - lo) / 10.0;
    let mut pts = Vec::with_capacity(11);
    pts.push((lo, v_lo));
    for k in 1..=9 {
        let u = lo + f64::from(k) * sub;
        pts.push((u, value_at(sample, u, sub)));
    }
    pts.push((hi, v_hi));

    let mut found = false;
    for w in pts.windows(2) {
        if is_positive(w[0].1) != is_positive(w[1].1) {
            brackets.push((w[0].0, w[1].0));
            found = true;
        }
    }
    if found {
        return;
    }

    // fit a parabola through the deepest interior triple; three samples of a
    // locally quadratic dip recover the vertex to O(sub³)
    let i = (1..=9)
        .min_by(|&a, &b| pts[a].1.abs().partial_cmp(&pts[b].1.abs()).unwrap())
        .unwrap();
    let (ya, yb, yc) = (pts[i - 1].1, pts[i].1, pts[i + 1].1);
    let denom = ya - 2.0 * yb + yc;
    if denom == 0.0 {
        return;
    }
    let offset = 0.5 * (ya - yc) / denom; // vertex at pts[i].0 + offset·sub
    let vertex_val = yb - 0.125 * (ya - yc) * (ya - yc) / denom;
    if offset.abs() >= 1.0 || is_positive(vertex_val) == is_positive(yb) || vertex_val == 0.0 {
        return;
    }
    let u_star = pts[i].0 + offset * sub;
    if u_star <= lo || u_star >= hi {
        return;
    }
    let y_star = value_at(sample, u_star, sub);
    if is_positive(y_star) != is_positive(yb) {
        if offset >= 0.0 {
            brackets.push((pts[i].0, u_star));
            brackets.push((u_star, pts[i + 1].0));
        } else {
            brackets.push((pts[i - 1].0, u_star));
            brackets.push((u_star, pts[i].0));
        }
    }
}

/// Node value with exact zeros nudged off the node (an exact interior zero
/// would otherwise be invisible to the sign test).
fn value_at(sample: &KssSample, u: f64, du: f64) -> f64 {
    let y = sample.eval_y_raw(u);
    if y == 0.0 && u > 0.0 && u < PI {
        sample.eval_y_raw(u + du * 1e-9)
    } else {
        y
    }
}

fn is_positive(x: f64) -> bool {
    x > 0.0
}

/// Shrink a sign-change bracket to width 10⁻¹², confirming the crossing.
fn bisect_confirm(sample: &KssSample, mut lo: f64, mut hi: f64) {
    let lo_sign = is_positive(sample.eval_y_raw(lo));
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let y = sample.eval_y_raw(mid);
        if y == 0.0 {
            break; // landed exactly on the root
        }
        if is_positive(y) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream_seed, StreamClass};
    use crate::sampler::{self, KssSample};
    use std::sync::Arc;

    fn draw(d: u32, master: u64, i: u64, w: &Arc<[f64]>) -> KssSample {
        sampler::sample_with_weights(d, substream_seed(master, StreamClass::Samples, i), Arc::clone(w))
    }

    #[test]
    fn degree_one_always_counts_one() {
        let w = sampler::half_log_binomials(1);
        for i in 0..200 {
            let s = draw(1, 41, i, &w);
            let rc = count_roots_grid(&s, DEFAULT_GRID_STEP, DEFAULT_MAX_ROUNDS).unwrap();
            assert_eq!(rc.count, 1);
            assert_eq!(rc.d, 1);
            assert!(rc.grid_step_used <= DEFAULT_GRID_STEP);
            assert!(rc.refinement_rounds >= 2);
            assert_eq!(count_roots_sturm(&s).unwrap(), 1);
        }
    }

    #[test]
    fn degree_two_root_probability() {
        // N₂ is 2 with probability √2/2 and 0 otherwise
        let n = 40_000;
        let w = sampler::half_log_binomials(2);
        let mut twos = 0u32;
        for i in 0..n {
            let c = count_roots_grid(&draw(2, 52, i, &w), 0.05, 5).unwrap().count;
            assert!(c == 0 || c == 2);
            if c == 2 {
                twos += 1;
            }
        }
        let frac = f64::from(twos) / n as f64;
        let expect = 0.5_f64.sqrt();
        // 3·√(p(1−p)/n) ≈ 0.0068
        assert!((frac - expect).abs() < 0.0068, "P(N=2) = {frac} vs {expect}");
    }

    #[test]
    fn grid_agrees_with_sturm() {
        for d in [3u32, 5, 10] {
            let w = sampler::half_log_binomials(d);
            for i in 0..120 {
                let s = draw(d, 63, i, &w);
                let grid = count_roots_grid(&s, 0.05, 5).unwrap().count;
                let exact = count_roots_sturm(&s).unwrap();
                assert_eq!(grid, exact, "d={d} sample {i}");
            }
        }
    }

    #[test]
    fn mean_count_follows_square_root_law() {
        // E N₅ = √5; n = 10⁴ exact counts give a ±3·SE band of ≈ 0.033
        let d = 5u32;
        let n = 10_000u64;
        let w = sampler::half_log_binomials(d);
        let mut total = 0u64;
        for i in 0..n {
            total += u64::from(count_roots_sturm(&draw(d, 74, i, &w)).unwrap());
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 5.0_f64.sqrt()).abs() < 0.033, "mean N_5 = {mean}");
    }

    #[test]
    fn doubling_beyond_the_stabilized_round_changes_nothing() {
        // fixed 1000-sample regression corpus across two degrees
        for d in [4u32, 9] {
            let w = sampler::half_log_binomials(d);
            let span = f64::from(d).sqrt() * PI;
            for i in 0..500 {
                let s = draw(d, 107, i, &w);
                let rc = count_roots_grid(&s, DEFAULT_GRID_STEP, DEFAULT_MAX_ROUNDS).unwrap();
                let m_final = (span / rc.grid_step_used).round() as usize;
                let deeper = count_on_grid(&s, 2 * m_final);
                assert_eq!(deeper.count, rc.count, "d={d} sample {i}");
            }
        }
    }

    #[test]
    fn count_is_stable_under_initial_step() {
        let d = 10u32;
        let w = sampler::half_log_binomials(d);
        for i in 0..300 {
            let s = draw(d, 85, i, &w);
            let a = count_roots_grid(&s, 0.05, 5).unwrap();
            let b = count_roots_grid(&s, 0.025, 5).unwrap();
            assert_eq!(a.count, b.count, "sample {i}");
            assert!(b.grid_step_used <= 0.025);
        }
    }

    #[test]
    fn counts_have_degree_parity() {
        for d in 3u32..=8 {
            let w = sampler::half_log_binomials(d);
            for i in 0..50 {
                let c = count_roots_grid(&draw(d, 96, i, &w), 0.05, 5).unwrap().count;
                assert_eq!(c % 2, d % 2);
            }
        }
    }

    /// A double root parked exactly on a grid node: the node value is the
    /// tiny offset δ, far below the tangency gate, so the cell is rescanned
    /// and correctly contributes no crossing (δ > 0) or is caught as a pair
    /// of ordinary sign changes (δ < 0).
    #[test]
    fn near_tangency_at_a_node_is_flagged_or_split() {
        // place the vertex of (x − x₀)² + δ at grid node 30 of the first pass
        let du = PI / 89.0; // m = ceil(√2·π / 0.05) = 89
        let u0 = 30.0 * du;
        let x0 = u0.cos() / u0.sin();

        let tangent = KssSample::with_normals(
            2,
            vec![x0 * x0 + 1e-12, -std::f64::consts::SQRT_2 * x0, 1.0],
            0,
        );
        let rc = count_roots_grid(&tangent, 0.05, 5).unwrap();
        assert_eq!(rc.count, 0);
        assert!(rc.flagged_tangencies >= 1, "tangency was not flagged: {rc:?}");
        assert_eq!(count_roots_sturm(&tangent).unwrap(), 0);

        let split = KssSample::with_normals(
            2,
            vec![x0 * x0 - 1e-12, -std::f64::consts::SQRT_2 * x0, 1.0],
            0,
        );
        let rc = count_roots_grid(&split, 0.05, 5).unwrap();
        assert_eq!(rc.count, 2);
        assert_eq!(count_roots_sturm(&split).unwrap(), 2);
    }

    #[test]
    fn sturm_route_covers_the_degree_limit() {
        let s = sampler::sample(30, 3141);
        let grid = count_roots_grid(&s, 0.05, 5).unwrap().count;
        assert_eq!(count_roots_sturm(&s).unwrap(), grid);
        let too_big = sampler::sample(31, 3141);
        assert!(matches!(
            count_roots_sturm(&too_big),
            Err(Error::DegreeTooLarge { d: 31, max: 30 })
        ));
    }

    #[test]
    fn parameter_domain_is_enforced() {
        let s = sampler::sample(3, 7);
        assert!(count_roots_grid(&s, 0.0, 5).is_err());
        assert!(count_roots_grid(&s, 0.21, 5).is_err());
        assert!(count_roots_grid(&s, -0.05, 5).is_err());
        assert!(count_roots_grid(&s, 0.05, 0).is_err());
        // a single round can never stabilize
        assert!(matches!(
            count_roots_grid(&s, 0.05, 1),
            Err(Error::UnstableRootCount { d: 3, rounds: 1 })
        ));
    }
}
