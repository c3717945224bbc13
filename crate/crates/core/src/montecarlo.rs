//! Monte Carlo estimation of the root-count law: mean, variance, and the
//! distribution of the standardized count (N − √d)/d^{1/4} against its
//! limiting normal N(0, σ²).
//!
//! Sampling is embarrassingly parallel over counter-based substreams, one
//! per sample index, so results are bit-identical for any worker count.
//! Moment aggregation runs over fixed-size chunks merged in index order.

use std::sync::Arc;

use rayon::prelude::*;

use crate::asymptotics;
use crate::error::{Error, Result};
use crate::rng::{substream_seed, CounterRng, StreamClass};
use crate::rootcount::{self, DEFAULT_GRID_STEP, DEFAULT_MAX_ROUNDS};
use crate::sampler;
use crate::stats::normal_cdf;

/// Resamples used for the bootstrap standard error of the variance.
pub const BOOTSTRAP_RESAMPLES: u64 = 1000;

const MOMENT_CHUNK: usize = 8192;

/// Per-degree root-count statistics with standard errors and normality
/// diagnostics. Reproducible bit-exact from (d, n_samples, master_seed).
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub d: u32,
    pub n_samples: u64,
    pub master_seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    /// Bootstrap standard error of the variance (1000 fixed resamples).
    pub se_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Kolmogorov–Smirnov distance of the standardized counts to N(0, σ²).
    pub ks_distance: f64,
    /// The σ² used for standardization (computed here, not a literature value).
    pub sigma2_ref: f64,
}

/// Count roots for `n_samples` independent draws and aggregate. Workers only
/// affect scheduling; any `workers ≥ 1` yields the identical summary.
pub fn run(d: u32, n_samples: u64, master_seed: u64, workers: usize) -> Result<MonteCarloSummary> {
    run_with_grid(d, n_samples, master_seed, workers, DEFAULT_GRID_STEP, DEFAULT_MAX_ROUNDS)
}

/// [`run`] with explicit grid parameters (mainly for tests).
pub fn run_with_grid(
    d: u32,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
    grid_step: f64,
    max_rounds: u32,
) -> Result<MonteCarloSummary> {
    run_full(d, n_samples, master_seed, workers, grid_step, max_rounds).map(|(s, _)| s)
}

/// [`run`], also handing back the standardized samples the summary was
/// built from, so callers needing both pay for one simulation.
pub fn run_with_samples(
    d: u32,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
    grid_step: f64,
    max_rounds: u32,
) -> Result<(MonteCarloSummary, Vec<f64>)> {
    run_full(d, n_samples, master_seed, workers, grid_step, max_rounds)
}

fn run_full(
    d: u32,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
    grid_step: f64,
    max_rounds: u32,
) -> Result<(MonteCarloSummary, Vec<f64>)> {
    if n_samples < 100 {
        return Err(Error::Domain(format!("need at least 100 samples, got {n_samples}")));
    }
    let counts = counts(d, n_samples, master_seed, workers, grid_step, max_rounds)?;

    let mut chunks = counts.chunks(MOMENT_CHUNK).map(|chunk| {
        let mut m = Moments::default();
        for &c in chunk {
            m.push(f64::from(c));
        }
        m
    });
    let first = chunks.next().expect("at least 100 samples");
    let m = chunks.fold(first, Moments::merge);

    let n = m.n as f64;
    let variance = m.m2 / (n - 1.0);
    let (skewness, excess_kurtosis) = if m.m2 > 0.0 {
        let v = m.m2 / n;
        ((m.m3 / n) / v.powf(1.5), (m.m4 / n) / (v * v) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let sigma2 = reference_sigma2()?;
    let z = standardize(&counts, d);

    let summary = MonteCarloSummary {
        d,
        n_samples,
        master_seed,
        mean: m.mean,
        variance,
        se_mean: (variance / n).sqrt(),
        se_variance: bootstrap_se_variance(&counts, master_seed),
        skewness,
        excess_kurtosis,
        ks_distance: ks_distance(&z, sigma2),
        sigma2_ref: sigma2,
    };
    Ok((summary, z))
}

/// The standardized counts (count_i − √d)/d^{1/4} for n independent draws.
pub fn standardized_sample(d: u32, n_samples: u64, master_seed: u64) -> Result<Vec<f64>> {
    standardized_sample_with(d, n_samples, master_seed, default_workers())
}

/// [`standardized_sample`] with an explicit worker count (scheduling only).
pub fn standardized_sample_with(
    d: u32,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<f64>> {
    let counts = counts(d, n_samples, master_seed, workers, DEFAULT_GRID_STEP, DEFAULT_MAX_ROUNDS)?;
    Ok(standardize(&counts, d))
}

/// Sup-distance between the empirical CDF of `samples` and the CDF of
/// N(0, sigma2). Preconditions (nonempty, sigma2 > 0) are programmer errors.
pub fn ks_distance(samples: &[f64], sigma2: f64) -> f64 {
    assert!(!samples.is_empty(), "need at least one sample");
    assert!(sigma2 > 0.0, "variance must be positive, got {sigma2}");
    let sigma = sigma2.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let n = sorted.len() as f64;
    let mut sup = 0.0_f64;
    for (i, x) in sorted.iter().enumerate() {
        let f = normal_cdf(x / sigma);
        sup = sup.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    sup
}

/// Root counts for sample indices 0..n, in index order. Samples whose grid
/// count failed to stabilize are excluded; more than 0.1% of them is an
/// error. Degree 1 short-circuits: the count is identically 1.
fn counts(
    d: u32,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
    grid_step: f64,
    max_rounds: u32,
) -> Result<Vec<u32>> {
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    if workers == 0 {
        return Err(Error::Domain("need at least one worker".into()));
    }
    if d == 1 {
        return Ok(vec![1; n_samples as usize]);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("could not build worker pool: {e}")))?;
    let weights = sampler::half_log_binomials(d);
    let results: Vec<Result<u32>> = pool.install(|| {
        (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let seed = substream_seed(master_seed, StreamClass::Samples, i);
                let s = sampler::sample_with_weights(d, seed, Arc::clone(&weights));
                rootcount::count_roots_grid(&s, grid_step, max_rounds).map(|rc| rc.count)
            })
            .collect()
    });
    let excluded = results.iter().filter(|r| r.is_err()).count() as u64;
    if excluded * 1000 > n_samples {
        return Err(Error::ExcludedSamples { excluded, total: n_samples });
    }
    Ok(results.into_iter().flatten().collect())
}

fn standardize(counts: &[u32], d: u32) -> Vec<f64> {
    let center = f64::from(d).sqrt();
    let scale = f64::from(d).powf(0.25);
    counts.iter().map(|&c| (f64::from(c) - center) / scale).collect()
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// σ² of the limiting normal, computed from the limit-kernel integral at
/// tight tolerance so the diagnostic is self-contained.
fn reference_sigma2() -> Result<f64> {
    let r = asymptotics::sigma2_direct(1e-9)?;
    if !r.quadrature.converged {
        return Err(Error::NonConvergence {
            achieved: r.quadrature.abs_error_estimate,
            requested: 1e-9,
            n_evals: r.quadrature.n_evals,
        });
    }
    Ok(r.value)
}

/// Bootstrap standard error of the sample variance: 1000 resamples with
/// replacement, each drawn from its own fixed substream.
fn bootstrap_se_variance(counts: &[u32], master_seed: u64) -> f64 {
    let n = counts.len();
    let mut agg = Moments::default();
    for b in 0..BOOTSTRAP_RESAMPLES {
        let mut rng = CounterRng::new(substream_seed(master_seed, StreamClass::Bootstrap, b));
        let mut m = Moments::default();
        for _ in 0..n {
            let idx = ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize;
            m.push(f64::from(counts[idx]));
        }
        agg.push(m.m2 / (n as f64 - 1.0));
    }
    (agg.m2 / (BOOTSTRAP_RESAMPLES as f64 - 1.0)).sqrt()
}

/// One-pass central-moment accumulator with an exact merge, so chunked and
/// sequential aggregation agree to rounding and the merge order can be
/// fixed independently of scheduling.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        let n0 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term = delta * dn * n0;
        self.mean += dn;
        self.m4 += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term;
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        Moments {
            n: self.n + other.n,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + d2 * na * nb / n,
            m3: self.m3
                + other.m3
                + d2 * delta * na * nb * (na - nb) / (n * n)
                + 3.0 * delta * (na * other.m2 - nb * self.m2) / n,
            m4: self.m4
                + other.m4
                + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
                + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
                + 4.0 * delta * (na * other.m3 - nb * self.m3) / n,
        }
    }
}
