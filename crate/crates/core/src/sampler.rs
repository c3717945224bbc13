//! Drawing random polynomials from the binomial-variance Gaussian ensemble
//! and evaluating the homogenized circle form
//!
//! ```text
//!   Y(u) = Σ_{n=0}^{d} a_n cosⁿ(u) sin^{d−n}(u),    a_n = b_n·C(d,n)^{1/2},
//! ```
//!
//! with b_n iid standard normal. The binomial weights overflow f64 near
//! d ≈ 1030 and lose precision long before, so evaluation always works with
//! (1/2)·ln C(d,n) and runs in the log domain; there is no fast path.

use std::io;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernels::{ln_abs_cos, ln_abs_sin};
use crate::rng::NormalStream;

/// One draw from the ensemble: the unit normals, the precomputed half
/// log-binomial weights, and the seed it came from.
#[derive(Debug, Clone)]
pub struct KssSample {
    pub d: u32,
    /// b_0, …, b_d.
    pub normals: Vec<f64>,
    /// (1/2)·ln C(d,n) for n = 0, …, d; symmetric about the middle.
    pub log_binomial_half: Arc<[f64]>,
    /// The stream seed the normals were drawn from (0 for synthetic samples).
    pub seed_tag: u64,
}

/// (1/2)·ln C(d,n) for all n, via the log-gamma function (relative error
/// well under 10⁻¹²), with the n ↔ d−n symmetry made exact by mirroring and
/// the n ∈ {0, d} entries pinned to exactly 0.
pub fn half_log_binomials(d: u32) -> Arc<[f64]> {
    let n = d as usize;
    let mut w = vec![0.0_f64; n + 1];
    let lg_top = libm::lgamma(f64::from(d) + 1.0);
    for k in 1..=n / 2 {
        // For small k the three-lgamma form cancels catastrophically
        // (ln C(d,1) = ln d comes out of terms of size d·ln d), so sum the
        // k factors ln((d−k+j)/j) directly there.
        let lnc = if k <= 32 {
            (1..=k).map(|j| (((n - k + j) as f64) / j as f64).ln()).sum()
        } else {
            lg_top - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
        };
        w[k] = 0.5 * lnc;
        w[n - k] = w[k];
    }
    w.into()
}

/// Draw one sample. Deterministic in (d, stream_seed): the normals are the
/// first d+1 outputs of the counter-mode normal stream at that seed.
pub fn sample(d: u32, stream_seed: u64) -> KssSample {
    sample_with_weights(d, stream_seed, half_log_binomials(d))
}

/// Same as [`sample`] but reusing a precomputed weight table (they depend
/// only on d, so Monte Carlo shares one table across all samples).
pub fn sample_with_weights(d: u32, stream_seed: u64, weights: Arc<[f64]>) -> KssSample {
    debug_assert_eq!(weights.len(), d as usize + 1);
    let normals = NormalStream::new(stream_seed).take(d as usize + 1);
    KssSample { d, normals, log_binomial_half: weights, seed_tag: stream_seed }
}

impl KssSample {
    /// Build a sample from explicit normals (for tests and diagnostics).
    pub fn with_normals(d: u32, normals: Vec<f64>, seed_tag: u64) -> Self {
        assert_eq!(normals.len(), d as usize + 1);
        KssSample { d, normals, log_binomial_half: half_log_binomials(d), seed_tag }
    }

    /// The circle form at angle u ∈ [0, π].
    pub fn eval_y(&self, u: f64) -> Result<f64> {
        if !(0.0..=std::f64::consts::PI).contains(&u) {
            return Err(Error::Domain(format!("angle must lie in [0, pi], got {u}")));
        }
        Ok(self.eval_y_raw(u))
    }

    /// The scaled form Z(t) = Y(t/√d) for t ∈ [0, √d·π].
    pub fn eval_z(&self, t: f64) -> Result<f64> {
        let sd = f64::from(self.d).sqrt();
        if !t.is_finite() || t < 0.0 || t > sd * std::f64::consts::PI * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "scaled time must lie in [0, sqrt(d)*pi], got {t}"
            )));
        }
        Ok(self.eval_y_raw((t / sd).min(std::f64::consts::PI)))
    }

    /// Evaluation core. Angles where a single monomial survives are
    /// short-circuited exactly; elsewhere the terms
    ///
    /// ```text
    ///   b_n·σⁿ·exp(w_n + n·ln|cos u| + (d−n)·ln|sin u|),   σ = sign(cos u)
    /// ```
    ///
    /// are generated from the peak of the (concave in n) exponent outward by
    /// pure multiplications — the weight steps exp(w_{n+1}−w_n) have the
    /// closed form √((d−n)/(n+1)) — and combined by compensated summation.
    /// Every term has magnitude ≤ |b_n| (Cauchy-Schwarz), so no overflow is
    /// possible; terms below 10⁻²⁴ of the peak are dropped.
    pub(crate) fn eval_y_raw(&self, u: f64) -> f64 {
        let d = self.d as usize;
        let b = &self.normals;
        if u == 0.0 {
            return b[d];
        }
        if u == std::f64::consts::PI {
            return if d % 2 == 0 { b[d] } else { -b[d] };
        }
        if u == std::f64::consts::FRAC_PI_2 {
            return b[0];
        }

        let lc = ln_abs_cos(u);
        let ls = ln_abs_sin(u);
        let w = &self.log_binomial_half;

        // locate the exponent peak
        let mut peak = 0usize;
        let mut e_peak = w[0] + d as f64 * ls;
        for n in 1..=d {
            let e = w[n] + n as f64 * lc + (d - n) as f64 * ls;
            if e > e_peak {
                e_peak = e;
                peak = n;
            }
        }
        let ratio = u.cos() / u.sin(); // signed; sin > 0 on (0, pi)
        // the incremental products below are anchored at |term_peak| = 1, so
        // the peak term's own sign(cos)^peak must be restored at the end
        let scale = if ratio < 0.0 && peak % 2 == 1 { -e_peak.exp() } else { e_peak.exp() };
        if scale == 0.0 {
            return 0.0;
        }
        let mut sum = b[peak];
        let mut comp = 0.0;
        let add = |x: f64, sum: &mut f64, comp: &mut f64| {
            let t = *sum + x;
            if sum.abs() >= x.abs() {
                *comp += (*sum - t) + x;
            } else {
                *comp += (x - t) + *sum;
            }
            *sum = t;
        };

        let mut term = 1.0;
        for n in peak..d {
            term *= ratio * ((d - n) as f64 / (n + 1) as f64).sqrt();
            if term.abs() < 1e-24 {
                break;
            }
            add(b[n + 1] * term, &mut sum, &mut comp);
        }
        term = 1.0;
        for n in (1..=peak).rev() {
            term /= ratio * ((d - n + 1) as f64 / n as f64).sqrt();
            if term.abs() < 1e-24 {
                break;
            }
            add(b[n - 1] * term, &mut sum, &mut comp);
        }
        (sum + comp) * scale
    }

    /// Debug dump of the draw (columns: n, b_n, log_binomial_half).
    pub fn dump_csv(&self, out: &mut dyn io::Write) -> io::Result<()> {
        writeln!(out, "n,b_n,log_binomial_half")?;
        for (n, (b, w)) in self.normals.iter().zip(self.log_binomial_half.iter()).enumerate() {
            writeln!(out, "{n},{b:.16e},{w:.16e}")?;
        }
        Ok(())
    }
}
