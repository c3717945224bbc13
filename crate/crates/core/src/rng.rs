//! Counter-mode random streams for schedule-independent Monte Carlo.
//!
//! Every value is a pure function of (stream seed, counter), so the i-th
//! sample of a run is the same no matter how work is split across threads.
//!
//! Constants and their provenance:
//! - `GOLDEN_GAMMA` = ⌊2⁶⁴/φ⌋ (odd), the SplitMix64 state increment.
//! - `MIX_A`, `MIX_B` and the 30/27/31 shift triple form the SplitMix64
//!   output finalizer (Stafford's "mix13" avalanche function).
//! - `INDEX_MULT` is the first multiplier of the MurmurHash3 64-bit
//!   finalizer, used here only to spread substream indices before mixing.
//!
//! Gaussian variates use the polar (radius-angle) form of the Box-Muller
//! transform: exactly two uniforms produce two normals, with no rejection
//! loop, so the counter advance per draw is fixed — a requirement for
//! counter-mode reproducibility.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_A: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_B: u64 = 0x94D0_49BB_1331_11EB;
const INDEX_MULT: u64 = 0xFF51_AFD7_ED55_8CCD;

/// SplitMix64 output finalizer: a bijective avalanche mix of the state.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_A);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_B);
    z ^ (z >> 31)
}

/// Families of substreams hanging off one master seed. Keeping the classes
/// disjoint guarantees e.g. bootstrap resampling never reuses the randomness
/// that generated the samples themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamClass {
    /// Per-sample coefficient draws; index = sample number.
    Samples = 1,
    /// Bootstrap resampling; index = resample number.
    Bootstrap = 2,
    /// Synthetic reference draws in diagnostics; index free.
    Reference = 3,
}

/// Derive the seed of substream `index` within `class` from a master seed.
/// Two avalanche passes separate the (master, class) pair from the index, so
/// consecutive indices give decorrelated streams.
pub fn substream_seed(master: u64, class: StreamClass, index: u64) -> u64 {
    let class_seed = mix64(master.wrapping_add((class as u64).wrapping_mul(GOLDEN_GAMMA)));
    mix64(class_seed ^ index.wrapping_mul(INDEX_MULT))
}

/// A counter-mode uniform generator: output i is `mix64(seed + (i+1)·γ)`,
/// i.e. the SplitMix64 sequence seeded at `seed`, addressable by counter.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform on the half-open-from-zero interval (0, 1]: the top 53 bits
    /// plus one, scaled by 2⁻⁵³. Never returns 0, so ln(u) is always finite.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) * (1.0 / 9007199254740992.0)
    }

    /// One standard normal pair by the polar Box-Muller transform.
    #[inline]
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        (radius * angle.cos(), radius * angle.sin())
    }
}

/// Stream of standard normals over a counter generator, caching the second
/// element of each Box-Muller pair.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: CounterRng,
    cached: Option<f64>,
}

impl NormalStream {
    pub fn new(stream_seed: u64) -> Self {
        NormalStream { rng: CounterRng::new(stream_seed), cached: None }
    }

    #[inline]
    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.cached.take() {
            return z;
        }
        let (a, b) = self.rng.next_normal_pair();
        self.cached = Some(b);
        a
    }

    pub fn take(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}
