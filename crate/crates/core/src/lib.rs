//! Statistics of the real roots of Kostlan–Shub–Smale (KSS) random
//! polynomials.
//!
//! A degree-`d` KSS polynomial has independent centered Gaussian coefficients
//! with `Var(a_n) = C(d, n)`. Its number of real roots `N_d` has mean `√d`
//! exactly; this crate computes the rest of the story:
//!
//! * [`kernels`] — the covariance `r_d(t) = cos^d(t/√d)` of the scaled
//!   circle process whose zeros on `(0, √d·π)` are the real roots, plus its
//!   derivatives and Gaussian large-`d` limit.
//! * [`rice`] — two-point Rice-formula factors and the exact second factorial
//!   moment / variance of `N_d` by adaptive quadrature.
//! * [`asymptotics`] — the large-`d` limit functions, the Hermite-chaos
//!   coefficients of the root-counting functional, and the limit variance
//!   `σ² = lim Var(N_d)/√d ≈ 0.5717` via two independent routes.
//! * [`sampler`] / [`rootcount`] — reproducible sampling of KSS coefficient
//!   vectors and root counting (sign-change grid with bisection, plus an
//!   exact Sturm-chain oracle for small degrees).
//! * [`montecarlo`] — deterministic parallel simulation of the root-count
//!   distribution with standardized samples and a Kolmogorov–Smirnov
//!   distance against the Gaussian limit law.

pub mod asymptotics;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod quad;
pub mod rice;
pub mod rng;
pub mod rootcount;
pub mod sampler;
pub mod stats;
pub mod sturm;

pub use error::{Error, Result};
