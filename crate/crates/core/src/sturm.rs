//! Exact counting of distinct real roots of an f64-coefficient polynomial.
//!
//! Every finite f64 is a dyadic rational, so the coefficient vector can be
//! rescaled by a common power of two into exact integers. The classical
//! Sturm chain is then computed over `BigInt` with pseudo-remainders
//! (keeping content growth down by taking primitive parts), and the root
//! count on all of ℝ is the drop in sign variations between −∞ and +∞.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Largest degree accepted by the exact counter. The chain itself works far
/// beyond this, but coefficient growth makes it the wrong tool there.
pub const MAX_STURM_DEGREE: u32 = 30;

/// Number of distinct real roots of Σ coeffs[k]·x^k over all of ℝ.
///
/// Coefficients must be finite and the polynomial nonzero. Degree 0 has no
/// roots. A repeated real or complex root (nontrivial gcd with the
/// derivative) is reported as `NotSquarefree` rather than silently
/// miscounted — the callers here feed continuous random coefficients, where
/// that event has probability zero and indicates a bug or a pathological
/// synthetic input.
pub fn count_real_roots(coeffs: &[f64]) -> Result<u32> {
    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("coefficients must be finite and nonempty".into()));
    }
    let p0 = to_integer_poly(coeffs)
        .ok_or_else(|| Error::Domain("the zero polynomial has no root count".into()))?;
    let deg = p0.len() - 1;
    if deg == 0 {
        return Ok(0);
    }
    if deg == 1 {
        return Ok(1);
    }

    let mut chain: Vec<Vec<BigInt>> = Vec::with_capacity(deg + 1);
    chain.push(primitive(p0.clone()));
    chain.push(primitive(derivative(&p0)));
    loop {
        let g = chain.last().unwrap();
        if g.len() == 1 {
            break; // reached a nonzero constant: the chain is complete
        }
        let f = &chain[chain.len() - 2];
        let (mut rem, steps) = pseudo_remainder(f, g);
        if rem.is_empty() {
            // gcd(p, p') has positive degree: a repeated root somewhere in ℂ
            return Err(Error::NotSquarefree);
        }
        // rem = lc(g)^steps · (f mod g); the Sturm element is −(f mod g),
        // so flip unless the accumulated leading-coefficient factor already
        // supplied an odd number of sign flips.
        let lc_negative = g.last().unwrap().is_negative();
        if !(lc_negative && steps % 2 == 1) {
            for c in &mut rem {
                *c = -std::mem::take(c);
            }
        }
        chain.push(primitive(rem));
    }

    let at = |neg_inf: bool| -> u32 {
        let mut variations = 0;
        let mut prev = 0i8;
        for p in &chain {
            let lc = p.last().unwrap();
            let mut s: i8 = if lc.is_negative() { -1 } else { 1 };
            if neg_inf && (p.len() - 1) % 2 == 1 {
                s = -s;
            }
            if prev != 0 && s != prev {
                variations += 1;
            }
            prev = s;
        }
        variations
    };
    let (lo, hi) = (at(true), at(false));
    debug_assert!(lo >= hi);
    Ok(lo - hi)
}

/// Rescale by a common power of two so every coefficient is an exact
/// integer, then trim trailing zeros. Returns None for the zero polynomial.
fn to_integer_poly(coeffs: &[f64]) -> Option<Vec<BigInt>> {
    // decompose c = m · 2^e with integer m (|m| < 2^53)
    let parts: Vec<Option<(i64, i64)>> = coeffs
        .iter()
        .map(|&c| {
            if c == 0.0 {
                return None;
            }
            let bits = c.to_bits();
            let raw_exp = ((bits >> 52) & 0x7ff) as i64;
            let frac = bits & ((1u64 << 52) - 1);
            let (mut m, mut e) = if raw_exp == 0 {
                (frac as i64, -1074)
            } else {
                ((frac | (1 << 52)) as i64, raw_exp - 1075)
            };
            while m % 2 == 0 {
                m /= 2;
                e += 1;
            }
            Some((if c < 0.0 { -m } else { m }, e))
        })
        .collect();
    let e_min = parts.iter().flatten().map(|&(_, e)| e).min()?;
    let mut out: Vec<BigInt> = parts
        .iter()
        .map(|p| match p {
            Some((m, e)) => BigInt::from(*m) << (e - e_min) as u32,
            None => BigInt::zero(),
        })
        .collect();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect()
}

/// Divide out the content (gcd of coefficients), preserving signs.
fn primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    let mut content = BigInt::zero();
    for c in &p {
        content = content.gcd(c);
        if content == BigInt::from(1) {
            return p;
        }
    }
    for c in &mut p {
        *c = &*c / &content;
    }
    p
}

/// Repeatedly cancel the leading term of f against g, multiplying f through
/// by lc(g) each step so arithmetic stays integral. Returns the remainder
/// (empty if exactly zero) and the number of steps, i.e. the exponent in the
/// accumulated lc(g)^steps factor.
fn pseudo_remainder(f: &[BigInt], g: &[BigInt]) -> (Vec<BigInt>, u32) {
    let dg = g.len() - 1;
    let lc_g = g.last().unwrap();
    let mut r = f.to_vec();
    let mut steps = 0u32;
    while r.len() > dg {
        let shift = r.len() - 1 - dg;
        let lead = r.pop().unwrap();
        for c in &mut r {
            *c = &*c * lc_g;
        }
        for (k, gc) in g[..dg].iter().enumerate() {
            r[shift + k] -= gc * &lead;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        steps += 1;
        if r.is_empty() {
            break;
        }
    }
    (r, steps)
}
