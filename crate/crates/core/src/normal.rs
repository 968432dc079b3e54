//! Standard normal helpers with care taken in both tails.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF.
pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - cdf(x)` without cancellation.
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal quantile. Returns `-inf` at 0 and `+inf` at 1.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    // One Halley step against the accurate CDF.
    let err = if x < 0.0 { cdf(x) - p } else { (1.0 - p) - sf(x) };
    let err = if x < 0.0 { err } else { -err };
    let density = pdf(x);
    if density <= 0.0 || !x.is_finite() {
        return x;
    }
    let u = err / density;
    x - u / (1.0 + 0.5 * x * u)
}

/// Probability that a standard normal lands in `[lo, hi]`, accurate in the tails.
pub fn interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let m = if lo >= 0.0 {
        sf(lo) - sf(hi)
    } else if hi <= 0.0 {
        cdf(hi) - cdf(lo)
    } else {
        1.0 - cdf(lo) - sf(hi)
    };
    m.max(0.0)
}
