//! Conversions between trade-off curves and `(eps, delta)` guarantees.

use crate::curve::{CurveKind, TradeoffCurve};
use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::normal;
use crate::pld::{PrivacyLossDistribution, Rounding};
use serde::{Deserialize, Serialize};

/// Upper end of the bisection for `eps`; larger answers are reported as infinite.
pub const EPS_CAP: f64 = 64.0;
const EPS_TOL: f64 = 1e-12;
const PROFILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsDeltaPoint {
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyProfile {
    pub points: Vec<EpsDeltaPoint>,
}

/// Smallest `delta` such that the curve dominates `f_{eps, delta}`.
///
/// Both supporting lines of slope `-e^eps` are checked, one for the curve and
/// one for its inverse, so asymmetric curves are handled conservatively.
pub fn delta_at_eps(curve: &TradeoffCurve, eps: f64) -> f64 {
    let delta = match *curve.kind() {
        CurveKind::Gaussian { mu } => gaussian_delta(mu, eps),
        CurveKind::EpsDelta { eps: e0, delta: d0 } => eps_delta_delta(e0, d0, eps),
        CurveKind::PiecewiseLinear { ref knots } => knots_delta(knots, eps),
    };
    delta.clamp(0.0, 1.0)
}

/// Hockey-stick divergence of `N(mu, 1)` from `N(0, 1)`.
fn gaussian_delta(mu: f64, eps: f64) -> f64 {
    if mu == 0.0 {
        return (-eps.exp_m1()).max(0.0);
    }
    normal::cdf(-eps / mu + 0.5 * mu) - eps.exp() * normal::cdf(-eps / mu - 0.5 * mu)
}

fn eps_delta_delta(e0: f64, d0: f64, eps: f64) -> f64 {
    if e0.is_infinite() {
        return 1.0;
    }
    let weight = (1.0 - d0) / (1.0 + e0.exp());
    d0 + weight * ((e0.exp() - eps.exp()).max(0.0) + (1.0 - (eps + e0).exp()).max(0.0))
}

fn knots_delta(knots: &[(f64, f64)], eps: f64) -> f64 {
    let scale = eps.exp();
    knots
        .iter()
        .map(|&(a, b)| (1.0 - scale * a - b).max(1.0 - a - scale * b))
        .fold(0.0, f64::max)
}

/// Smallest `eps >= 0` with `delta_at_eps(curve, eps) <= delta`, or infinity.
pub fn eps_at_delta(curve: &TradeoffCurve, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(invert_monotone(|e| delta_at_eps(curve, e), delta))
}

/// Same as [`eps_at_delta`] but reading the loss distribution directly.
pub fn pld_eps_at_delta(pld: &PrivacyLossDistribution, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let swapped = pld.swap();
    Ok(invert_monotone(|e| pld_delta_at_eps(pld, e).max(pld_delta_at_eps(&swapped, e)), delta))
}

/// Hockey-stick divergence `sum (p - e^eps q)_+` of the summarized pair,
/// moved by the round-off budget in the direction of the rounding.
///
/// Pessimistic lattice points carry the exact ratio `p / q = e^(k cell)`, so
/// the divergence is read from the P-masses alone and the budget enters
/// without an `e^eps` factor.
pub fn pld_delta_at_eps(pld: &PrivacyLossDistribution, eps: f64) -> f64 {
    let budget = pld.roundoff();
    let relative = pld.relative_roundoff();
    let delta = match pld.rounding() {
        Rounding::Pessimistic => {
            let finite: f64 = pld
                .losses()
                .iter()
                .zip(pld.mass_p())
                .filter(|(&l, _)| l > eps)
                .map(|(&l, &p)| p * -(eps - l).exp_m1())
                .sum();
            (1.0 + relative) * finite + pld.p_infinity() + budget
        }
        Rounding::Optimistic => {
            let scale = eps.exp();
            let (finite, slack) = pld
                .mass_p()
                .iter()
                .zip(pld.mass_q())
                .filter(|(&p, &q)| p > scale * q)
                .fold((0.0, 0.0), |(d, s), (&p, &q)| (d + (p - scale * q), s + (p + scale * q)));
            finite - relative * slack + pld.p_infinity() - budget * (1.0 + scale)
        }
    };
    delta.clamp(0.0, 1.0)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    Ok(())
}

/// Bisection for the smallest `eps` in `[0, EPS_CAP]` with `profile(eps) <= target`.
fn invert_monotone(profile: impl Fn(f64) -> f64, target: f64) -> f64 {
    if profile(0.0) <= target {
        return 0.0;
    }
    if profile(EPS_CAP) > target {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, EPS_CAP);
    while hi - lo > EPS_TOL {
        let mid = 0.5 * (lo + hi);
        if profile(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `delta_at_eps` over a sorted grid.
pub fn privacy_profile(curve: &TradeoffCurve, eps_grid: &[f64]) -> Result<PrivacyProfile> {
    if eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("eps grid must be strictly increasing"));
    }
    if eps_grid.iter().any(|e| !e.is_finite()) {
        return Err(Error::domain("eps grid must be finite"));
    }
    let mut points: Vec<EpsDeltaPoint> = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let delta = delta_at_eps(curve, eps);
        if let Some(prev) = points.last() {
            if delta > prev.delta + PROFILE_TOL {
                return Err(Error::accounting(format!("privacy profile increases at eps = {eps}")));
            }
        }
        let delta = points.last().map_or(delta, |p| delta.min(p.delta));
        points.push(EpsDeltaPoint { eps, delta });
    }
    Ok(PrivacyProfile { points })
}

/// `sum_x max{P(x) - e^eps Q(x), 0}`.
pub fn hockey_stick(p: &DiscreteDistribution, q: &DiscreteDistribution, eps: f64) -> Result<f64> {
    p.check_same_support(q)?;
    let scale = eps.exp();
    Ok(p.mass().iter().zip(q.mass()).map(|(a, b)| (a - scale * b).max(0.0)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::from_distribution_pair;

    #[test]
    fn identity_has_no_delta() {
        let id = TradeoffCurve::identity();
        for eps in [0.0, 0.5, 3.0] {
            assert_eq!(delta_at_eps(&id, eps), 0.0);
        }
        assert_eq!(eps_at_delta(&id, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn pure_dp_is_tight() {
        let f = TradeoffCurve::eps_delta(0.8, 0.0).unwrap();
        assert_eq!(delta_at_eps(&f, 0.8), 0.0);
        let knots = TradeoffCurve::from_knots(f.working_knots()).unwrap();
        assert!(delta_at_eps(&knots, 0.8) < 1e-15);
    }

    #[test]
    fn gaussian_value_against_quadrature() {
        // E_Q (dP/dQ - e)_+ for N(0,1) vs N(1,1) by a fine midpoint rule.
        let (lo, hi, n) = (-12.0, 12.0, 400_000);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = lo + (i as f64 + 0.5) * h;
            let q = (-0.5 * (x - 1.0) * (x - 1.0)).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let ratio = (0.5 - x).exp();
            acc += (ratio - 1f64.exp()).max(0.0) * q * h;
        }
        let g1 = TradeoffCurve::gaussian(1.0).unwrap();
        assert!((delta_at_eps(&g1, 1.0) - acc).abs() < 1e-9);
        assert!((acc - 0.12693).abs() < 1e-4);
    }

    #[test]
    fn infinite_eps_for_perfect_distinguishability() {
        assert_eq!(eps_at_delta(&TradeoffCurve::zero(), 0.5).unwrap(), f64::INFINITY);
        assert!(eps_at_delta(&TradeoffCurve::identity(), 0.0).is_err());
    }

    #[test]
    fn gaussian_round_trip() {
        let g = TradeoffCurve::gaussian(1.0).unwrap();
        let d = delta_at_eps(&g, 1.0);
        assert!((eps_at_delta(&g, d).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profiles() {
        let g = TradeoffCurve::gaussian(1.0).unwrap();
        let prof = privacy_profile(&g, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(prof.points.windows(2).all(|w| w[1].delta < w[0].delta));
        let f = TradeoffCurve::eps_delta(1.0, 0.1).unwrap();
        let prof = privacy_profile(&f, &[0.5, 1.0]).unwrap();
        assert!(prof.points[0].delta > 0.1);
        assert_eq!(prof.points[1].delta, 0.1);
        assert!(privacy_profile(&f, &[1.0, 0.5]).is_err());
        let id = privacy_profile(&TradeoffCurve::identity(), &[0.0, 1.0]).unwrap();
        assert!(id.points.iter().all(|p| p.delta == 0.0));
    }

    #[test]
    fn hockey_stick_examples() {
        let p = DiscreteDistribution::bernoulli(0.75).unwrap();
        let q = DiscreteDistribution::bernoulli(0.25).unwrap();
        assert!((hockey_stick(&p, &q, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(hockey_stick(&p, &p, 0.3).unwrap(), 0.0);
        let eps = 3f64.ln();
        assert!(hockey_stick(&p, &q, eps).unwrap().abs() < 1e-15);
        let curve = from_distribution_pair(&p, &q).unwrap();
        for e in [0.0, 0.2, 0.9] {
            let both = hockey_stick(&p, &q, e).unwrap().max(hockey_stick(&q, &p, e).unwrap());
            assert!((delta_at_eps(&curve, e) - both).abs() < 1e-12);
        }
    }

    #[test]
    fn eps_delta_closed_form_matches_knots() {
        for (e0, d0) in [(0.3, 0.0), (1.0, 0.05), (2.0, 0.3)] {
            let f = TradeoffCurve::eps_delta(e0, d0).unwrap();
            let k = TradeoffCurve::from_knots(f.working_knots()).unwrap();
            for eps in [0.0, 0.1, 0.5, 1.0, 2.0, 3.0] {
                assert!((delta_at_eps(&f, eps) - delta_at_eps(&k, eps)).abs() < 1e-14);
            }
            assert_eq!(delta_at_eps(&f, e0), d0);
        }
    }
}
