//! First-order Edgeworth approximation of composed privacy profiles.
//!
//! With `L = log dQ/dP`, write `X` for its law under `P` and `Y` for its law
//! under `Q`. After `m` independent steps the hockey-stick divergence is
//! `P(sum Y > eps) - e^eps P(sum X > eps)`; swapping the pair gives the
//! mirrored divergence through `-Y` and `-X`. Both sums are approximated by
//! a one-term Edgeworth series built from the first three cumulants.

use crate::duality::{EpsDeltaPoint, PrivacyProfile};
use crate::error::{Error, Result};
use crate::normal;
use gauss_quad::GaussHermite;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

const BASE_NODES: usize = 200;
const MAX_NODES: usize = 800;
const CUMULANT_TOL: f64 = 1e-10;

/// Law of the single-step privacy loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossRVSpec {
    /// `N(0, 1)` against `(1 - p) N(0, 1) + p N(1/sigma, 1)`.
    SubsampledGaussianStep { p: f64, sigma: f64 },
    /// `N(0, 1)` against `N(mu, 1)`.
    GaussianStep { mu: f64 },
    /// Finite law of `log dQ/dP` under `P`: values and their probabilities.
    Custom { nodes: Vec<f64>, weights: Vec<f64> },
}

/// First four cumulants of the loss under each hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCumulants {
    pub under_p: [f64; 4],
    pub under_q: [f64; 4],
    pub nodes_used: usize,
}

impl LossRVSpec {
    fn validate(&self) -> Result<()> {
        match self {
            LossRVSpec::SubsampledGaussianStep { p, sigma } => {
                if !(0.0..=1.0).contains(p) || !(*sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::domain("need p in [0, 1] and sigma > 0"));
                }
            }
            LossRVSpec::GaussianStep { mu } => {
                if !(*mu >= 0.0) || !mu.is_finite() {
                    return Err(Error::domain("need a finite mu >= 0"));
                }
            }
            LossRVSpec::Custom { nodes, weights } => {
                if nodes.len() != weights.len() || nodes.is_empty() {
                    return Err(Error::domain("custom loss law needs matching non-empty nodes and weights"));
                }
                if nodes.iter().any(|x| !x.is_finite()) || weights.iter().any(|w| !(*w >= 0.0)) {
                    return Err(Error::domain("custom loss law needs finite nodes and nonnegative weights"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::domain(format!("custom weights sum to {total}")));
                }
            }
        }
        Ok(())
    }

    /// Cumulants of `X` and `Y`, by adaptive Gauss-Hermite quadrature where needed.
    pub fn cumulants(&self) -> Result<LossCumulants> {
        self.validate()?;
        match self {
            LossRVSpec::Custom { nodes, weights } => {
                let q_weights: Vec<f64> = nodes.iter().zip(weights).map(|(l, w)| w * l.exp()).collect();
                let q_total: f64 = q_weights.iter().sum();
                if (q_total - 1.0).abs() > 1e-9 {
                    return Err(Error::domain(format!("implied Q-law has mass {q_total}, not 1")));
                }
                Ok(LossCumulants {
                    under_p: discrete_cumulants(nodes, weights),
                    under_q: discrete_cumulants(nodes, &q_weights),
                    nodes_used: nodes.len(),
                })
            }
            LossRVSpec::GaussianStep { mu } => {
                let v = mu * mu;
                Ok(LossCumulants { under_p: [-0.5 * v, v, 0.0, 0.0], under_q: [0.5 * v, v, 0.0, 0.0], nodes_used: 0 })
            }
            LossRVSpec::SubsampledGaussianStep { p, sigma } => subsampled_cumulants(*p, 1.0 / sigma),
        }
    }
}

fn discrete_cumulants(values: &[f64], weights: &[f64]) -> [f64; 4] {
    let total: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / total;
    let central = |k: i32| values.iter().zip(weights).map(|(x, w)| (x - mean).powi(k) * w).sum::<f64>() / total;
    let (m2, m3, m4) = (central(2), central(3), central(4));
    [mean, m2, m3, m4 - 3.0 * m2 * m2]
}

fn subsampled_cumulants(rate: f64, mu: f64) -> Result<LossCumulants> {
    let loss = move |xi: f64| (1.0 - rate + rate * (mu * xi - 0.5 * mu * mu).exp()).ln();
    let mut nodes = BASE_NODES;
    let mut previous = gauss_hermite_cumulants(nodes, &loss, rate, mu);
    loop {
        let next_nodes = nodes * 2;
        if next_nodes > MAX_NODES {
            let residual = residual(&previous, &gauss_hermite_cumulants(nodes / 2, &loss, rate, mu));
            return Err(Error::accounting(format!(
                "Gauss-Hermite cumulants did not settle by {nodes} nodes (residual {residual:e})"
            )));
        }
        let current = gauss_hermite_cumulants(next_nodes, &loss, rate, mu);
        let change = residual(&previous, &current);
        nodes = next_nodes;
        if change < CUMULANT_TOL {
            return Ok(LossCumulants { under_p: current.0, under_q: current.1, nodes_used: nodes });
        }
        previous = current;
    }
}

fn residual(a: &([f64; 4], [f64; 4]), b: &([f64; 4], [f64; 4])) -> f64 {
    a.0.iter().chain(&a.1).zip(b.0.iter().chain(&b.1)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Cumulants under `N(0, 1)` and under `(1 - rate) N(0, 1) + rate N(mu, 1)`.
fn gauss_hermite_cumulants(nodes: usize, loss: &dyn Fn(f64) -> f64, rate: f64, mu: f64) -> ([f64; 4], [f64; 4]) {
    let rule = GaussHermite::new(NonZeroUsize::new(nodes).expect("positive node count"));
    let scale = std::f64::consts::PI.sqrt().recip();
    let mut values = Vec::with_capacity(2 * nodes);
    let mut p_weights = Vec::with_capacity(2 * nodes);
    let mut q_weights = Vec::with_capacity(2 * nodes);
    for (&x, &w) in rule.nodes().zip(rule.weights()) {
        let xi = std::f64::consts::SQRT_2 * x;
        let w = w * scale;
        // node shared by both laws
        values.push(loss(xi));
        p_weights.push(w);
        q_weights.push((1.0 - rate) * w);
        // node for the shifted component of the alternative
        values.push(loss(xi + mu));
        p_weights.push(0.0);
        q_weights.push(rate * w);
    }
    (discrete_cumulants(&values, &p_weights), discrete_cumulants(&values, &q_weights))
}

/// `P(S > x)` for a sum with cumulants `k`, one Edgeworth term.
fn edgeworth_sf(k: [f64; 4], x: f64) -> f64 {
    if k[1] <= 0.0 {
        return if x < k[0] { 1.0 } else { 0.0 };
    }
    let sd = k[1].sqrt();
    let z = (x - k[0]) / sd;
    let skew = k[2] / (sd * sd * sd);
    normal::sf(z) + normal::pdf(z) * skew / 6.0 * (z * z - 1.0)
}

fn scaled(k: [f64; 4], m: f64) -> [f64; 4] {
    [k[0] * m, k[1] * m, k[2] * m, k[3] * m]
}

fn negated(k: [f64; 4]) -> [f64; 4] {
    [-k[0], k[1], -k[2], k[3]]
}

/// Edgeworth `delta(eps)` after `m` steps, the larger of both orientations.
pub fn edgeworth_delta(cumulants: &LossCumulants, m: u64, eps: f64) -> f64 {
    let m = m as f64;
    let (x, y) = (scaled(cumulants.under_p, m), scaled(cumulants.under_q, m));
    if x[1] <= 0.0 && y[1] <= 0.0 && x[0] == 0.0 {
        return 0.0;
    }
    let forward = edgeworth_sf(y, eps) - eps.exp() * edgeworth_sf(x, eps);
    let mirrored = edgeworth_sf(negated(x), eps) - eps.exp() * edgeworth_sf(negated(y), eps);
    forward.max(mirrored).clamp(0.0, 1.0)
}

/// Edgeworth privacy profile of `m` composed steps over a sorted grid.
pub fn edgeworth_compose(spec: &LossRVSpec, m: u64, eps_grid: &[f64]) -> Result<PrivacyProfile> {
    if m == 0 {
        return Err(Error::domain("number of steps must be positive"));
    }
    if eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("eps grid must be strictly increasing"));
    }
    let cumulants = spec.cumulants()?;
    let points = eps_grid.iter().map(|&eps| EpsDeltaPoint { eps, delta: edgeworth_delta(&cumulants, m, eps) }).collect();
    Ok(PrivacyProfile { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::TradeoffCurve;
    use crate::duality::delta_at_eps;

    #[test]
    fn unsubsampled_steps_are_gaussian() {
        let sigma = 2.0;
        let m = 16;
        let spec = LossRVSpec::SubsampledGaussianStep { p: 1.0, sigma };
        let grid = [0.0, 0.5, 1.0, 2.0, 3.0];
        let profile = edgeworth_compose(&spec, m, &grid).unwrap();
        let g = TradeoffCurve::gaussian((m as f64).sqrt() / sigma).unwrap();
        for pt in profile.points {
            assert!((pt.delta - delta_at_eps(&g, pt.eps)).abs() < 1e-6);
        }
    }

    #[test]
    fn tail_decreases() {
        let spec = LossRVSpec::SubsampledGaussianStep { p: 0.01, sigma: 1.0 };
        let grid: Vec<f64> = (1..40).map(|i| i as f64 * 0.25).collect();
        let profile = edgeworth_compose(&spec, 1, &grid).unwrap();
        assert!(profile.points.windows(2).all(|w| w[1].delta <= w[0].delta));
        assert!(profile.points.last().unwrap().delta < 1e-12);
    }

    #[test]
    fn custom_law_matches_pure_dp() {
        let eps0 = 0.5_f64;
        let lo = 1.0 / (1.0 + eps0.exp());
        let spec = LossRVSpec::Custom { nodes: vec![-eps0, eps0], weights: vec![1.0 - lo, lo] };
        let c = spec.cumulants().unwrap();
        assert!((c.under_p[0] + c.under_q[0]).abs() < 1e-15);
        assert!((c.under_p[1] - c.under_q[1]).abs() < 1e-15);
    }

    #[test]
    fn gauss_hermite_recovers_gaussian_loss() {
        let c = subsampled_cumulants(1.0, 0.5).unwrap();
        assert!((c.under_p[0] + 0.125).abs() < 1e-12);
        assert!((c.under_p[1] - 0.25).abs() < 1e-12);
        assert!(c.under_p[2].abs() < 1e-12);
    }
}
