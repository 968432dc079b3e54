//! Independent checks: brute-force Neyman-Pearson curves, Monte Carlo
//! trade-off estimates with error bands, and the search for a pair of
//! experiments that Rényi divergences order the wrong way.

use crate::curve::{from_distribution_pair, TradeoffCurve};
use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest support handled by [`exact_tradeoff_discrete`].
pub const MAX_ATOMS: usize = 1_000_000;
const RATIO_TOL: f64 = 1e-10;
/// Band half-width in standard errors.
pub const BAND_SE: f64 = 3.0;
const MIN_SAMPLES: usize = 1000;

/// Most powerful tests between two finite distributions, enumerated
/// threshold by threshold.
///
/// Every distinct likelihood ratio `t` gives two deterministic tests
/// (reject `P` when `P/Q < t`, or when `P/Q <= t`); randomizing between
/// them traces the segment joining their error pairs.
pub fn exact_tradeoff_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<TradeoffCurve> {
    if p.len() > MAX_ATOMS {
        return Err(Error::Resource(format!("support of {} atoms exceeds {MAX_ATOMS}", p.len())));
    }
    if p.support() != q.support() {
        return Err(Error::domain("distributions must share a support"));
    }
    let mut outcomes: Vec<(f64, f64, f64)> = p
        .mass()
        .iter()
        .zip(q.mass())
        .filter(|(&a, &b)| a > 0.0 || b > 0.0)
        .map(|(&a, &b)| (if b == 0.0 { f64::INFINITY } else { a / b }, a, b))
        .collect();
    outcomes.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < outcomes.len() {
        // ratios equal in exact arithmetic may differ in the last bits
        let ratio = outcomes[i].0;
        let (mut gp, mut gq) = (0.0, 0.0);
        while i < outcomes.len() && (outcomes[i].0 == ratio || outcomes[i].0 <= ratio * (1.0 + RATIO_TOL)) {
            gp += outcomes[i].1;
            gq += outcomes[i].2;
            i += 1;
        }
        groups.push((gp, gq));
    }
    // alpha from prefix sums, beta from suffix sums, so both small ends stay accurate
    let mut betas = vec![0.0; groups.len() + 1];
    for k in (0..groups.len()).rev() {
        betas[k] = betas[k + 1] + groups[k].1;
    }
    let mut knots = Vec::with_capacity(groups.len() + 1);
    let mut alpha = 0.0;
    knots.push((0.0, betas[0]));
    for (k, g) in groups.iter().enumerate() {
        alpha += g.0;
        knots.push((alpha, betas[k + 1]));
    }
    // sorted ratios make the knots convex; cancellation near alpha = 1 can
    // defeat a numerical check, so they are not re-validated
    Ok(TradeoffCurve::from_knots_trusted(knots, None))
}

/// Monte Carlo estimate of a trade-off curve on an alpha grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCurve {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub n: usize,
    /// Set when the estimate is degenerate, for instance constant losses.
    pub warning: Option<String>,
}

impl EmpiricalCurve {
    /// Number of grid points whose band contains `curve`.
    pub fn covered_by_band(&self, curve: &TradeoffCurve) -> usize {
        self.alphas
            .iter()
            .zip(&self.betas)
            .zip(&self.half_widths)
            .filter(|((&a, &b), &h)| (curve.value(a) - b).abs() <= h)
            .count()
    }
}

/// Estimates `T(P, Q)` by thresholding the log-likelihood ratio `loss`
/// (`log dP/dQ`) of `n` draws from each sampler.
///
/// The two samplers use independent ChaCha streams derived from `seed`.
/// At level `alpha` the test rejects `P` below the empirical
/// `alpha`-quantile of the loss under `P`, randomizing on ties. The band
/// is `BAND_SE` standard errors, with the variance of the estimated
/// threshold propagated through the slope `-e^{-t}` at threshold `t`.
pub fn mc_tradeoff<T, SP, SQ, L>(
    mut sample_p: SP,
    mut sample_q: SQ,
    loss: L,
    n: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<EmpiricalCurve>
where
    SP: FnMut(&mut ChaCha8Rng) -> T,
    SQ: FnMut(&mut ChaCha8Rng) -> T,
    L: Fn(&T) -> f64,
{
    if n < MIN_SAMPLES {
        return Err(Error::domain(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::domain("alpha grid must lie in [0, 1]"));
    }
    let mut rng_p = ChaCha8Rng::seed_from_u64(seed);
    let mut rng_q = ChaCha8Rng::seed_from_u64(seed);
    rng_q.set_stream(1);
    let mut lp: Vec<f64> = (0..n).map(|_| loss(&sample_p(&mut rng_p))).collect();
    let mut lq: Vec<f64> = (0..n).map(|_| loss(&sample_q(&mut rng_q))).collect();
    lp.sort_by(f64::total_cmp);
    lq.sort_by(f64::total_cmp);
    let nf = n as f64;
    let degenerate = lp.first() == lp.last() && lq.first() == lq.last() && lp.first() == lq.first();
    let mut betas = Vec::with_capacity(alphas.len());
    let mut half_widths = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let beta = if degenerate { 1.0 - alpha } else { empirical_beta(&lp, &lq, alpha) };
        let threshold = lp[((alpha * nf) as usize).min(n - 1)];
        let slope = if threshold.is_finite() { (-threshold).exp().min(1e6) } else { 0.0 };
        let variance = beta * (1.0 - beta) / nf + slope * slope * alpha * (1.0 - alpha) / nf;
        betas.push(beta);
        half_widths.push(BAND_SE * variance.sqrt());
    }
    let warning = degenerate.then(|| "all losses are equal; returning the identity estimate".to_string());
    Ok(EmpiricalCurve { alphas: alphas.to_vec(), betas, half_widths, n, warning })
}

/// `beta` of the randomized threshold test with empirical size `alpha`.
fn empirical_beta(lp: &[f64], lq: &[f64], alpha: f64) -> f64 {
    let n = lp.len() as f64;
    if alpha <= 0.0 {
        return 1.0;
    }
    if alpha >= 1.0 {
        return 0.0;
    }
    let k = ((alpha * n).ceil() as usize).clamp(1, lp.len());
    let t = lp[k - 1];
    let below_p = lp.partition_point(|&x| x < t) as f64;
    let at_p = lp.partition_point(|&x| x <= t) as f64 - below_p;
    // probability of rejecting on a tie so that the size is exactly alpha
    let gamma = ((alpha * n - below_p) / at_p).clamp(0.0, 1.0);
    let below_q = lq.partition_point(|&x| x < t) as f64;
    let at_q = lq.partition_point(|&x| x <= t) as f64 - below_q;
    let m = lq.len() as f64;
    1.0 - (below_q + gamma * at_q) / m
}

/// A shift of a Gaussian that beats a Bernoulli pair in every Rényi order
/// of the grid while being closer in total variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenyiWitness {
    pub eps: f64,
    /// `(gamma, D_gamma(Gaussian) - D_gamma(Bernoulli))`, all nonnegative.
    pub renyi_margins: Vec<(f64, f64)>,
    /// `TV(Bernoulli) - TV(Gaussian)`, positive.
    pub tv_margin: f64,
}

/// Bernoulli pair taking value 1 with probabilities `e^eps / (1 + e^eps)` and `1 / (1 + e^eps)`.
pub fn bernoulli_pair_curve(eps: f64) -> Result<TradeoffCurve> {
    let high = 1.0 / (1.0 + (-eps).exp());
    from_distribution_pair(&DiscreteDistribution::bernoulli(high)?, &DiscreteDistribution::bernoulli(1.0 - high)?)
}

/// First `eps` where `N(0,1)` vs `N(eps,1)` dominates the Bernoulli pair in
/// every Rényi order on `gamma_grid` yet is closer in total variation.
pub fn renyi_counterexample_search(eps_grid: &[f64], gamma_grid: &[f64]) -> Result<RenyiWitness> {
    if eps_grid.is_empty() {
        return Err(Error::domain("empty eps grid"));
    }
    if gamma_grid.iter().any(|&g| !(g > 1.0)) {
        return Err(Error::domain("Rényi orders must exceed 1"));
    }
    for &eps in eps_grid {
        let gaussian = TradeoffCurve::gaussian(eps)?;
        let bernoulli = bernoulli_pair_curve(eps)?;
        let mut renyi_margins = Vec::with_capacity(gamma_grid.len());
        for &g in gamma_grid {
            renyi_margins.push((g, gaussian.renyi(g)? - bernoulli.renyi(g)?));
        }
        let tv_margin = bernoulli.total_variation() - gaussian.total_variation();
        if tv_margin > 0.0 && renyi_margins.iter().all(|m| m.1 >= 0.0) {
            return Ok(RenyiWitness { eps, renyi_margins, tv_margin });
        }
    }
    Err(Error::SearchExhausted(format!(
        "no witness among {} values of eps; widen the grids",
        eps_grid.len()
    )))
}
