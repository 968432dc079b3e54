//! Exact trade-off curve of two finite laws, and a Monte Carlo estimate of G_1.

use fdp::curve::TradeoffCurve;
use fdp::dist::DiscreteDistribution;
use fdp::oracle::{exact_tradeoff_discrete, mc_tradeoff};
use rand_distr::{Distribution, StandardNormal};

fn main() -> fdp::error::Result<()> {
    let p = DiscreteDistribution::from_weights(&[4.0, 3.0, 2.0, 1.0])?;
    let q = DiscreteDistribution::from_weights(&[1.0, 2.0, 3.0, 4.0])?;
    let exact = exact_tradeoff_discrete(&p, &q)?;
    println!("exact knots: {:?}", exact.exact_knots().unwrap_or_default());

    let alphas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let est = mc_tradeoff(
        |r| Distribution::<f64>::sample(&StandardNormal, r),
        |r| 1.0 + Distribution::<f64>::sample(&StandardNormal, r),
        |&x: &f64| 0.5 - x,
        200_000,
        &alphas,
        42,
    )?;
    let g = TradeoffCurve::gaussian(1.0)?;
    for i in 0..alphas.len() {
        println!("alpha {:.1}: {:.4} +- {:.4} (exact {:.4})", est.alphas[i], est.betas[i], est.half_widths[i], g.value(est.alphas[i]));
    }
    println!("covered {}/{}", est.covered_by_band(&g), alphas.len());
    Ok(())
}
