//! Composing pure DP guarantees gives more than the sum of the epsilons.

use fdp::account::compose_tensor;
use fdp::curve::TradeoffCurve;
use fdp::duality::delta_at_eps;

fn main() -> fdp::error::Result<()> {
    let parts = [TradeoffCurve::eps_delta(0.5, 0.0)?, TradeoffCurve::eps_delta(0.7, 0.0)?];
    let report = compose_tensor(&parts, 1e-4)?;
    let summed = TradeoffCurve::eps_delta(1.2, 0.0)?;
    println!("lower bracket vs f_(1.2,0): {:?}", report.lower.compare(&summed, 2001)?);
    for eps in [0.4, 0.8, 1.0] {
        println!("eps {eps}: delta <= {:.6}", delta_at_eps(&report.lower, eps));
    }
    Ok(())
}
