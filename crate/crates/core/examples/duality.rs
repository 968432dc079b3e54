//! Moving between trade-off curves and (eps, delta) guarantees.

use fdp::curve::TradeoffCurve;
use fdp::duality::{delta_at_eps, eps_at_delta, privacy_profile};

fn main() -> fdp::error::Result<()> {
    let g = TradeoffCurve::gaussian(1.0)?;
    let grid: Vec<f64> = (0..=8).map(|i| i as f64 * 0.5).collect();
    for point in privacy_profile(&g, &grid)?.points {
        println!("eps {:4.1}  delta {:.3e}", point.eps, point.delta);
    }
    let eps = eps_at_delta(&g, 1e-5)?;
    println!("G_1 at delta 1e-5: eps = {eps:.6}, back to delta {:.3e}", delta_at_eps(&g, eps));

    // an (eps, delta) curve gives back exactly its own delta
    let f = TradeoffCurve::eps_delta(1.0, 1e-3)?;
    assert_eq!(delta_at_eps(&f, 1.0), 1e-3);
    Ok(())
}
