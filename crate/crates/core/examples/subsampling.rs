//! Subsampling amplifies privacy.

use fdp::curve::TradeoffCurve;
use fdp::duality::eps_at_delta;
use fdp::mech::subsampled_curve;

fn main() -> fdp::error::Result<()> {
    let base = TradeoffCurve::gaussian(2.0)?;
    println!("base eps at 1e-5: {:.4}", eps_at_delta(&base, 1e-5)?);
    for rate in [0.5, 0.1, 0.01] {
        let sub = subsampled_curve(&base, rate)?;
        let order = sub.compare(&base, 2001)?;
        let eps = eps_at_delta(&sub, 1e-5)?;
        // near alpha = 0 the subsampled curve inherits the tangent lower bound of the base
        println!("rate {rate:<5} eps {eps:.4}, vs base: {order:?}, base ahead by at most {:.1e}", sub.max_excess(&base, 10_001));
    }
    Ok(())
}
