//! Canonical noise: a real-valued noise whose unit shift realises a curve exactly.

use fdp::cnd::construct_cnd;
use fdp::curve::TradeoffCurve;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fdp::error::Result<()> {
    let target = TradeoffCurve::eps_delta(1.0, 0.0)?;
    let noise = construct_cnd(&target)?;
    let report = noise.verify();
    println!("fixed point {:.6}, worst property violation {:.2e}", noise.fixed_point(), report.worst());
    for x in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        println!("F({x:+.1}) = {:.6}", noise.cdf(x));
    }
    let draws = noise.sample(&mut ChaCha8Rng::seed_from_u64(3), 5);
    println!("samples: {draws:.4?}");
    Ok(())
}
