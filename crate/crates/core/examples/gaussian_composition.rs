//! Two Gaussian mechanisms composed three ways: closed form, certified FFT
//! bracket and the central-limit approximation.

use fdp::account::{clt_compose, compose_gaussian, compose_tensor};
use fdp::curve::TradeoffCurve;
use fdp::duality::eps_at_delta;

fn main() -> fdp::error::Result<()> {
    let delta = 1e-5;
    let g1 = TradeoffCurve::gaussian(1.0)?;

    let mu = compose_gaussian(&[1.0, 1.0])?;
    let exact = eps_at_delta(&TradeoffCurve::gaussian(mu)?, delta)?;
    println!("closed form: G_{mu:.6}, eps = {exact:.8}");

    let report = compose_tensor(&[g1.clone(), g1.clone()], 1e-4)?;
    let (lo, hi) = report.eps_bounds(delta)?;
    println!("FFT bracket: [{lo:.8}, {hi:.8}]");

    let clt = clt_compose(&[g1.clone(), g1])?;
    println!("CLT: mu = {:.6} (not certified)", clt.diagnostics["mu"]);
    Ok(())
}
