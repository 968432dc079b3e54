use fdp::curve::TradeoffCurve;
use fdp::duality::eps_at_delta;
use fdp::mech::discrete_gaussian_curve;

fn main() -> fdp::error::Result<()> {
    for sigma in [0.5, 1.0, 3.0, 10.0] {
        let d = discrete_gaussian_curve(sigma, 1)?;
        let g = TradeoffCurve::gaussian(1.0 / sigma)?;
        println!(
            "sigma {sigma:>4}: discrete eps {:.6}, continuous eps {:.6}, sup gap {:.2e}",
            eps_at_delta(&d, 1e-6)?,
            eps_at_delta(&g, 1e-6)?,
            d.sup_distance(&g, 10_001)
        );
    }
    Ok(())
}
