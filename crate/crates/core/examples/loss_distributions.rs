//! Rounding a curve onto a loss lattice, both ways, and composing.

use fdp::curve::TradeoffCurve;
use fdp::duality::pld_eps_at_delta;
use fdp::pld::{curve_to_pld, Rounding};

fn main() -> fdp::error::Result<()> {
    let f = TradeoffCurve::gaussian(0.5)?;
    for cell in [1e-2, 1e-3, 1e-4] {
        let pess = curve_to_pld(&f, cell, Rounding::Pessimistic)?.self_convolve(16)?;
        let opt = curve_to_pld(&f, cell, Rounding::Optimistic)?.self_convolve(16)?;
        println!(
            "cell {cell:.0e}: eps in [{:.6}, {:.6}], {} lattice points, round-off {:.1e}",
            pld_eps_at_delta(&opt, 1e-5)?,
            pld_eps_at_delta(&pess, 1e-5)?,
            pess.losses().len(),
            pess.mass_error()
        );
    }
    Ok(())
}
