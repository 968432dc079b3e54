//! Writes an SVG of a few curves next to the identity diagonal.

use fdp::cli::plot_svg;
use fdp::curve::TradeoffCurve;

fn main() -> fdp::error::Result<()> {
    let curves = vec![
        ("G_1".to_string(), TradeoffCurve::gaussian(1.0)?),
        ("f_(1,0)".to_string(), TradeoffCurve::eps_delta(1.0, 0.0)?),
        ("f_(0.5,0.05)".to_string(), TradeoffCurve::eps_delta(0.5, 0.05)?),
    ];
    let path = std::env::temp_dir().join("tradeoff_curves.svg");
    std::fs::write(&path, plot_svg(&curves, 10_000))?;
    println!("wrote {}", path.display());
    Ok(())
}
