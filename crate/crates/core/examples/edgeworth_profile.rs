use fdp::edgeworth::{edgeworth_compose, LossRVSpec};

fn main() -> fdp::error::Result<()> {
    let spec = LossRVSpec::SubsampledGaussianStep { p: 0.01, sigma: 1.0 };
    let c = spec.cumulants()?;
    println!("one-step cumulants under P: {:?}", c.under_p);
    let eps: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
    for point in edgeworth_compose(&spec, 1_000, &eps)?.points {
        println!("eps {:4.1}  delta ~ {:.3e}", point.eps, point.delta);
    }
    Ok(())
}
