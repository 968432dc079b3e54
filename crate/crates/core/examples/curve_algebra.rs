//! Inversion, symmetrization, conjugates and summary divergences of a curve.

use fdp::curve::{from_distribution_pair, SymmetrizeMode};
use fdp::dist::DiscreteDistribution;

fn main() -> fdp::error::Result<()> {
    let p = DiscreteDistribution::from_weights(&[0.6, 0.3, 0.1])?;
    let q = DiscreteDistribution::from_weights(&[0.2, 0.3, 0.5])?;
    let f = from_distribution_pair(&p, &q)?;
    println!("symmetric: {}", f.is_symmetric());
    let sym = f.symmetrize(SymmetrizeMode::MinBiconjugate);
    println!("after min{{f, f^-1}}**: symmetric {}", sym.is_symmetric());
    println!("inverse vs curve: {:?}", f.invert().compare(&f, 2001)?);
    let conj = f.conjugate();
    println!("conjugate breakpoints: {:?}", conj.breakpoints());
    println!("max divergence {:.4}, TV {:.4}, Renyi(2) {:.4}", f.max_divergence(), f.total_variation(), f.renyi(2.0)?);
    Ok(())
}
