//! Bound for a mechanism that picks one of several components at random.

use fdp::duality::eps_at_delta;
use fdp::mech::{MechanismSpec, MixtureComponent};

fn main() -> fdp::error::Result<()> {
    let spec = MechanismSpec::Mixture {
        components: vec![
            MixtureComponent::Mechanism(MechanismSpec::Gaussian { sensitivity: 1.0, sigma: 1.0 }),
            MixtureComponent::Mechanism(MechanismSpec::PureDp { eps: 2.0 }),
            MixtureComponent::Pair { support: vec![0, 1], p: vec![0.8, 0.2], q: vec![0.2, 0.8] },
        ],
        weights: vec![0.6, 0.1, 0.3],
    };
    println!("{}", serde_json::to_string_pretty(&spec).expect("spec serializes"));
    let curve = spec.curve()?;
    println!("eps at 1e-5: {:.6}, symmetric: {}", eps_at_delta(&curve, 1e-5)?, curve.is_symmetric());
    Ok(())
}
