//! Mechanism catalog: from mechanism descriptions to trade-off curves.

use crate::curve::{from_distribution_pair, lower_hull, TradeoffCurve};
use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const WEIGHT_TOL: f64 = 1e-12;
/// Upper bound on the discrete Gaussian mass discarded by truncation.
pub const TRUNCATION_BUDGET: f64 = 1e-20;

/// Description of a mechanism, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MechanismSpec {
    Gaussian { sensitivity: f64, sigma: f64 },
    PureDp { eps: f64 },
    DiscreteGaussian { sigma: f64, shift: i64 },
    Subsampled { base: Box<MechanismSpec>, p: f64 },
    Mixture { components: Vec<MixtureComponent>, weights: Vec<f64> },
}

/// A mixture component: another mechanism, or an explicit pair of mass functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MixtureComponent {
    Pair { support: Vec<i64>, p: Vec<f64>, q: Vec<f64> },
    Mechanism(MechanismSpec),
}

impl MechanismSpec {
    /// The trade-off curve this mechanism guarantees.
    pub fn curve(&self) -> Result<TradeoffCurve> {
        match self {
            MechanismSpec::Gaussian { sensitivity, sigma } => gaussian_mechanism(*sensitivity, *sigma),
            MechanismSpec::PureDp { eps } => pure_dp_mechanism(*eps),
            MechanismSpec::DiscreteGaussian { sigma, shift } => discrete_gaussian_curve(*sigma, *shift),
            MechanismSpec::Subsampled { base, p } => subsampled_curve(&base.curve()?, *p),
            MechanismSpec::Mixture { components, weights } => {
                let atoms = components.iter().map(MixtureComponent::atoms).collect::<Result<Vec<_>>>()?;
                mixture_from_atoms(atoms, weights)
            }
        }
    }
}

impl MixtureComponent {
    fn atoms(&self) -> Result<Vec<(f64, f64)>> {
        match self {
            MixtureComponent::Pair { support, p, q } => {
                let p = DiscreteDistribution::new(support.clone(), p.clone())?;
                let q = DiscreteDistribution::new(support.clone(), q.clone())?;
                Ok(pair_atoms(&p, &q))
            }
            MixtureComponent::Mechanism(spec) => Ok(curve_atoms(&spec.curve()?)),
        }
    }
}

/// `G_{sensitivity / sigma}`.
pub fn gaussian_mechanism(sensitivity: f64, sigma: f64) -> Result<TradeoffCurve> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(sensitivity >= 0.0) || !sensitivity.is_finite() {
        return Err(Error::domain(format!("sensitivity must be nonnegative, got {sensitivity}")));
    }
    TradeoffCurve::gaussian(sensitivity / sigma)
}

/// `f_{eps, 0}`.
pub fn pure_dp_mechanism(eps: f64) -> Result<TradeoffCurve> {
    TradeoffCurve::eps_delta(eps, 0.0)
}

/// Half-width of the truncated discrete Gaussian support.
pub fn discrete_gaussian_radius(sigma: f64, shift: i64) -> i64 {
    (10.0 * sigma + 10.0 + shift as f64).ceil() as i64
}

/// Discrete Gaussian mass function centred at `center` on `-radius..=radius`,
/// normalized by direct summation.
pub fn discrete_gaussian_pmf(sigma: f64, center: i64, radius: i64) -> Result<DiscreteDistribution> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    let support: Vec<i64> = (-radius..=radius).collect();
    let weights: Vec<f64> = support
        .iter()
        .map(|&x| {
            let d = (x - center) as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    DiscreteDistribution::from_weights(&weights).map(|d| DiscreteDistribution::new(support, d.mass().to_vec()))?
}

/// Relative mass of the discrete Gaussian beyond `radius` (both sides bounded
/// by a geometric series from the first omitted term).
pub fn discrete_gaussian_discarded(sigma: f64, center: i64, radius: i64) -> f64 {
    let s2 = 2.0 * sigma * sigma;
    let gap = (radius - center.abs() + 1) as f64;
    let first = (-gap * gap / s2).exp();
    let ratio = (-(2.0 * gap + 1.0) / s2).exp();
    // the normalizer is at least the mass at the centre, which is 1
    2.0 * first / (1.0 - ratio)
}

/// Exact trade-off between `N_Z(0, sigma^2)` and `N_Z(shift, sigma^2)`.
pub fn discrete_gaussian_curve(sigma: f64, shift: i64) -> Result<TradeoffCurve> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if shift < 1 {
        return Err(Error::domain(format!("shift must be a positive integer, got {shift}")));
    }
    let radius = discrete_gaussian_radius(sigma, shift);
    let discarded = discrete_gaussian_discarded(sigma, shift, radius);
    if discarded >= TRUNCATION_BUDGET {
        return Err(Error::accounting(format!("discrete Gaussian truncation lost {discarded:e}")));
    }
    let p = discrete_gaussian_pmf(sigma, 0, radius)?;
    let q = discrete_gaussian_pmf(sigma, shift, radius)?;
    from_distribution_pair(&p, &q)
}

/// One-step subsampling operator `p * base + (1 - p) * Id`.
pub fn subsampled_curve(base: &TradeoffCurve, p: f64) -> Result<TradeoffCurve> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("sampling rate must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(TradeoffCurve::identity());
    }
    if p == 1.0 {
        return Ok(base.clone());
    }
    let knots = base
        .working_knots()
        .into_iter()
        .map(|(a, b)| (a, p * b + (1.0 - p) * (1.0 - a)))
        .collect();
    Ok(TradeoffCurve::from_knots_trusted(knots, None))
}

/// Lower bound on the trade-off of a mixture `(sum w_i P_i, sum w_i Q_i)`.
///
/// Every component is tested with the same likelihood-ratio threshold `r`
/// (randomizing with probability `c` at the threshold), which yields points
/// `(alpha(r, c), sum_i w_i T_i(alpha_i(r, c)))` on or below the mixture
/// curve. The returned curve is the lower convex envelope of these points.
pub fn mixture_bound(components: &[(DiscreteDistribution, DiscreteDistribution)], weights: &[f64]) -> Result<TradeoffCurve> {
    if components.len() != weights.len() {
        return Err(Error::domain("one weight per component is required"));
    }
    let atoms = components
        .iter()
        .map(|(p, q)| {
            p.check_same_support(q)?;
            Ok(pair_atoms(p, q))
        })
        .collect::<Result<Vec<_>>>()?;
    mixture_from_atoms(atoms, weights)
}

/// Bound for components given by trade-off curves.
pub fn mixture_bound_curves(curves: &[TradeoffCurve], weights: &[f64]) -> Result<TradeoffCurve> {
    if curves.len() != weights.len() {
        return Err(Error::domain("one weight per component is required"));
    }
    mixture_from_atoms(curves.iter().map(curve_atoms).collect(), weights)
}

fn pair_atoms(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Vec<(f64, f64)> {
    p.mass().iter().zip(q.mass()).map(|(&a, &b)| (a, b)).filter(|&(a, b)| a > 0.0 || b > 0.0).collect()
}

/// Atoms of the canonical pair realizing a curve: one per linear piece.
fn curve_atoms(curve: &TradeoffCurve) -> Vec<(f64, f64)> {
    let knots = curve.working_knots();
    let mut atoms = vec![(0.0, 1.0 - knots[0].1)];
    atoms.extend(knots.windows(2).map(|w| (w[1].0 - w[0].0, (w[0].1 - w[1].1).max(0.0))));
    atoms.retain(|&(a, b)| a > 0.0 || b > 0.0);
    atoms
}

/// Sweep over shared thresholds of `dQ/dP`, from large to small.
fn mixture_from_atoms(mut components: Vec<Vec<(f64, f64)>>, weights: &[f64]) -> Result<TradeoffCurve> {
    if components.is_empty() {
        return Err(Error::domain("a mixture needs at least one component"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::domain("weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::domain(format!("weights sum to {total}, not 1")));
    }
    let ratio = |&(p, q): &(f64, f64)| if p == 0.0 { f64::INFINITY } else { q / p };
    let mut thresholds: Vec<f64> = Vec::new();
    for atoms in &mut components {
        atoms.sort_by(|a, b| ratio(b).total_cmp(&ratio(a)));
        thresholds.extend(atoms.iter().map(ratio));
    }
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    // Per component: P-mass and Q-mass strictly above the current threshold.
    let mut cursor = vec![0usize; components.len()];
    let mut above: Vec<(f64, f64)> = vec![(0.0, 0.0); components.len()];
    let start = weights.iter().zip(&components).map(|(w, atoms)| {
        let q_only: f64 = atoms.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum();
        w * (1.0 - q_only)
    });
    let mut points = vec![(0.0, 1.0), (0.0, start.sum::<f64>())];
    for &r in &thresholds {
        let mut at: Vec<(f64, f64)> = vec![(0.0, 0.0); components.len()];
        for (i, atoms) in components.iter().enumerate() {
            while cursor[i] < atoms.len() && ratio(&atoms[cursor[i]]) == r {
                at[i].0 += atoms[cursor[i]].0;
                at[i].1 += atoms[cursor[i]].1;
                cursor[i] += 1;
            }
        }
        for c in [0.0, 0.5, 1.0] {
            let (mut alpha, mut beta) = (0.0, 0.0);
            for i in 0..components.len() {
                alpha += weights[i] * (above[i].0 + c * at[i].0);
                beta += weights[i] * (1.0 - above[i].1 - c * at[i].1);
            }
            points.push((alpha, beta));
        }
        for i in 0..components.len() {
            above[i].0 += at[i].0;
            above[i].1 += at[i].1;
        }
    }
    points.push((1.0, 0.0));
    let mut points: Vec<(f64, f64)> = points.into_iter().map(|(a, b)| (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0))).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup_by(|b, a| b.0 == a.0);
    Ok(TradeoffCurve::from_knots_trusted(lower_hull(&points), None))
}

/// Curve of the disjoint union of the components, used as a cross-check.
#[cfg(test)]
pub(crate) fn disjoint_union_curve(components: &[Vec<(f64, f64)>], weights: &[f64]) -> TradeoffCurve {
    let atoms = components
        .iter()
        .zip(weights)
        .flat_map(|(atoms, &w)| atoms.iter().map(move |&(p, q)| (w * p, w * q)))
        .filter(|&(p, q)| p > 0.0 || q > 0.0)
        .collect();
    TradeoffCurve::from_knots_trusted(crate::curve::knots_from_atoms(atoms), None)
}
