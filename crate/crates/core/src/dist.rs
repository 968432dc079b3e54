use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-12;

/// A probability mass function on a finite, ordered set of integer outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    support: Vec<i64>,
    mass: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<i64>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::domain("support and mass lengths differ"));
        }
        if support.is_empty() {
            return Err(Error::domain("empty support"));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::domain("masses must be finite and nonnegative"));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::domain(format!("masses sum to {total}, not 1")));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("support labels must be distinct"));
        }
        Ok(Self { support, mass })
    }

    /// Distribution on `0..mass.len()`.
    pub fn from_masses(mass: Vec<f64>) -> Result<Self> {
        let support = (0..mass.len() as i64).collect();
        Self::new(support, mass)
    }

    /// Normalizes nonnegative weights onto `0..weights.len()`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::domain("weights must have a positive finite sum"));
        }
        Self::from_masses(weights.iter().map(|w| w / total).collect())
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("Bernoulli parameter outside [0, 1]"));
        }
        Self::new(vec![0, 1], vec![1.0 - p, p])
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub(crate) fn check_same_support(&self, other: &Self) -> Result<()> {
        if self.support != other.support {
            return Err(Error::domain("distributions are not on the same support"));
        }
        Ok(())
    }

    /// Pushes the distribution through a row-stochastic kernel.
    pub fn push_forward(&self, kernel: &[Vec<f64>]) -> Result<Self> {
        if kernel.len() != self.len() {
            return Err(Error::domain("kernel row count must match support size"));
        }
        let width = kernel.first().map_or(0, Vec::len);
        let mut out = vec![0.0; width];
        for (row, &m) in kernel.iter().zip(&self.mass) {
            if row.len() != width {
                return Err(Error::domain("ragged kernel"));
            }
            for (o, k) in out.iter_mut().zip(row) {
                *o += m * k;
            }
        }
        let total: f64 = out.iter().sum();
        Self::from_masses(out.into_iter().map(|m| m / total).collect())
    }
}
