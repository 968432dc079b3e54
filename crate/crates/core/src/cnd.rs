//! Canonical noise distributions.
//!
//! For a symmetric nontrivial curve `f` with fixed point `c = f(c)`, the CDF
//! is linear from `c` to `1 - c` on `[-1/2, 1/2]` and extended one unit at a
//! time by `F(x) = f(1 - F(x + 1))` to the left, with `F(x) = 1 - F(-x)` to
//! the right. Shift testing `Z` against `Z + 1` then rejects on large
//! observations and traces `alpha -> F(F^-1(1 - alpha) - 1)`, which the
//! recursion makes equal to `f`.

use crate::curve::{knots_from_atoms, TradeoffCurve};
use crate::error::{Error, Result};
use rand::distributions::Open01;
use rand::Rng;

/// Tolerance for the three defining properties.
pub const VERIFY_TOL: f64 = 1e-6;
const MAX_STEPS: usize = 100_000;
const GRID: usize = 1001;
/// Cells per unit when testing shifts by partitioning the line.
const CELLS_PER_UNIT: usize = 4000;
const TAIL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    target: TradeoffCurve,
    fixed_point: f64,
}

/// Worst violation of each defining property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CndReport {
    /// `max over shifts and alpha of f(alpha) - T(Z, Z + shift)(alpha)`, and
    /// the distance to `f` at shift 1.
    pub shift_dominance: f64,
    pub unit_shift_equality: f64,
    /// `max |F(F^-1(1 - alpha) - 1) - f(alpha)|`.
    pub self_consistency: f64,
    /// `max |F(x) - (1 - F(-x))|`.
    pub symmetry: f64,
}

impl CndReport {
    pub fn worst(&self) -> f64 {
        self.shift_dominance.max(self.unit_shift_equality).max(self.self_consistency).max(self.symmetry)
    }
}

/// Builds and validates the canonical noise distribution of `target`.
pub fn construct_cnd(target: &TradeoffCurve) -> Result<NoiseDistribution> {
    if !target.is_symmetric() {
        return Err(Error::domain("canonical noise needs a symmetric curve"));
    }
    let fixed_point = fixed_point(target);
    if fixed_point >= 0.5 - 1e-12 {
        return Err(Error::domain("canonical noise needs a nontrivial curve"));
    }
    let dist = NoiseDistribution { target: target.clone(), fixed_point };
    let report = dist.verify();
    if report.worst() > VERIFY_TOL {
        return Err(Error::Construction {
            message: format!("canonical noise failed validation: {report:?}"),
            worst_violation: report.worst(),
        });
    }
    Ok(dist)
}

/// Solves `f(c) = c` by bisection on `[0, 1/2]`.
fn fixed_point(f: &TradeoffCurve) -> f64 {
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f.value(mid) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

impl NoiseDistribution {
    pub fn target(&self) -> &TradeoffCurve {
        &self.target
    }

    pub fn fixed_point(&self) -> f64 {
        self.fixed_point
    }

    fn central(&self, x: f64) -> f64 {
        let c = self.fixed_point;
        c + (1.0 - 2.0 * c) * (x + 0.5)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x > 0.0 {
            return 1.0 - self.cdf(-x);
        }
        if x >= -0.5 {
            return self.central(x);
        }
        let steps = (-0.5 - x).ceil();
        let mut value = self.central(x + steps);
        for _ in 0..(steps as usize).min(MAX_STEPS) {
            value = self.target.value_at_complement(value);
            if value <= 0.0 {
                return 0.0;
            }
        }
        value
    }

    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if u >= 1.0 {
            return f64::INFINITY;
        }
        if u > 0.5 {
            return -self.quantile(1.0 - u);
        }
        let c = self.fixed_point;
        let mut u = u;
        let mut steps = 0usize;
        while u < c && steps < MAX_STEPS {
            u = self.target.complement(u);
            steps += 1;
        }
        (u - c) / (1.0 - 2.0 * c) - 0.5 - steps as f64
    }

    /// `n` independent draws by the quantile transform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.sample::<f64, _>(Open01))).collect()
    }

    /// Trade-off curve of `Z` against `Z + shift`, from a fine partition of
    /// the line. Grouping outcomes into cells is a post-processing, so the
    /// result sits at or slightly above the exact curve.
    pub fn shift_curve(&self, shift: f64) -> TradeoffCurve {
        let lo = self.quantile(TAIL).floor() - 1.0;
        let hi = self.quantile(1.0 - TAIL).ceil() + 1.0 + shift.ceil();
        let cells = ((hi - lo) * CELLS_PER_UNIT as f64) as usize;
        let h = (hi - lo) / cells as f64;
        let edges: Vec<f64> = (0..=cells).map(|i| lo + i as f64 * h).collect();
        let cdf_p: Vec<f64> = edges.iter().map(|&x| self.cdf(x)).collect();
        let cdf_q: Vec<f64> = edges.iter().map(|&x| self.cdf(x - shift)).collect();
        let mut atoms = Vec::with_capacity(cells + 2);
        atoms.push((cdf_p[0], cdf_q[0]));
        for i in 0..cells {
            atoms.push(((cdf_p[i + 1] - cdf_p[i]).max(0.0), (cdf_q[i + 1] - cdf_q[i]).max(0.0)));
        }
        atoms.push((1.0 - cdf_p[cells], 1.0 - cdf_q[cells]));
        atoms.retain(|&(p, q)| p > 0.0 || q > 0.0);
        TradeoffCurve::from_knots_trusted(knots_from_atoms(atoms), None)
    }

    /// Checks the three defining properties on grids.
    pub fn verify(&self) -> CndReport {
        let alphas: Vec<f64> = (0..GRID).map(|i| i as f64 / (GRID - 1) as f64).collect();
        let mut dominance: f64 = 0.0;
        let mut equality: f64 = 0.0;
        for step in 1..=10 {
            let shift = step as f64 / 10.0;
            let curve = self.shift_curve(shift);
            for &a in &alphas {
                let gap = self.target.value(a) - curve.value(a);
                dominance = dominance.max(gap);
                if step == 10 {
                    equality = equality.max(gap.abs());
                }
            }
        }
        let consistency = alphas[1..GRID - 1]
            .iter()
            .map(|&a| (self.cdf(self.quantile(1.0 - a) - 1.0) - self.target.value(a)).abs())
            .fold(0.0, f64::max);
        let symmetry = (0..=400)
            .map(|i| -10.0 + i as f64 * 0.05)
            .map(|x| (self.cdf(x) - (1.0 - self.cdf(-x))).abs())
            .fold(0.0, f64::max);
        CndReport { shift_dominance: dominance, unit_shift_equality: equality, self_consistency: consistency, symmetry }
    }
}
