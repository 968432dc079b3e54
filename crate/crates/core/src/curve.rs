//! Trade-off functions and their algebra.
//!
//! A trade-off curve maps a type I error level `alpha` to the smallest type II
//! error any test can achieve. Every curve is convex, continuous,
//! non-increasing, and lies below the identity curve `1 - alpha`.
//!
//! Piecewise-linear curves are stored as knots `(alpha, beta)` with strictly
//! increasing `alpha` running from 0 to 1. A value `beta < 1` at `alpha = 0`
//! encodes a vertical drop (singular mass under the alternative), and a run of
//! zeros ending at `alpha = 1` encodes singular mass under the null.

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::normal;

/// Number of knots used when an analytic curve has to be discretized.
pub const DEFAULT_GRID: usize = 10_000;

/// Smallest distance between the first interior knot and the axes.
pub const SMALLEST_CELL: f64 = 1e-12;

const VALIDATION_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const COMPARE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// `G_mu(alpha) = Phi(Phi^-1(1 - alpha) - mu)`.
    Gaussian { mu: f64 },
    /// `max{0, 1 - delta - e^eps alpha, e^-eps (1 - delta - alpha)}`.
    EpsDelta { eps: f64, delta: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    kind: CurveKind,
    symmetric: bool,
}

/// Outcome of comparing two curves in the dominance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceOrder {
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizeMode {
    /// Pointwise `max{f, f^-1}`.
    Max,
    /// Convex envelope of pointwise `min{f, f^-1}`.
    MinBiconjugate,
}

/// How an analytic curve is turned into knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    /// Knots on the curve; chords lie above it.
    Chord,
    /// Knots at intersections of tangent lines; the polyline lies below the curve.
    Tangent,
}

/// Default alpha grid: geometric towards both axes, mirrored about 1/2.
pub fn alpha_grid(n: usize) -> Vec<f64> {
    let n = n.max(4);
    let half = (n - 2) / 2;
    let ratio = (0.5 / SMALLEST_CELL).ln() / (half.max(2) - 1) as f64;
    let lower: Vec<f64> = (0..half)
        .map(|i| SMALLEST_CELL * (ratio * i as f64).exp())
        .map(|a| a.min(0.5))
        .collect();
    let mut grid = Vec::with_capacity(2 * half + 2);
    grid.push(0.0);
    grid.extend(lower.iter().copied());
    grid.extend(lower.iter().rev().map(|a| 1.0 - a));
    grid.push(1.0);
    grid.dedup();
    grid
}

impl TradeoffCurve {
    /// Gaussian trade-off curve `G_mu`.
    pub fn gaussian(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::domain(format!("gaussian mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self { kind: CurveKind::Gaussian { mu }, symmetric: true })
    }

    /// The three-piece curve `f_{eps, delta}`. `eps = +inf` yields the zero curve.
    pub fn eps_delta(eps: f64, delta: f64) -> Result<Self> {
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::domain(format!("eps must be >= 0, got {eps}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::domain(format!("delta must lie in [0, 1], got {delta}")));
        }
        Ok(Self { kind: CurveKind::EpsDelta { eps, delta }, symmetric: true })
    }

    /// Perfect privacy, `Id(alpha) = 1 - alpha`.
    pub fn identity() -> Self {
        Self { kind: CurveKind::Gaussian { mu: 0.0 }, symmetric: true }
    }

    /// Perfect distinguishability, `f = 0`.
    pub fn zero() -> Self {
        Self::from_knots_trusted(vec![(0.0, 0.0), (1.0, 0.0)], Some(true))
    }

    /// Validated piecewise-linear curve.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        let knots = validate_knots(knots)?;
        Ok(Self::from_knots_trusted(knots, None))
    }

    /// Builds a piecewise-linear curve from knots already known to be valid.
    /// Symmetry is detected when `symmetric` is `None`.
    pub(crate) fn from_knots_trusted(knots: Vec<(f64, f64)>, symmetric: Option<bool>) -> Self {
        let knots = tidy_knots(knots);
        let symmetric = symmetric.unwrap_or_else(|| knots_symmetric(&knots));
        Self { kind: CurveKind::PiecewiseLinear { knots }, symmetric }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Knots of a piecewise-linear representation, if the curve has an exact one.
    pub fn exact_knots(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            CurveKind::PiecewiseLinear { knots } => Some(knots.clone()),
            CurveKind::EpsDelta { eps, delta } => Some(eps_delta_knots(*eps, *delta)),
            CurveKind::Gaussian { mu } if *mu == 0.0 => Some(vec![(0.0, 1.0), (1.0, 0.0)]),
            CurveKind::Gaussian { .. } => None,
        }
    }

    /// Exact knots when available, otherwise a tangent discretization on the
    /// default grid (which never overstates privacy).
    pub fn working_knots(&self) -> Vec<(f64, f64)> {
        self.exact_knots()
            .unwrap_or_else(|| self.discretize(&alpha_grid(DEFAULT_GRID), Discretization::Tangent))
    }

    /// Discretizes onto the given sorted grid (which must contain 0 and 1).
    pub fn discretize(&self, grid: &[f64], mode: Discretization) -> Vec<(f64, f64)> {
        if let Some(knots) = self.exact_knots() {
            return knots;
        }
        match mode {
            Discretization::Chord => grid.iter().map(|&a| (a, self.value(a))).collect(),
            Discretization::Tangent => self.tangent_knots(grid),
        }
    }

    /// Piecewise-linear version of this curve on the default grid.
    pub fn to_piecewise(&self, mode: Discretization) -> Self {
        match &self.kind {
            CurveKind::PiecewiseLinear { .. } => self.clone(),
            _ => {
                let knots = self.discretize(&alpha_grid(DEFAULT_GRID), mode);
                Self::from_knots_trusted(knots, None)
            }
        }
    }

    fn tangent_knots(&self, grid: &[f64]) -> Vec<(f64, f64)> {
        let interior: Vec<(f64, f64, f64)> = grid
            .iter()
            .copied()
            .filter(|&a| a > 0.0 && a < 1.0)
            .map(|a| (a, self.value(a), self.slope(a)))
            .filter(|t| t.2.is_finite())
            .collect();
        if interior.is_empty() {
            return vec![(0.0, self.value(0.0)), (1.0, 0.0)];
        }
        let line = |t: &(f64, f64, f64), x: f64| t.1 + t.2 * (x - t.0);
        let mut knots = vec![(0.0, line(&interior[0], 0.0).min(1.0))];
        for w in interior.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.2 - a.2 <= 0.0 {
                continue;
            }
            let x = ((b.1 - b.2 * b.0) - (a.1 - a.2 * a.0)) / (a.2 - b.2);
            let x = x.clamp(a.0, b.0);
            if x > knots.last().unwrap().0 {
                knots.push((x, line(a, x)));
            }
        }
        let last = interior.last().unwrap();
        knots.push((1.0, line(last, 1.0)));
        // The hull only lowers the polyline, and it removes rounding kinks.
        lower_hull(&clip_at_zero(knots))
    }

    /// `f(alpha)`, rejecting arguments outside `[0, 1]`.
    pub fn evaluate(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(self.value(alpha))
    }

    /// `f(alpha)` for `alpha` assumed to be in `[0, 1]`.
    pub fn value(&self, alpha: f64) -> f64 {
        match &self.kind {
            CurveKind::Gaussian { mu } => gaussian_value(*mu, alpha),
            CurveKind::EpsDelta { eps, delta } => {
                if eps.is_infinite() || *delta >= 1.0 {
                    return 0.0;
                }
                let base = 1.0 - delta;
                (base - eps.exp() * alpha).max((-eps).exp() * (base - alpha)).max(0.0)
            }
            CurveKind::PiecewiseLinear { knots } => interpolate(knots, alpha),
        }
    }

    /// `1 - f(alpha)`, kept accurate when `f(alpha)` is close to 1.
    pub(crate) fn complement(&self, alpha: f64) -> f64 {
        match self.kind {
            CurveKind::Gaussian { mu } if alpha > 0.0 && alpha < 1.0 => {
                normal::cdf(normal::quantile(alpha) + mu)
            }
            CurveKind::EpsDelta { eps, delta } if eps.is_finite() && delta < 1.0 => {
                let steep = delta + eps.exp() * alpha;
                let shallow = 1.0 - (-eps).exp() * (1.0 - delta - alpha);
                steep.min(shallow).min(1.0)
            }
            _ => 1.0 - self.value(alpha),
        }
    }

    /// `f(1 - t)`, kept accurate for small `t`.
    pub(crate) fn value_at_complement(&self, t: f64) -> f64 {
        match self.kind {
            CurveKind::Gaussian { mu } if t > 0.0 && t < 1.0 => normal::cdf(normal::quantile(t) - mu),
            CurveKind::EpsDelta { eps, delta } if eps.is_finite() && delta < 1.0 => {
                let steep = 1.0 - delta - eps.exp() * (1.0 - t);
                let shallow = (-eps).exp() * (t - delta);
                steep.max(shallow).max(0.0)
            }
            _ => self.value(1.0 - t),
        }
    }

    /// Derivative where it exists (right derivative at kinks of piecewise curves).
    pub(crate) fn slope(&self, alpha: f64) -> f64 {
        match &self.kind {
            CurveKind::Gaussian { mu } => {
                if *mu == 0.0 {
                    -1.0
                } else {
                    -(-mu * normal::quantile(alpha) - 0.5 * mu * mu).exp()
                }
            }
            _ => {
                let knots = self.working_knots();
                let i = knots.partition_point(|k| k.0 <= alpha).clamp(1, knots.len() - 1);
                segment_slope(knots[i - 1], knots[i])
            }
        }
    }

    /// The inverse curve `f^-1 = T(Q, P)`.
    pub fn invert(&self) -> Self {
        if self.symmetric {
            return self.clone();
        }
        let knots = invert_knots(&self.working_knots());
        Self::from_knots_trusted(knots, Some(false))
    }

    pub fn symmetrize(&self, mode: SymmetrizeMode) -> Self {
        if self.symmetric {
            return self.clone();
        }
        let f = self.working_knots();
        let g = invert_knots(&f);
        let knots = match mode {
            SymmetrizeMode::Max => pointwise(&f, &g, f64::max),
            SymmetrizeMode::MinBiconjugate => lower_hull(&pointwise(&f, &g, f64::min)),
        };
        Self::from_knots_trusted(knots, Some(true))
    }

    /// Convex conjugate `f*(x) = sup_{y in [0,1]} (x y - f(y))`.
    pub fn conjugate(&self) -> ConvexConjugate {
        ConvexConjugate::new(self.working_knots())
    }

    /// Max-divergence link: `-log(-f'(1-))`, infinite when the left slope at 1 vanishes.
    pub fn max_divergence(&self) -> f64 {
        match &self.kind {
            CurveKind::Gaussian { mu } => {
                if *mu == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            CurveKind::EpsDelta { eps, delta } => {
                if *delta > 0.0 {
                    f64::INFINITY
                } else {
                    *eps
                }
            }
            CurveKind::PiecewiseLinear { knots } => {
                let n = knots.len();
                let s = segment_slope(knots[n - 2], knots[n - 1]);
                if s >= 0.0 {
                    f64::INFINITY
                } else {
                    (-(-s).ln()).max(0.0)
                }
            }
        }
    }

    /// Total variation link `1/2 * int |1 + f'|`, counting a drop at 0.
    pub fn total_variation(&self) -> f64 {
        if let CurveKind::Gaussian { mu } = self.kind {
            return normal::interval(-0.5 * mu, 0.5 * mu);
        }
        let knots = self.working_knots();
        let drop = 1.0 - knots[0].1;
        let spread: f64 = knots
            .windows(2)
            .map(|w| ((w[1].0 - w[0].0) - (w[0].1 - w[1].1)).abs())
            .sum();
        (0.5 * (drop + spread)).clamp(0.0, 1.0)
    }

    /// Renyi link `(gamma - 1)^-1 log int |f'|^(1 - gamma)`.
    pub fn renyi(&self, gamma: f64) -> Result<f64> {
        if gamma.is_nan() || gamma <= 1.0 {
            return Err(Error::domain(format!("renyi order must exceed 1, got {gamma}")));
        }
        if let CurveKind::Gaussian { mu } = self.kind {
            return Ok(0.5 * gamma * mu * mu);
        }
        let knots = self.working_knots();
        let mut terms = Vec::with_capacity(knots.len());
        for w in knots.windows(2) {
            let width = w[1].0 - w[0].0;
            if width <= 0.0 {
                continue;
            }
            let drop = w[0].1 - w[1].1;
            if drop <= 0.0 {
                return Ok(f64::INFINITY);
            }
            // width * |s|^(1 - gamma) with |s| = drop / width
            terms.push(width.ln() + (1.0 - gamma) * (drop.ln() - width.ln()));
        }
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
        Ok(((top + sum.ln()) / (gamma - 1.0)).max(0.0))
    }

    /// Compares two curves on a uniform grid of `grid` points.
    pub fn compare(&self, other: &Self, grid: usize) -> Result<DominanceOrder> {
        if grid < 2 {
            return Err(Error::domain("comparison grid needs at least two points"));
        }
        let (mut above, mut below) = (false, false);
        for i in 0..grid {
            let a = i as f64 / (grid - 1) as f64;
            let d = self.value(a) - other.value(a);
            above |= d > COMPARE_TOL;
            below |= d < -COMPARE_TOL;
        }
        Ok(match (above, below) {
            (false, false) => DominanceOrder::Equal,
            (true, false) => DominanceOrder::Dominates,
            (false, true) => DominanceOrder::DominatedBy,
            (true, true) => DominanceOrder::Incomparable,
        })
    }

    /// Largest `g(alpha) - f(alpha)` over a uniform grid; positive values
    /// mean `other` exceeds `self` somewhere.
    pub fn max_excess(&self, other: &Self, grid: usize) -> f64 {
        (0..grid)
            .map(|i| i as f64 / (grid - 1) as f64)
            .map(|a| other.value(a) - self.value(a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup-distance over a uniform grid.
    pub fn sup_distance(&self, other: &Self, grid: usize) -> f64 {
        (0..grid)
            .map(|i| i as f64 / (grid - 1) as f64)
            .map(|a| (other.value(a) - self.value(a)).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact Neyman-Pearson trade-off between two distributions on a shared support.
///
/// Outcomes are ordered by likelihood ratio `P/Q`; outcomes with equal ratios
/// are merged, and consecutive thresholds are joined by straight lines
/// (randomized tests).
pub fn from_distribution_pair(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<TradeoffCurve> {
    p.check_same_support(q)?;
    let atoms: Vec<(f64, f64)> = p
        .mass()
        .iter()
        .zip(q.mass())
        .map(|(&a, &b)| (a, b))
        .filter(|&(a, b)| a > 0.0 || b > 0.0)
        .collect();
    Ok(TradeoffCurve::from_knots_trusted(knots_from_atoms(atoms), None))
}

/// Builds trade-off knots from `(p, q)` atoms by likelihood-ratio thresholding.
pub(crate) fn knots_from_atoms(atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut keyed: Vec<(f64, (f64, f64))> = atoms.into_iter().map(|a| (log_ratio(a), a)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(keyed.len());
    let mut last_key = f64::NAN;
    for (key, a) in keyed {
        match merged.last_mut() {
            Some(last) if key == last_key => {
                last.0 += a.0;
                last.1 += a.1;
            }
            _ => merged.push(a),
        }
        last_key = key;
    }
    let n = merged.len();
    let mut alphas = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    alphas.push(0.0);
    for a in &merged {
        acc += a.0;
        alphas.push(acc);
    }
    let mut betas = vec![0.0; n + 1];
    let mut tail = 0.0;
    for k in (0..n).rev() {
        tail += merged[k].1;
        betas[k] = tail;
    }
    let total_alpha = acc;
    let total_beta = betas[0];
    let mut knots: Vec<(f64, f64)> = alphas
        .into_iter()
        .zip(betas)
        .map(|(a, b)| ((a / total_alpha).min(1.0), (b / total_beta).min(1.0)))
        .collect();
    if let Some(last) = knots.last_mut() {
        *last = (1.0, 0.0);
    }
    knots
}

/// `log(p/q)`, with `-inf` for Q-only atoms and `+inf` for P-only atoms.
fn log_ratio((p, q): (f64, f64)) -> f64 {
    p.ln() - q.ln()
}

fn gaussian_value(mu: f64, alpha: f64) -> f64 {
    if mu == 0.0 {
        return 1.0 - alpha;
    }
    if alpha <= 0.0 {
        return 1.0;
    }
    if alpha >= 1.0 {
        return 0.0;
    }
    normal::cdf(-normal::quantile(alpha) - mu).min(1.0 - alpha)
}

fn eps_delta_knots(eps: f64, delta: f64) -> Vec<(f64, f64)> {
    if eps.is_infinite() || delta >= 1.0 {
        return vec![(0.0, 0.0), (1.0, 0.0)];
    }
    let base = 1.0 - delta;
    let fixed = base / (1.0 + eps.exp());
    let mut knots = vec![(0.0, base), (fixed, fixed), (base, 0.0), (1.0, 0.0)];
    knots.dedup_by(|b, a| b.0 <= a.0);
    knots
}

pub(crate) fn segment_slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

pub(crate) fn interpolate(knots: &[(f64, f64)], alpha: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 < alpha);
    if i == 0 {
        return knots[0].1;
    }
    if i == knots.len() {
        return knots[i - 1].1;
    }
    let (a, b) = (knots[i - 1], knots[i]);
    if b.0 == alpha {
        return b.1;
    }
    let t = (alpha - a.0) / (b.0 - a.0);
    a.1 + t * (b.1 - a.1)
}

/// Moves a curve by a mass error `|budget|`: down and left for a negative
/// budget, up and right for a positive one. If the masses behind `f` are off
/// by at most `b`, the true curve lies between `f(a + b) - b` and
/// `f(a - b) + b`; the upper envelope is capped by `1 - a` and convexified,
/// which keeps it above any convex curve it bounds.
pub(crate) fn widen(curve: &TradeoffCurve, budget: f64) -> TradeoffCurve {
    if budget == 0.0 {
        return curve.clone();
    }
    let moved: Vec<(f64, f64)> = curve.working_knots().iter().map(|&(a, b)| (a + budget, b + budget)).collect();
    let mut points = vec![(0.0, interpolate(&moved, 0.0).min(1.0))];
    points.extend(moved.iter().copied().filter(|k| k.0 > 0.0 && k.0 < 1.0));
    let points = if budget < 0.0 {
        clip_at_zero(points)
    } else {
        points.iter_mut().for_each(|k| k.1 = k.1.min(1.0 - k.0));
        points.push((1.0, 0.0));
        lower_hull(&points)
    };
    TradeoffCurve::from_knots_trusted(points, Some(curve.is_symmetric()))
}

/// Replaces negative tail values by the zero line, keeping convexity.
fn clip_at_zero(knots: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(knots.len());
    for (i, &k) in knots.iter().enumerate() {
        if k.1 >= 0.0 {
            out.push(k);
            continue;
        }
        if i > 0 {
            let prev = knots[i - 1];
            let x = prev.0 + prev.1 / (prev.1 - k.1) * (k.0 - prev.0);
            out.push((x, 0.0));
        } else {
            out.push((0.0, 0.0));
        }
        break;
    }
    out.push((1.0, 0.0));
    out
}

/// Merges duplicate alphas (keeping the lower value), clamps into `[0, 1]`,
/// and forces `f(1) = 0`.
fn tidy_knots(knots: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
    for (a, b) in knots {
        let a = a.clamp(0.0, 1.0);
        let k = (a, b.clamp(0.0, 1.0 - a));
        match out.last_mut() {
            Some(last) if k.0 <= last.0 => last.1 = last.1.min(k.1),
            _ => out.push(k),
        }
    }
    if out.len() == 1 {
        out.push((1.0, 0.0));
    }
    if let Some(last) = out.last_mut() {
        if last.0 < 1.0 {
            let tail = (1.0, 0.0);
            out.push(tail);
        } else {
            last.1 = 0.0;
        }
    }
    out
}

fn validate_knots(knots: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    if knots.len() < 2 {
        return Err(Error::domain("a piecewise-linear curve needs at least two knots"));
    }
    if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
        return Err(Error::domain("knots must be finite"));
    }
    if knots[0].0.abs() > VALIDATION_TOL || (knots[knots.len() - 1].0 - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::domain("knots must span alpha from 0 to 1"));
    }
    for w in knots.windows(2) {
        if w[1].0 < w[0].0 {
            return Err(Error::domain("knot alphas must be non-decreasing"));
        }
        if w[1].1 > w[0].1 + VALIDATION_TOL {
            return Err(Error::domain("trade-off curves must be non-increasing"));
        }
    }
    for &(a, b) in &knots {
        if b < -VALIDATION_TOL || b > 1.0 + VALIDATION_TOL {
            return Err(Error::domain("beta values must lie in [0, 1]"));
        }
        if b > 1.0 - a + VALIDATION_TOL {
            return Err(Error::domain(format!("curve exceeds the identity at alpha = {a}")));
        }
    }
    // convexity is judged by how far knots sit above their lower hull;
    // slopes of sub-ulp segments are pure rounding noise
    let tidy = tidy_knots(knots);
    let hull = lower_hull(&tidy);
    if tidy.iter().any(|&(a, b)| b > interpolate(&hull, a) + VALIDATION_TOL) {
        return Err(Error::domain("piecewise-linear knots are not convex"));
    }
    Ok(hull)
}

pub(crate) fn invert_knots(knots: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(knots.len() + 1);
    for &(a, b) in knots.iter().rev() {
        match pts.last_mut() {
            Some(last) if b <= last.0 => last.1 = last.1.min(a),
            _ => pts.push((b, a)),
        }
    }
    if pts.last().map_or(true, |p| p.0 < 1.0) {
        pts.push((1.0, 0.0));
    }
    pts
}

fn knots_symmetric(knots: &[(f64, f64)]) -> bool {
    let inv = invert_knots(knots);
    knots.iter().all(|&(a, b)| (interpolate(&inv, a) - b).abs() <= SYMMETRY_TOL)
        && inv.iter().all(|&(a, b)| (interpolate(knots, a) - b).abs() <= SYMMETRY_TOL)
}

/// Combines two piecewise-linear curves pointwise, inserting crossing points.
pub(crate) fn pointwise(f: &[(f64, f64)], g: &[(f64, f64)], op: fn(f64, f64) -> f64) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = f.iter().chain(g).map(|k| k.0).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let mut out = Vec::with_capacity(xs.len() * 2);
    let mut prev: Option<(f64, f64, f64)> = None;
    for x in xs {
        let (fv, gv) = (interpolate(f, x), interpolate(g, x));
        if let Some((px, pf, pg)) = prev {
            let (d0, d1) = (pf - pg, fv - gv);
            if d0 * d1 < 0.0 {
                let t = d0 / (d0 - d1);
                let cx = px + t * (x - px);
                if cx > px && cx < x {
                    out.push((cx, pf + t * (fv - pf)));
                }
            }
        }
        out.push((x, op(fv, gv)));
        prev = Some((x, fv, gv));
    }
    out
}

/// Greatest convex minorant of points sorted by abscissa.
pub(crate) fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Convex conjugate of a trade-off curve, a convex piecewise-linear function on the reals.
#[derive(Debug, Clone)]
pub struct ConvexConjugate {
    knots: Vec<(f64, f64)>,
    slopes: Vec<f64>,
}

impl ConvexConjugate {
    fn new(knots: Vec<(f64, f64)>) -> Self {
        let slopes = knots.windows(2).map(|w| segment_slope(w[0], w[1])).collect();
        Self { knots, slopes }
    }

    /// `f*(x)`. The maximizing knot is where the curve's slopes straddle `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let i = self.slopes.partition_point(|&s| s < x);
        let (a, b) = self.knots[i];
        x * a - b
    }

    /// Breakpoints of `f*`, i.e. the slopes of the original curve.
    pub fn breakpoints(&self) -> &[f64] {
        &self.slopes
    }

    /// `f**(y) = sup_x (x y - f*(x))`, attained at a breakpoint.
    pub fn conjugate_at(&self, y: f64) -> f64 {
        self.slopes
            .iter()
            .map(|&s| y * s - self.evaluate(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
