//! Privacy-loss distributions on a uniform lattice.
//!
//! A distribution pair `(P, Q)` is summarized by the law of the loss
//! `log dP/dQ`. Each lattice point `k` carries the P-mass and Q-mass of the
//! outcomes whose loss was assigned to `k * cell`. Keeping both masses makes
//! reconstruction exact whenever no two different ratios share a point.
//! Singular mass lives in two sentinels: P-only outcomes at `+inf` and
//! Q-only outcomes at `-inf`.
//!
//! Rounding is directed. Pessimistic distributions split every atom between
//! its two neighbouring lattice points so that both masses are preserved;
//! the original pair is a post-processing of the split one, so the
//! reconstructed curve lies below the truth. Optimistic distributions merge
//! everything within half a cell of a lattice point, which is itself a
//! post-processing, so the reconstructed curve lies above the truth.

use crate::curve::{knots_from_atoms, CurveKind, TradeoffCurve};
use crate::error::{Error, Result};
use crate::normal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub const DEFAULT_CELL: f64 = 1e-4;
/// Losses beyond this magnitude are folded into sentinels or edge points.
pub const DEFAULT_SPAN: f64 = 30.0;

/// Continuous tails lighter than this are not resolved on the lattice.
const TAIL_SIGMAS: f64 = 12.0;
/// Entries of an FFT product below this fraction of the peak are noise.
const FFT_NOISE: f64 = 1e-15;
/// Atoms this close (in cells) to a lattice point are placed on it.
const SNAP: f64 = 1e-9;
const DIRECT_LIMIT: usize = 1 << 16;
/// Lattice masses below this are moved to the sentinels or the budget.
const NEGLIGIBLE: f64 = 1e-250;
/// Round-off charged to a freshly discretized distribution, in total mass.
const BASE_ROUNDOFF: f64 = 8.0 * f64::EPSILON;
/// Per-transform round-off of an FFT convolution, in units of
/// `eps * log2(n) * |a|_1 * |b|_1`. Measured errors sit about 25 times lower.
const FFT_ROUNDOFF: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rounding {
    Pessimistic,
    Optimistic,
}

/// A pair of distributions whose loss is available in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossModel {
    /// `N(0, 1)` against `N(mu, 1)`.
    Gaussian { mu: f64 },
    /// `N(0, 1)` against `(1 - rate) N(0, 1) + rate N(mu, 1)`; its curve is
    /// `rate * G_mu + (1 - rate) * Id`.
    SubsampledGaussian { mu: f64, rate: f64 },
}

impl LossModel {
    fn validate(&self) -> Result<()> {
        match *self {
            LossModel::Gaussian { mu } if mu.is_finite() && mu >= 0.0 => Ok(()),
            LossModel::SubsampledGaussian { mu, rate }
                if mu.is_finite() && mu >= 0.0 && (0.0..=1.0).contains(&rate) =>
            {
                Ok(())
            }
            _ => Err(Error::domain(format!("invalid loss model {self:?}"))),
        }
    }

    fn is_trivial(&self) -> bool {
        match *self {
            LossModel::Gaussian { mu } => mu == 0.0,
            LossModel::SubsampledGaussian { mu, rate } => mu == 0.0 || rate == 0.0,
        }
    }

    /// Loss range outside which both laws carry negligible mass.
    fn support(&self) -> (f64, f64) {
        match *self {
            LossModel::Gaussian { mu } => {
                let half = 0.5 * mu * mu;
                (-half - TAIL_SIGMAS * mu, half + TAIL_SIGMAS * mu)
            }
            LossModel::SubsampledGaussian { mu, rate } => {
                let loss = |x: f64| subsampled_loss(mu, rate, x);
                (loss(mu + TAIL_SIGMAS), loss(-TAIL_SIGMAS))
            }
        }
    }

    /// P-mass and Q-mass of outcomes with loss in `[lo, hi]`.
    fn masses(&self, lo: f64, hi: f64) -> (f64, f64) {
        match *self {
            LossModel::Gaussian { mu } => {
                let half = 0.5 * mu * mu;
                let p = normal::interval((lo - half) / mu, (hi - half) / mu);
                let q = normal::interval((lo + half) / mu, (hi + half) / mu);
                (p, q)
            }
            LossModel::SubsampledGaussian { mu, rate } => {
                // loss decreases in x
                let (x_lo, x_hi) = (subsampled_point(mu, rate, hi), subsampled_point(mu, rate, lo));
                let p = normal::interval(x_lo, x_hi);
                let q = (1.0 - rate) * p + rate * normal::interval(x_lo - mu, x_hi - mu);
                (p, q)
            }
        }
    }
}

fn subsampled_loss(mu: f64, rate: f64, x: f64) -> f64 {
    -(1.0 - rate + rate * (mu * x - 0.5 * mu * mu).exp()).ln()
}

/// Inverse of `subsampled_loss` in `x`.
fn subsampled_point(mu: f64, rate: f64, loss: f64) -> f64 {
    if loss == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let inner = (-loss).exp_m1() + rate;
    if inner <= 0.0 {
        return f64::NEG_INFINITY;
    }
    ((inner / rate).ln() + 0.5 * mu * mu) / mu
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyLossDistribution {
    cell: f64,
    offset: i64,
    mass_p: Vec<f64>,
    mass_q: Vec<f64>,
    p_inf: f64,
    q_neg_inf: f64,
    rounding: Rounding,
    /// Bound on the total absolute error of each mass vector.
    roundoff: f64,
    /// Bound on the error of each lattice mass relative to its stored value.
    relative: f64,
}

impl PrivacyLossDistribution {
    /// The distribution of two identical laws: one atom at loss 0.
    pub fn identity(cell: f64, rounding: Rounding) -> Self {
        Self { cell, offset: 0, mass_p: vec![1.0], mass_q: vec![1.0], p_inf: 0.0, q_neg_inf: 0.0, rounding, roundoff: 0.0, relative: 0.0 }
    }

    /// Discretizes a closed-form pair.
    pub fn from_model(model: LossModel, cell: f64, rounding: Rounding) -> Result<Self> {
        check_cell(cell)?;
        model.validate()?;
        if model.is_trivial() {
            return Ok(Self::identity(cell, rounding));
        }
        let (lo, hi) = model.support();
        let (lo, hi) = (lo.max(-DEFAULT_SPAN), hi.min(DEFAULT_SPAN));
        let mut acc = Accumulator::new(cell, rounding, (lo / cell).floor() as i64 - 1, (hi / cell).ceil() as i64 + 1);
        let below = model.masses(f64::NEG_INFINITY, lo);
        let above = model.masses(hi, f64::INFINITY);
        acc.overflow(below, false);
        acc.overflow(above, true);
        match rounding {
            Rounding::Pessimistic => {
                let (k0, k1) = ((lo / cell).floor() as i64, (hi / cell).ceil() as i64);
                // the two partial end bins are clipped to [lo, hi]
                for k in k0..k1 {
                    let (a, b) = (k as f64 * cell, (k + 1) as f64 * cell);
                    let (p, q) = model.masses(a.max(lo), b.min(hi));
                    acc.split(k, p, q);
                }
            }
            Rounding::Optimistic => {
                let (k0, k1) = ((lo / cell).round() as i64, (hi / cell).round() as i64);
                for k in k0..=k1 {
                    let (a, b) = ((k as f64 - 0.5) * cell, (k as f64 + 0.5) * cell);
                    let (p, q) = model.masses(a.max(lo), b.min(hi));
                    acc.add(k, p, q);
                }
            }
        }
        Ok(acc.finish())
    }

    /// Discretizes atoms `(loss, p, q)`; losses may be infinite.
    pub(crate) fn from_atoms(atoms: &[(f64, f64, f64)], cell: f64, rounding: Rounding) -> Result<Self> {
        check_cell(cell)?;
        let finite: Vec<f64> = atoms.iter().map(|a| a.0).filter(|l| l.is_finite()).collect();
        let lo = finite.iter().copied().fold(0.0_f64, f64::min).max(-DEFAULT_SPAN);
        let hi = finite.iter().copied().fold(0.0_f64, f64::max).min(DEFAULT_SPAN);
        let mut acc = Accumulator::new(cell, rounding, (lo / cell).floor() as i64 - 1, (hi / cell).ceil() as i64 + 1);
        // bins only accumulate nonnegative atoms, except where an atom is split
        acc.roundoff = 0.0;
        acc.relative = f64::EPSILON * (atoms.len() + 4) as f64;
        for &(loss, p, q) in atoms {
            if p <= 0.0 && q <= 0.0 {
                continue;
            }
            if q <= 0.0 || loss == f64::INFINITY {
                acc.p_inf += p;
                continue;
            }
            if p <= 0.0 || loss == f64::NEG_INFINITY {
                acc.q_neg_inf += q;
                continue;
            }
            if loss > DEFAULT_SPAN || loss < -DEFAULT_SPAN {
                acc.overflow((p, q), loss > 0.0);
                continue;
            }
            let t = loss / cell;
            let nearest = t.round();
            if (t - nearest).abs() <= SNAP * nearest.abs().max(1.0) {
                acc.add(nearest as i64, p, q);
                continue;
            }
            match rounding {
                Rounding::Pessimistic => {
                    acc.roundoff += 4.0 * f64::EPSILON * p.max(q);
                    acc.split(t.floor() as i64, p, q)
                }
                Rounding::Optimistic => acc.add(nearest as i64, p, q),
            }
        }
        Ok(acc.finish())
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    /// Loss value of every finite lattice point, in increasing order.
    pub fn losses(&self) -> Vec<f64> {
        (0..self.mass_p.len()).map(|j| (self.offset + j as i64) as f64 * self.cell).collect()
    }

    pub fn mass_p(&self) -> &[f64] {
        &self.mass_p
    }

    pub fn mass_q(&self) -> &[f64] {
        &self.mass_q
    }

    /// P-mass on outcomes impossible under Q.
    pub fn p_infinity(&self) -> f64 {
        self.p_inf
    }

    /// Q-mass on outcomes impossible under P.
    pub fn q_neg_infinity(&self) -> f64 {
        self.q_neg_inf
    }

    /// Bound on the accumulated floating-point error in either mass vector,
    /// measured as total absolute mass.
    pub fn roundoff(&self) -> f64 {
        self.roundoff
    }

    /// Bin-wise relative error bound of the stored masses.
    pub fn relative_roundoff(&self) -> f64 {
        self.relative
    }

    /// Bound on the total error of either mass vector, both budgets combined.
    pub fn mass_error(&self) -> f64 {
        self.roundoff + self.relative * self.total_p().max(self.total_q())
    }

    pub fn total_p(&self) -> f64 {
        self.mass_p.iter().sum::<f64>() + self.p_inf
    }

    pub fn total_q(&self) -> f64 {
        self.mass_q.iter().sum::<f64>() + self.q_neg_inf
    }

    /// Largest gap between the stored Q-mass and the one implied by `p * e^-loss`.
    pub fn dual_mass_defect(&self) -> f64 {
        let implied: f64 = self
            .losses()
            .iter()
            .zip(&self.mass_p)
            .map(|(l, p)| p * (-l).exp())
            .sum();
        (implied + self.q_neg_inf - 1.0).abs()
    }

    /// The distribution of the reversed pair `(Q, P)`.
    pub fn swap(&self) -> Self {
        let n = self.mass_p.len() as i64;
        Self {
            cell: self.cell,
            offset: -(self.offset + n - 1),
            mass_p: self.mass_q.iter().rev().copied().collect(),
            mass_q: self.mass_p.iter().rev().copied().collect(),
            p_inf: self.q_neg_inf,
            q_neg_inf: self.p_inf,
            rounding: self.rounding,
            roundoff: self.roundoff,
            relative: self.relative,
        }
    }

    fn is_identity(&self) -> bool {
        self.offset == 0 && self.mass_p == [1.0] && self.mass_q == [1.0] && self.p_inf == 0.0 && self.q_neg_inf == 0.0
    }

    /// Lattice convolution: the loss distribution of the product pair.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_with(other, false)
    }

    /// Convolution by direct summation regardless of size. Sums of
    /// nonnegative terms keep a bin-wise relative error, so far tails stay
    /// accurate where a transform would only give an absolute bound.
    pub(crate) fn convolve_direct(&self, other: &Self) -> Result<Self> {
        self.convolve_with(other, true)
    }

    fn convolve_with(&self, other: &Self, force_direct: bool) -> Result<Self> {
        if self.rounding != other.rounding {
            return Err(Error::domain("cannot convolve distributions rounded in different directions"));
        }
        if (self.cell - other.cell).abs() > 1e-15 * self.cell {
            return Err(Error::domain(format!("cell mismatch: {} vs {}", self.cell, other.cell)));
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        if self.is_identity() {
            return Ok(other.clone());
        }
        let stride = gcd(support_stride(&self.mass_p, &self.mass_q), support_stride(&other.mass_p, &other.mass_q));
        let (ap, aq) = (compress(&self.mass_p, stride), compress(&self.mass_q, stride));
        let (bp, bq) = (compress(&other.mass_p, stride), compress(&other.mass_q, stride));
        let exact = force_direct || ap.len().min(bp.len()) <= 8 || ap.len() * bp.len() <= DIRECT_LIMIT;
        let (cp, cq) = if exact {
            (direct(&ap, &bp), direct(&aq, &bq))
        } else {
            fft_pair(&ap, &aq, &bp, &bq, std::ptr::eq(self, other))
        };
        let mut acc = Accumulator::from_parts(self.cell, self.rounding);
        let weight = |v: &[f64]| v.iter().sum::<f64>();
        let (wa, wb) = (weight(&ap) + weight(&aq), weight(&bp) + weight(&bq));
        let (fresh, gamma) = if exact {
            (0.0, f64::EPSILON * ap.len().min(bp.len()) as f64)
        } else {
            (FFT_ROUNDOFF * f64::EPSILON * ((ap.len() + bp.len()).next_power_of_two() as f64).log2() * wa * wb, 0.0)
        };
        let (ma, mb) = (weight(&ap).max(weight(&aq)), weight(&bp).max(weight(&bq)));
        let (ra, rb) = (self.relative, other.relative);
        acc.relative = (1.0 + ra) * (1.0 + rb) / (1.0 - gamma) - 1.0;
        acc.roundoff =
            self.roundoff * mb * (1.0 + rb) + other.roundoff * ma * (1.0 + ra) + self.roundoff * other.roundoff + fresh;
        acc.p_inf = 1.0 - (1.0 - self.p_inf) * (1.0 - other.p_inf);
        acc.q_neg_inf = 1.0 - (1.0 - self.q_neg_inf) * (1.0 - other.q_neg_inf);
        let base = self.offset + other.offset;
        let (peak_p, peak_q) = (max_of(&cp), max_of(&cq));
        let limit = (DEFAULT_SPAN / self.cell).floor() as i64;
        acc.reserve(base, base + ((cp.len().max(1) - 1) * stride) as i64);
        for (j, (&p, &q)) in cp.iter().zip(&cq).enumerate() {
            let (p, q) = (p.max(0.0), q.max(0.0));
            if (!exact && p <= FFT_NOISE * peak_p && q <= FFT_NOISE * peak_q) || (p < NEGLIGIBLE && q < NEGLIGIBLE) {
                acc.discard(p, q);
                continue;
            }
            let k = base + (j * stride) as i64;
            if k.abs() > limit {
                acc.overflow((p, q), k > 0);
            } else {
                acc.add(k, p, q);
            }
        }
        Ok(acc.finish())
    }

    /// `m`-fold composition by repeated squaring; `m = 0` gives the identity.
    pub fn self_convolve(&self, m: u64) -> Result<Self> {
        self.self_convolve_with(m, false)
    }

    pub(crate) fn self_convolve_direct(&self, m: u64) -> Result<Self> {
        self.self_convolve_with(m, true)
    }

    fn self_convolve_with(&self, m: u64, force_direct: bool) -> Result<Self> {
        let mut result = Self::identity(self.cell, self.rounding);
        let mut base = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                result = result.convolve_with(&base, force_direct)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.convolve_with(&base, force_direct)?;
            }
        }
        Ok(result)
    }

    /// Mean and variance of the finite part of the loss under P.
    pub fn loss_moments(&self) -> (f64, f64) {
        let losses = self.losses();
        let total: f64 = self.mass_p.iter().sum();
        let mean = losses.iter().zip(&self.mass_p).map(|(l, p)| l * p).sum::<f64>() / total;
        let var = losses.iter().zip(&self.mass_p).map(|(l, p)| (l - mean).powi(2) * p).sum::<f64>() / total;
        (mean, var)
    }
}

/// Loss distribution of a trade-off curve, read off from its linear pieces.
pub fn curve_to_pld(curve: &TradeoffCurve, cell: f64, rounding: Rounding) -> Result<PrivacyLossDistribution> {
    check_cell(cell)?;
    if let CurveKind::Gaussian { mu } = *curve.kind() {
        return PrivacyLossDistribution::from_model(LossModel::Gaussian { mu }, cell, rounding);
    }
    let knots = curve.working_knots();
    let mut atoms = Vec::with_capacity(knots.len() + 1);
    atoms.push((f64::NEG_INFINITY, 0.0, 1.0 - knots[0].1));
    for w in knots.windows(2) {
        let p = w[1].0 - w[0].0;
        let q = w[0].1 - w[1].1;
        if q < -1e-12 {
            return Err(Error::domain("curve is increasing somewhere"));
        }
        let q = q.max(0.0);
        let loss = if q == 0.0 { f64::INFINITY } else { (p / q).ln() };
        atoms.push((loss, p, q));
    }
    let slopes: Vec<f64> = knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    if slopes.windows(2).any(|s| s[1] < s[0] - 1e-9 * s[0].abs().max(1.0)) {
        return Err(Error::domain("curve is not convex"));
    }
    // knot differences carry their own cancellation error
    let mut pld = PrivacyLossDistribution::from_atoms(&atoms, cell, rounding)?;
    pld.roundoff += BASE_ROUNDOFF;
    Ok(pld)
}

/// Trade-off curve of the pair summarized by a loss distribution.
pub fn pld_to_curve(pld: &PrivacyLossDistribution) -> TradeoffCurve {
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(pld.mass_p.len() + 2);
    atoms.push((0.0, pld.q_neg_inf));
    atoms.extend(pld.mass_p.iter().zip(&pld.mass_q).map(|(&p, &q)| (p, q)));
    atoms.push((pld.p_inf, 0.0));
    atoms.retain(|&(p, q)| p > 0.0 || q > 0.0);
    TradeoffCurve::from_knots_trusted(knots_from_atoms(atoms), None)
}

fn check_cell(cell: f64) -> Result<()> {
    if !(cell > 0.0) || !cell.is_finite() {
        return Err(Error::domain(format!("cell must be positive and finite, got {cell}")));
    }
    Ok(())
}

/// Builds lattice arrays while tracking sentinel mass.
struct Accumulator {
    cell: f64,
    rounding: Rounding,
    lo: i64,
    p: Vec<f64>,
    q: Vec<f64>,
    p_inf: f64,
    q_neg_inf: f64,
    roundoff: f64,
    relative: f64,
}

impl Accumulator {
    fn new(cell: f64, rounding: Rounding, lo: i64, hi: i64) -> Self {
        let mut acc = Self::from_parts(cell, rounding);
        acc.reserve(lo, hi);
        acc
    }

    fn from_parts(cell: f64, rounding: Rounding) -> Self {
        Self { cell, rounding, lo: 0, p: Vec::new(), q: Vec::new(), p_inf: 0.0, q_neg_inf: 0.0, roundoff: BASE_ROUNDOFF, relative: 0.0 }
    }

    fn reserve(&mut self, lo: i64, hi: i64) {
        if self.p.is_empty() {
            self.lo = lo;
            let n = (hi - lo + 1).max(1) as usize;
            self.p = vec![0.0; n];
            self.q = vec![0.0; n];
        }
    }

    fn add(&mut self, k: i64, p: f64, q: f64) {
        if k < self.lo {
            let grow = (self.lo - k) as usize;
            self.p.splice(0..0, std::iter::repeat(0.0).take(grow));
            self.q.splice(0..0, std::iter::repeat(0.0).take(grow));
            self.lo = k;
        }
        let j = (k - self.lo) as usize;
        if j >= self.p.len() {
            self.p.resize(j + 1, 0.0);
            self.q.resize(j + 1, 0.0);
        }
        self.p[j] += p;
        self.q[j] += q;
    }

    /// Splits mass with loss in `[k, k + 1]` cells onto both endpoints so the
    /// endpoint ratios are exactly `e^(k cell)` and `e^((k + 1) cell)`.
    fn split(&mut self, k: i64, p: f64, q: f64) {
        if p <= 0.0 && q <= 0.0 {
            return;
        }
        let (ea, eb) = ((k as f64 * self.cell).exp(), ((k + 1) as f64 * self.cell).exp());
        let q_hi = ((p - q * ea) / (eb - ea)).clamp(0.0, q);
        let q_lo = q - q_hi;
        let p_lo = (q_lo * ea).min(p);
        let p_hi = p - p_lo;
        self.add(k, p_lo, q_lo);
        self.add(k + 1, p_hi, q_hi);
    }

    /// Mass beyond the lattice span.
    fn overflow(&mut self, (p, q): (f64, f64), upper: bool) {
        if p <= 0.0 && q <= 0.0 {
            return;
        }
        match self.rounding {
            Rounding::Pessimistic => {
                self.p_inf += p;
                self.q_neg_inf += q;
            }
            Rounding::Optimistic => {
                let edge = (DEFAULT_SPAN / self.cell).floor() as i64;
                self.add(if upper { edge } else { -edge }, p, q);
            }
        }
    }

    /// Mass too small to keep.
    fn discard(&mut self, p: f64, q: f64) {
        if self.rounding == Rounding::Pessimistic {
            self.p_inf += p;
            self.q_neg_inf += q;
        } else {
            self.roundoff += p.max(q);
        }
    }

    fn finish(mut self) -> PrivacyLossDistribution {
        let first = self.p.iter().zip(&self.q).position(|(&p, &q)| p > 0.0 || q > 0.0);
        let (offset, mass_p, mass_q) = match first {
            None => (0, Vec::new(), Vec::new()),
            Some(first) => {
                let last = self.p.iter().zip(&self.q).rposition(|(&p, &q)| p > 0.0 || q > 0.0).unwrap();
                self.p.truncate(last + 1);
                self.q.truncate(last + 1);
                (self.lo + first as i64, self.p.split_off(first), self.q.split_off(first))
            }
        };
        PrivacyLossDistribution {
            cell: self.cell,
            offset,
            mass_p,
            mass_q,
            p_inf: self.p_inf.min(1.0),
            q_neg_inf: self.q_neg_inf.min(1.0),
            rounding: self.rounding,
            roundoff: self.roundoff,
            relative: self.relative,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Common spacing of the occupied lattice points.
fn support_stride(p: &[f64], q: &[f64]) -> usize {
    let occupied = p.iter().zip(q).enumerate().filter(|(_, (&a, &b))| a > 0.0 || b > 0.0).map(|(j, _)| j);
    occupied.fold(0, gcd).max(1)
}

fn compress(v: &[f64], stride: usize) -> Vec<f64> {
    v.iter().step_by(stride).copied().collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// Convolves `ap * bp` and `aq * bq` with two forward and one inverse transform.
fn fft_pair(ap: &[f64], aq: &[f64], bp: &[f64], bq: &[f64], same: bool) -> (Vec<f64>, Vec<f64>) {
    let len = ap.len() + bp.len() - 1;
    let n = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let pack = |p: &[f64], q: &[f64]| {
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for (slot, (&re, &im)) in z.iter_mut().zip(p.iter().zip(q)) {
            *slot = Complex64::new(re, im);
        }
        z
    };
    let mut za = pack(ap, aq);
    forward.process(&mut za);
    let zb = if same {
        za.clone()
    } else {
        let mut zb = pack(bp, bq);
        forward.process(&mut zb);
        zb
    };
    // Unpack the transforms of the real and imaginary parts by conjugate symmetry.
    let half = Complex64::new(0.5, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5);
    let mut prod = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let m = (n - k) % n;
        let (a, ac) = (za[k], za[m].conj());
        let (b, bc) = (zb[k], zb[m].conj());
        let (pa, qa) = ((a + ac) * half, (a - ac) * minus_half_i);
        let (pb, qb) = ((b + bc) * half, (b - bc) * minus_half_i);
        prod[k] = pa * pb + Complex64::new(0.0, 1.0) * (qa * qb);
    }
    inverse.process(&mut prod);
    let scale = 1.0 / n as f64;
    let p = prod[..len].iter().map(|z| z.re * scale).collect();
    let q = prod[..len].iter().map(|z| z.im * scale).collect();
    (p, q)
}
