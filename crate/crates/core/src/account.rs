//! Composition accountants.
//!
//! Gaussian curves compose in closed form. General curves compose through
//! their loss distributions, once rounded pessimistically and once
//! optimistically, which brackets the exact composition. The CLT and
//! Edgeworth accountants are approximations and carry no error bar.

use crate::curve::{widen, CurveKind, SymmetrizeMode, TradeoffCurve};
use crate::duality::{eps_at_delta, pld_eps_at_delta};
use crate::edgeworth::{edgeworth_delta, LossRVSpec};
use crate::error::{Error, Result};
use crate::pld::{curve_to_pld, pld_to_curve, LossModel, PrivacyLossDistribution, Rounding};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltFunctionals {
    pub kl: f64,
    pub kappa2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComposeMethod {
    ClosedForm,
    #[serde(rename = "FFT")]
    Fft,
    #[serde(rename = "CLT")]
    Clt,
    Edgeworth,
}

/// Bracketing curves of a composition with quality indicators.
///
/// `lower` is dominated by `upper`. For certified methods the true composed
/// curve lies between them; `diagnostics["certified"]` is 1 or 0.
#[derive(Debug, Clone)]
pub struct ComposeReport {
    pub lower: TradeoffCurve,
    pub upper: TradeoffCurve,
    pub method: ComposeMethod,
    pub diagnostics: BTreeMap<String, f64>,
    losses: Option<(PrivacyLossDistribution, PrivacyLossDistribution)>,
}

impl ComposeReport {
    /// `(eps_lower, eps_upper)` at `delta`.
    ///
    /// With loss distributions at hand the hockey-stick divergence is read
    /// from them directly, avoiding a second pass through the curve.
    pub fn eps_bounds(&self, delta: f64) -> Result<(f64, f64)> {
        match &self.losses {
            Some((pessimistic, optimistic)) => {
                Ok((pld_eps_at_delta(optimistic, delta)?, pld_eps_at_delta(pessimistic, delta)?))
            }
            None => Ok((eps_at_delta(&self.upper, delta)?, eps_at_delta(&self.lower, delta)?)),
        }
    }

    /// Pessimistic and optimistic composed loss distributions, when available.
    pub fn loss_distributions(&self) -> Option<(&PrivacyLossDistribution, &PrivacyLossDistribution)> {
        self.losses.as_ref().map(|(a, b)| (a, b))
    }
}

/// `sqrt(sum mu^2)`, the parameter of `G_mu1 (x) ... (x) G_mum`.
pub fn compose_gaussian(mus: &[f64]) -> Result<f64> {
    if mus.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::domain("Gaussian parameters must be finite and nonnegative"));
    }
    Ok(mus.iter().map(|m| m * m).sum::<f64>().sqrt())
}

/// Certified tensor composition by lattice convolution.
pub fn compose_tensor(curves: &[TradeoffCurve], cell: f64) -> Result<ComposeReport> {
    if curves.is_empty() {
        return Err(Error::domain("nothing to compose"));
    }
    if !(cell > 0.0) || !cell.is_finite() {
        return Err(Error::domain(format!("cell must be positive, got {cell}")));
    }
    // Equal curves are composed by repeated squaring.
    let mut groups: Vec<(&TradeoffCurve, u64)> = Vec::new();
    for c in curves {
        match groups.iter_mut().find(|(g, _)| *g == c) {
            Some((_, n)) => *n += 1,
            None => groups.push((c, 1)),
        }
    }
    let mut factors = Vec::with_capacity(groups.len());
    for (curve, count) in groups {
        let pessimistic = curve_to_pld(curve, cell, Rounding::Pessimistic)?;
        let optimistic = curve_to_pld(curve, cell, Rounding::Optimistic)?;
        factors.push((pessimistic, optimistic, count));
    }
    compose_losses(&factors, false)
}

/// Composes `(pessimistic, optimistic, multiplicity)` loss distributions
/// sharing one cell.
///
/// `direct` forces summation over transforms; see
/// [`PrivacyLossDistribution::convolve_direct`].
pub(crate) fn compose_losses(
    factors: &[(PrivacyLossDistribution, PrivacyLossDistribution, u64)],
    direct: bool,
) -> Result<ComposeReport> {
    let cell = factors.first().ok_or_else(|| Error::domain("nothing to compose"))?.0.cell();
    let mut pessimistic = PrivacyLossDistribution::identity(cell, Rounding::Pessimistic);
    let mut optimistic = PrivacyLossDistribution::identity(cell, Rounding::Optimistic);
    let mut m = 0;
    for (pess, opt, count) in factors {
        if direct {
            pessimistic = pessimistic.convolve_direct(&pess.self_convolve_direct(*count)?)?;
            optimistic = optimistic.convolve_direct(&opt.self_convolve_direct(*count)?)?;
        } else {
            pessimistic = pessimistic.convolve(&pess.self_convolve(*count)?)?;
            optimistic = optimistic.convolve(&opt.self_convolve(*count)?)?;
        }
        m += count;
    }
    Ok(fft_report(pessimistic, optimistic, m))
}

fn fft_report(pessimistic: PrivacyLossDistribution, optimistic: PrivacyLossDistribution, m: u64) -> ComposeReport {
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("cell".into(), pessimistic.cell());
    diagnostics.insert("certified".into(), 1.0);
    diagnostics.insert("compositions".into(), m as f64);
    diagnostics.insert("p_infinity".into(), pessimistic.p_infinity());
    diagnostics.insert("q_neg_infinity".into(), pessimistic.q_neg_infinity());
    diagnostics.insert("support".into(), pessimistic.mass_p().len() as f64);
    diagnostics.insert("roundoff".into(), pessimistic.roundoff().max(optimistic.roundoff()));
    diagnostics.insert("relative_roundoff".into(), pessimistic.relative_roundoff().max(optimistic.relative_roundoff()));
    ComposeReport {
        lower: widen(&pld_to_curve(&pessimistic), -pessimistic.mass_error()),
        upper: widen(&pld_to_curve(&optimistic), optimistic.mass_error()),
        method: ComposeMethod::Fft,
        diagnostics,
        losses: Some((pessimistic, optimistic)),
    }
}

/// `kl(f) = -int log(-f')` and `kappa2(f) = int log^2(-f')` over `[0, 1]`.
///
/// Flat pieces make both infinite.
pub fn clt_functionals(curve: &TradeoffCurve) -> CltFunctionals {
    if let CurveKind::Gaussian { mu } = *curve.kind() {
        let v = mu * mu;
        return CltFunctionals { kl: 0.5 * v, kappa2: v + 0.25 * v * v };
    }
    let (mut kl, mut kappa2) = (0.0, 0.0);
    for w in curve.working_knots().windows(2) {
        let width = w[1].0 - w[0].0;
        if width <= 0.0 {
            continue;
        }
        let drop = w[0].1 - w[1].1;
        if drop <= 0.0 {
            return CltFunctionals { kl: f64::INFINITY, kappa2: f64::INFINITY };
        }
        let log_slope = drop.ln() - width.ln();
        kl -= width * log_slope;
        kappa2 += width * log_slope * log_slope;
    }
    CltFunctionals { kl: kl.max(0.0), kappa2 }
}

/// Central-limit approximation `G_mu` with `mu = 2 sum kl / sqrt(sum kappa2)`.
pub fn clt_compose(curves: &[TradeoffCurve]) -> Result<ComposeReport> {
    let (mut kl, mut kappa2) = (0.0, 0.0);
    for c in curves {
        let f = clt_functionals(c);
        if !f.kl.is_finite() || !f.kappa2.is_finite() {
            return Err(Error::accounting(
                "a curve has a flat piece so its CLT functionals are infinite; use the FFT accountant",
            ));
        }
        kl += f.kl;
        kappa2 += f.kappa2;
    }
    let mu = if kappa2 > 0.0 { 2.0 * kl / kappa2.sqrt() } else { 0.0 };
    let curve = TradeoffCurve::gaussian(mu)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("certified".into(), 0.0);
    diagnostics.insert("kl_sum".into(), kl);
    diagnostics.insert("kappa2_sum".into(), kappa2);
    diagnostics.insert("mu".into(), mu);
    Ok(ComposeReport { lower: curve.clone(), upper: curve, method: ComposeMethod::Clt, diagnostics, losses: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DpsgdMethod {
    GdpLimit,
    Edgeworth,
    Fft,
}

/// Outcome of DP-SGD accounting.
#[derive(Debug, Clone)]
pub struct DpsgdResult {
    pub eps: f64,
    pub curve: TradeoffCurve,
    /// Set for the GDP limit.
    pub mu: Option<f64>,
    /// Certified `(lower, upper)` for the FFT method; `eps` is the upper one.
    pub eps_bracket: Option<(f64, f64)>,
}

/// Parameter of the Gaussian limit of DP-SGD: `p sqrt(T (e^{1/sigma^2} - 1))`.
pub fn dpsgd_gdp_mu(sigma: f64, p: f64, steps: u64) -> f64 {
    p * (steps as f64 * (1.0 / (sigma * sigma)).exp_m1()).sqrt()
}

const FFT_CELL: f64 = 1e-4;
const PROFILE_EPS: f64 = 20.0;
const PROFILE_POINTS: usize = 400;

/// Privacy of `T` steps of DP-SGD with sampling rate `p` and noise `sigma`.
pub fn dpsgd_account(sigma: f64, p: f64, steps: u64, method: DpsgdMethod, delta: f64) -> Result<DpsgdResult> {
    dpsgd_account_with_cell(sigma, p, steps, method, delta, FFT_CELL)
}

/// [`dpsgd_account`] with an explicit lattice cell for the FFT method.
pub fn dpsgd_account_with_cell(
    sigma: f64,
    p: f64,
    steps: u64,
    method: DpsgdMethod,
    delta: f64,
    cell: f64,
) -> Result<DpsgdResult> {
    if !(sigma > 0.0) || !sigma.is_finite() || !(0.0..=1.0).contains(&p) || steps == 0 {
        return Err(Error::domain("need sigma > 0, p in [0, 1] and at least one step"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    match method {
        DpsgdMethod::GdpLimit => {
            let mu = dpsgd_gdp_mu(sigma, p, steps);
            let curve = TradeoffCurve::gaussian(mu)?;
            Ok(DpsgdResult { eps: eps_at_delta(&curve, delta)?, curve, mu: Some(mu), eps_bracket: None })
        }
        DpsgdMethod::Fft => {
            let model = LossModel::SubsampledGaussian { mu: 1.0 / sigma, rate: p };
            let pess = PrivacyLossDistribution::from_model(model, cell, Rounding::Pessimistic)?.self_convolve(steps)?;
            let opt = PrivacyLossDistribution::from_model(model, cell, Rounding::Optimistic)?.self_convolve(steps)?;
            let upper = pld_eps_at_delta(&pess, delta)?;
            let lower = pld_eps_at_delta(&opt, delta)?;
            let curve = pld_to_curve(&pess).symmetrize(SymmetrizeMode::MinBiconjugate);
            Ok(DpsgdResult { eps: upper, curve, mu: None, eps_bracket: Some((lower, upper)) })
        }
        DpsgdMethod::Edgeworth => {
            let cumulants = LossRVSpec::SubsampledGaussianStep { p, sigma }.cumulants()?;
            let profile = |eps: f64| edgeworth_delta(&cumulants, steps, eps);
            let eps = bisect_profile(&profile, delta);
            Ok(DpsgdResult { eps, curve: curve_from_profile(&profile), mu: None, eps_bracket: None })
        }
    }
}

/// Smallest `eps` in `[0, 64]` with `profile(eps) <= delta`.
fn bisect_profile(profile: &dyn Fn(f64) -> f64, delta: f64) -> f64 {
    if profile(0.0) <= delta {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, crate::duality::EPS_CAP);
    if profile(hi) > delta {
        return f64::INFINITY;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if profile(mid) <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The curve implied by a symmetric privacy profile: the upper envelope of
/// `f_{eps, delta(eps)}` over a grid of `eps`.
fn curve_from_profile(profile: &dyn Fn(f64) -> f64) -> TradeoffCurve {
    let lines: Vec<(f64, f64)> = (0..=PROFILE_POINTS)
        .map(|i| {
            let eps = PROFILE_EPS * i as f64 / PROFILE_POINTS as f64;
            (eps, profile(eps))
        })
        .collect();
    let grid = crate::curve::alpha_grid(crate::curve::DEFAULT_GRID);
    let knots: Vec<(f64, f64)> = grid
        .iter()
        .map(|&a| {
            let beta = lines
                .iter()
                .map(|&(eps, d)| (1.0 - d - eps.exp() * a).max((-eps).exp() * (1.0 - d - a)))
                .fold(0.0, f64::max);
            (a, beta)
        })
        .collect();
    TradeoffCurve::from_knots_trusted(crate::curve::lower_hull(&knots), Some(true))
}
