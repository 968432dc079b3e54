//! Composition of many discrete Gaussian counting queries.
//!
//! Query `i` releases a count plus `N_Z(0, sigma_i^2)` noise; neighbouring
//! databases shift the count by one. Its loss at outcome `x` is
//! `(1 - 2x) / (2 sigma_i^2)`, so with a common `sigma` every loss sits on
//! a lattice of spacing `1 / (2 sigma^2)` and the composition is exact up
//! to round-off once the cell divides that spacing.

use crate::account::{compose_losses, ComposeReport};
use crate::duality::eps_at_delta;
use crate::error::{Error, Result};
use crate::mech::{discrete_gaussian_curve, discrete_gaussian_discarded, discrete_gaussian_pmf, discrete_gaussian_radius, TRUNCATION_BUDGET};
use crate::pld::{PrivacyLossDistribution, Rounding};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationRow {
    pub level: String,
    pub query: String,
    pub sigma: f64,
}

/// Noise scales of the released queries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AllocationTable {
    rows: Vec<AllocationRow>,
}

impl AllocationTable {
    pub fn new(rows: Vec<AllocationRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for row in &rows {
            if !(row.sigma > 0.0) || !row.sigma.is_finite() {
                return Err(Error::domain(format!("sigma for {}/{} must be positive", row.level, row.query)));
            }
            if !seen.insert((row.level.as_str(), row.query.as_str())) {
                return Err(Error::domain(format!("duplicate row {}/{}", row.level, row.query)));
            }
        }
        Ok(Self { rows })
    }

    /// `m` queries with the same `sigma`, labelled by index.
    pub fn uniform(m: usize, sigma: f64) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|i| AllocationRow { level: format!("level{}", i / 9), query: format!("query{}", i % 9), sigma })
                .collect(),
        )
    }

    /// Reads CSV with header `level,query,sigma`.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let headers = csv.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["level", "query", "sigma"] {
            return Err(Error::Parse(format!("expected header level,query,sigma, found {headers:?}")));
        }
        let rows = csv
            .deserialize()
            .collect::<std::result::Result<Vec<AllocationRow>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(rows)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn rows(&self) -> &[AllocationRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Table without the row at `index`.
    pub fn without(&self, index: usize) -> Self {
        let mut rows = self.rows.clone();
        rows.remove(index);
        Self { rows }
    }
}

/// Certified `(eps_lower, eps_upper)` of a census release at one `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub eps_lower: f64,
    pub eps_upper: f64,
    pub delta: f64,
    pub m: usize,
    pub method: String,
    pub cell: f64,
}

#[derive(Debug, Clone)]
pub struct CensusResult {
    pub summary: CensusSummary,
    pub report: ComposeReport,
}

/// Loss spacing `1 / (2 sigma^2)` shrunk to at most `cell` by an integer factor.
pub fn aligned_cell(sigma: f64, cell: f64) -> f64 {
    let spacing = 0.5 / (sigma * sigma);
    spacing / (spacing / cell).ceil()
}

/// Both roundings of the discrete Gaussian loss distribution of one query.
fn query_losses(sigma: f64, cell: f64) -> Result<(PrivacyLossDistribution, PrivacyLossDistribution)> {
    let radius = discrete_gaussian_radius(sigma, 1);
    let discarded = discrete_gaussian_discarded(sigma, 1, radius);
    if discarded >= TRUNCATION_BUDGET {
        return Err(Error::accounting(format!("discrete Gaussian truncation lost {discarded:e}")));
    }
    let p = discrete_gaussian_pmf(sigma, 0, radius)?;
    let q = discrete_gaussian_pmf(sigma, 1, radius)?;
    let atoms: Vec<(f64, f64, f64)> = p
        .support()
        .iter()
        .zip(p.mass().iter().zip(q.mass()))
        .map(|(&x, (&a, &b))| ((1.0 - 2.0 * x as f64) / (2.0 * sigma * sigma), a, b))
        .collect();
    Ok((
        PrivacyLossDistribution::from_atoms(&atoms, cell, Rounding::Pessimistic)?,
        PrivacyLossDistribution::from_atoms(&atoms, cell, Rounding::Optimistic)?,
    ))
}

/// Composes the table's queries and converts both bounds at `delta`.
///
/// With a single noise scale the cell is shrunk to divide the loss spacing,
/// which makes the lattice exact.
pub fn census_compose(table: &AllocationTable, delta: f64, cell: f64) -> Result<CensusResult> {
    if table.is_empty() {
        return Err(Error::domain("allocation table is empty"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(cell > 0.0) || !cell.is_finite() {
        return Err(Error::domain(format!("cell must be positive, got {cell}")));
    }
    let mut groups: Vec<(f64, u64)> = Vec::new();
    for row in table.rows() {
        match groups.iter_mut().find(|g| g.0 == row.sigma) {
            Some(g) => g.1 += 1,
            None => groups.push((row.sigma, 1)),
        }
    }
    let cell = if groups.len() == 1 { aligned_cell(groups[0].0, cell) } else { cell };
    let mut factors = Vec::with_capacity(groups.len());
    for &(sigma, count) in &groups {
        let (pessimistic, optimistic) = query_losses(sigma, cell)?;
        factors.push((pessimistic, optimistic, count));
    }
    let report = compose_losses(&factors, groups.len() == 1)?;
    let (eps_lower, eps_upper) = if table.len() == 1 {
        // one query needs no composition: read the exact curve directly
        let eps = eps_at_delta(&discrete_gaussian_curve(groups[0].0, 1)?, delta)?;
        (eps, eps)
    } else {
        report.eps_bounds(delta)?
    };
    let summary = CensusSummary { eps_lower, eps_upper, delta, m: table.len(), method: "FFT".into(), cell };
    Ok(CensusResult { summary, report })
}
