use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FilterSpec;
use crate::simulate::CoefficientPanel;

use super::{adjust, solve, statistics, FeasiblePoint, StatisticsRow};

/// Estimates at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub j: usize,
    pub stats: StatisticsRow,
    pub point: FeasiblePoint,
    pub s0_hat: f64,
    pub alpha_hat: f64,
    /// `y2 / y1` of the adjusted point.
    pub q_j: f64,
}

/// A level left out of the estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedLevel {
    pub j: usize,
    pub reason: String,
}

/// Per-level estimates of a panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelEstimate {
    pub rows: Vec<EstimateResult>,
    pub skipped: Vec<SkippedLevel>,
}

impl PanelEstimate {
    /// Estimate at the largest scale that produced one.
    pub fn final_estimate(&self) -> Option<&EstimateResult> {
        self.rows.last()
    }
}

/// Adjusts and solves a row of statistics.
pub fn estimate_row(stats: StatisticsRow) -> Result<EstimateResult> {
    let point = adjust(stats.y1_raw, stats.y2_raw);
    let (s0_hat, alpha_hat) = solve(&point)?;
    Ok(EstimateResult {
        j: stats.j,
        stats,
        point,
        s0_hat,
        alpha_hat,
        q_j: point.y2 / point.y1,
    })
}

/// `(ŝ0_j, α̂_j)` for every level with a successor, using the filter's `c2`, `c3`.
///
/// Levels whose first statistic is zero are skipped and listed.
pub fn estimate(panel: &CoefficientPanel, filter: &FilterSpec) -> Result<PanelEstimate> {
    estimate_with_constants(panel, filter.c2(), filter.c3())
}

pub fn estimate_with_constants(panel: &CoefficientPanel, c2: f64, c3: f64) -> Result<PanelEstimate> {
    if panel.levels().len() < 2 {
        return Err(Error::domain("estimate", "the panel needs at least two levels"));
    }
    if !(c2 > 0.0 && c3 > 0.0) {
        return Err(Error::domain("estimate", "filter constants must be positive"));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for s in statistics(panel, c2, c3)? {
        if s.delta_bar == 0.0 {
            log::warn!("level {}: first statistic is zero, skipped", s.j);
            skipped.push(SkippedLevel {
                j: s.j,
                reason: "first statistic is zero".into(),
            });
            continue;
        }
        rows.push(estimate_row(s)?);
    }
    Ok(PanelEstimate { rows, skipped })
}

/// Column names of [`write_results_csv`].
pub const RESULT_COLUMNS: [&str; 11] = [
    "j",
    "a_j",
    "delta_bar",
    "ddelta",
    "y1_raw",
    "y2_raw",
    "y1_adj",
    "y2_adj",
    "case",
    "s0_hat",
    "alpha_hat",
];

pub(crate) fn result_fields(r: &EstimateResult) -> [String; 11] {
    [
        r.j.to_string(),
        r.stats.a_j.to_string(),
        r.stats.delta_bar.to_string(),
        r.stats.ddelta.to_string(),
        r.stats.y1_raw.to_string(),
        r.stats.y2_raw.to_string(),
        r.point.y1.to_string(),
        r.point.y2.to_string(),
        r.point.case_applied.to_string(),
        r.s0_hat.to_string(),
        r.alpha_hat.to_string(),
    ]
}

pub fn write_results_csv<W: Write>(rows: &[EstimateResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.write_record(result_fields(r))?;
    }
    w.flush()?;
    Ok(())
}
