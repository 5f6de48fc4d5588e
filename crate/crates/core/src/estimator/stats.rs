use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::CoefficientPanel;

/// First and second statistics at one level, raw and normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticsRow {
    pub j: usize,
    pub a_j: f64,
    /// Mean of `δ_jk²` at level `j`.
    pub delta_bar: f64,
    /// Same at level `j + 1`.
    pub delta_bar_next: f64,
    /// `(δ̄_j − δ̄_{j+1}) / (a_j^{-2} − a_{j+1}^{-2})`.
    pub ddelta: f64,
    /// `δ̄_j / c2`.
    pub y1_raw: f64,
    /// `Δδ̄_j / c3`.
    pub y2_raw: f64,
}

/// Mean of the squared coefficients at level `j`.
pub fn first_statistic(panel: &CoefficientPanel, j: usize) -> Result<f64> {
    let level = panel.level(j)?;
    let n = level.coeffs.len() as f64;
    Ok(level.coeffs.iter().map(|d| d * d).sum::<f64>() / n)
}

/// `(δ̄_j − δ̄_{j+1}) / (a_j^{-2} − a_{j+1}^{-2})`.
pub fn second_statistic(delta_j: f64, delta_j1: f64, a_j: f64, a_j1: f64) -> Result<f64> {
    if !(a_j > 0.0 && a_j1 > a_j) {
        return Err(Error::domain(
            "second_statistic",
            format!("scales must satisfy 0 < a_j < a_j+1, got {a_j} and {a_j1}"),
        ));
    }
    Ok((delta_j - delta_j1) / (a_j.powi(-2) - a_j1.powi(-2)))
}

/// Statistics for every level that has a successor.
pub fn statistics(panel: &CoefficientPanel, c2: f64, c3: f64) -> Result<Vec<StatisticsRow>> {
    let levels = panel.levels();
    let means: Vec<f64> = levels
        .iter()
        .map(|l| first_statistic(panel, l.j))
        .collect::<Result<_>>()?;
    levels
        .windows(2)
        .zip(means.windows(2))
        .map(|(l, d)| {
            let ddelta = second_statistic(d[0], d[1], l[0].a, l[1].a)?;
            Ok(StatisticsRow {
                j: l[0].j,
                a_j: l[0].a,
                delta_bar: d[0],
                delta_bar_next: d[1],
                ddelta,
                y1_raw: d[0] / c2,
                y2_raw: ddelta / c3,
            })
        })
        .collect()
}
