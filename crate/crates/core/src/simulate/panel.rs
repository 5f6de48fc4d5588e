use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a panel was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PathTransform,
    ExactGaussian,
}

/// Coefficients `δ_jk` of one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelLevel {
    pub j: usize,
    pub a: f64,
    pub shifts: Vec<f64>,
    pub coeffs: Vec<f64>,
}

/// Filter coefficients at every level of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPanel {
    levels: Vec<PanelLevel>,
    pub provenance: Provenance,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    j: usize,
    k: usize,
    a_j: f64,
    b_jk: f64,
    delta_jk: f64,
}

impl CoefficientPanel {
    pub fn new(levels: Vec<PanelLevel>, provenance: Provenance, seed: u64) -> Result<Self> {
        for l in &levels {
            if l.coeffs.is_empty() || l.coeffs.len() != l.shifts.len() {
                return Err(Error::domain(
                    "panel",
                    format!(
                        "level {} has {} shifts and {} coefficients",
                        l.j,
                        l.shifts.len(),
                        l.coeffs.len()
                    ),
                ));
            }
            if l.shifts.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::domain(
                    "panel",
                    format!("shifts of level {} are not increasing", l.j),
                ));
            }
        }
        if levels.windows(2).any(|w| !(w[1].a > w[0].a)) {
            return Err(Error::domain("panel", "scales must be strictly increasing"));
        }
        Ok(CoefficientPanel {
            levels,
            provenance,
            seed,
        })
    }

    pub fn levels(&self) -> &[PanelLevel] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> Result<&PanelLevel> {
        self.levels.iter().find(|l| l.j == j).ok_or(Error::MissingLevel(j))
    }

    /// Writes `j,k,a_j,b_jk,delta_jk` rows (`k` counts from 1).
    pub fn to_writer<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for l in &self.levels {
            for (i, (&b, &d)) in l.shifts.iter().zip(&l.coeffs).enumerate() {
                w.serialize(Row {
                    j: l.j,
                    k: i + 1,
                    a_j: l.a,
                    b_jk: b,
                    delta_jk: d,
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_writer(std::fs::File::create(path)?)
    }

    pub fn read_csv(path: &Path, provenance: Provenance, seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut by_level: BTreeMap<usize, PanelLevel> = BTreeMap::new();
        for row in r.deserialize::<Row>() {
            let row = row?;
            let level = by_level.entry(row.j).or_insert_with(|| PanelLevel {
                j: row.j,
                a: row.a_j,
                shifts: Vec::new(),
                coeffs: Vec::new(),
            });
            if level.a != row.a_j {
                return Err(Error::domain("panel", format!("level {} mixes scales", row.j)));
            }
            level.shifts.push(row.b_jk);
            level.coeffs.push(row.delta_jk);
        }
        Self::new(by_level.into_values().collect(), provenance, seed)
    }
}
