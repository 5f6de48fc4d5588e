use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One scale of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Level index, starting at 1.
    pub j: usize,
    /// Scale `a_j`.
    pub a: f64,
    /// Shift spacing `γ_j`.
    pub gamma: f64,
    /// Number of shifts `m_j`.
    pub m: usize,
    /// Rate sequence `r_j`.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftRule {
    /// `b_jk = k·γ_j`, `k = 1..m_j`.
    #[default]
    Arithmetic,
}

/// The sequences `a_j`, `b_jk`, `m_j`, `γ_j`, `r_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSchedule {
    levels: Vec<Level>,
    pub shift_rule: ShiftRule,
}

impl ScaleSchedule {
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::domain("schedule", "at least one level is required"));
        }
        for l in &levels {
            if !(l.a.is_finite() && l.a > 0.0 && l.gamma.is_finite() && l.gamma > 0.0 && l.r > 0.0) {
                return Err(Error::domain(
                    "schedule",
                    format!("level {} has non-positive parameters", l.j),
                ));
            }
            if l.m == 0 {
                return Err(Error::domain("schedule", format!("level {} has no shifts", l.j)));
            }
        }
        for w in levels.windows(2) {
            if !(w[1].a > w[0].a) {
                return Err(Error::domain("schedule", "scales must be strictly increasing"));
            }
            if !(w[1].r < w[0].r) {
                return Err(Error::domain("schedule", "r_j must be strictly decreasing"));
            }
            if w[1].j != w[0].j + 1 {
                return Err(Error::domain("schedule", "level indices must be consecutive"));
            }
        }
        Ok(ScaleSchedule {
            levels,
            shift_rule: ShiftRule::Arithmetic,
        })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> Option<&Level> {
        self.levels.iter().find(|l| l.j == j)
    }

    /// Shifts `b_jk` of a level.
    pub fn shifts(level: &Level) -> Vec<f64> {
        (1..=level.m).map(|k| k as f64 * level.gamma).collect()
    }

    /// Caps every `m_j` at `cap`.
    pub fn with_m_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::domain("schedule", "m cap must be at least 1"));
        }
        for l in &mut self.levels {
            l.m = l.m.min(cap);
        }
        Ok(self)
    }
}

fn ceil_pow(a: f64, kappa: f64) -> usize {
    let x = a.powf(kappa);
    // Absorb round-off so exact integer powers are not bumped up by one.
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r.max(1.0) as usize
    } else {
        x.ceil().max(1.0) as usize
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::domain("schedule", format!("kappa = {kappa} must be positive")));
    }
    Ok(())
}

/// `a_j = j`, `γ_j = 1`, `r_j = j^{-2.5}`, `m_j = ⌈j^κ⌉` for `j = 1..=j_max`.
pub fn paper_schedule(j_max: usize, kappa: f64) -> Result<ScaleSchedule> {
    if j_max < 2 {
        return Err(Error::domain("paper_schedule", "j_max must be at least 2"));
    }
    check_kappa(kappa)?;
    let levels = (1..=j_max)
        .map(|j| {
            let a = j as f64;
            Level {
                j,
                a,
                gamma: 1.0,
                m: ceil_pow(a, kappa),
                r: a.powf(-2.5),
            }
        })
        .collect();
    ScaleSchedule::new(levels)
}

/// `a_j = a0·ρ^j`, `γ_j = a_j`, `r_j = a_j^{-2.5}`, `m_j = ⌈a_j^κ⌉` for `j = 1..=j_max`.
///
/// Logs a warning when `κ ≤ 5`, where `Σ 1/(r_j² m_j)` diverges.
pub fn geometric_schedule(j_max: usize, a0: f64, rho: f64, kappa: f64) -> Result<ScaleSchedule> {
    if j_max == 0 {
        return Err(Error::domain("geometric_schedule", "j_max must be at least 1"));
    }
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::domain("geometric_schedule", "a0 must be positive"));
    }
    if !(rho.is_finite() && rho > 1.0) {
        return Err(Error::domain(
            "geometric_schedule",
            format!("rho = {rho} must exceed 1"),
        ));
    }
    check_kappa(kappa)?;
    if kappa <= 5.0 {
        log::warn!("kappa = {kappa} <= 5: the summability condition on 1/(r_j^2 m_j) fails");
    }
    let levels = (1..=j_max)
        .map(|j| {
            let a = a0 * rho.powi(j as i32);
            Level {
                j,
                a,
                gamma: a,
                m: ceil_pow(a, kappa),
                r: a.powf(-2.5),
            }
        })
        .collect();
    ScaleSchedule::new(levels)
}

/// Schedule family in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleRule {
    Paper,
    Geometric,
}

/// Shift spacing choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMode {
    /// `γ_j = 1`.
    Unit,
    /// `γ_j = a_j`.
    Scale,
}

fn default_kappa() -> f64 {
    3.0
}

/// JSON form of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub rule: ScheduleRule,
    pub j_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Defaults to `unit` for the paper rule and `scale` for the geometric rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_mode: Option<GammaMode>,
    /// Upper bound on every `m_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<ScaleSchedule> {
        let mut s = match self.rule {
            ScheduleRule::Paper => paper_schedule(self.j_max, self.kappa)?,
            ScheduleRule::Geometric => geometric_schedule(
                self.j_max,
                self.a0
                    .ok_or_else(|| Error::Config("geometric schedule requires 'a0'".into()))?,
                self.rho
                    .ok_or_else(|| Error::Config("geometric schedule requires 'rho'".into()))?,
                self.kappa,
            )?,
        };
        if let Some(mode) = self.gamma_mode {
            for l in &mut s.levels {
                l.gamma = match mode {
                    GammaMode::Unit => 1.0,
                    GammaMode::Scale => l.a,
                };
            }
        }
        if let Some(cap) = self.m_max {
            s = s.with_m_cap(cap)?;
        }
        Ok(s)
    }
}
