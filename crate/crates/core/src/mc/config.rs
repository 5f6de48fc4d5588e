use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Family, FilterConfig, ModelConfig};
use crate::specfun::QuadratureSpec;
use crate::transform::{GammaMode, ScheduleConfig, ScheduleRule};

/// How coefficients are produced in each replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Simulate a Gegenbauer path and transform it.
    PathTransform,
    /// Draw coefficients from their exact Gaussian law.
    ExactGaussian,
}

fn default_dt() -> f64 {
    1.0
}

fn default_quadrature() -> QuadratureSpec {
    QuadratureSpec::new(1e-12, 1e-11).with_max_subdivisions(200_000)
}

/// A Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub schedule: ScheduleConfig,
    pub backend: Backend,
    pub replications: usize,
    /// Replication `i` uses seed `base_seed + i`.
    #[serde(default)]
    pub base_seed: u64,
    /// Grid step of simulated paths.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Settings for covariance quadrature (exact backend).
    #[serde(default = "default_quadrature")]
    pub quadrature: QuadratureSpec,
}

impl ExperimentConfig {
    /// Desk-scale exact-Gaussian run: indicator model with `s0 = arccos(0.3)`,
    /// `α = 0.1`, `M = π`, Mexican hat, `a ∈ {8, 16, 32, 64}`,
    /// `m_j = min(a_j³, 4096)`, 20 replications.
    pub fn desk() -> Self {
        ExperimentConfig {
            model: ModelConfig {
                family: Family::Indicator,
                s0: Some(0.3f64.acos()),
                alpha: Some(0.1),
                m: Some(std::f64::consts::PI),
                d: None,
                u: None,
                sigma_eps: 1.0,
                truncation: 40,
                filter: FilterConfig::default(),
            },
            schedule: ScheduleConfig {
                rule: ScheduleRule::Geometric,
                j_max: 4,
                a0: Some(4.0),
                rho: Some(2.0),
                kappa: 3.0,
                gamma_mode: Some(GammaMode::Scale),
                m_max: Some(4096),
            },
            backend: Backend::ExactGaussian,
            replications: 20,
            base_seed: 20_240_601,
            dt: 1.0,
            quadrature: default_quadrature(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config("dt must be positive".into()));
        }
        if self.base_seed.checked_add(self.replications as u64).is_none() {
            return Err(Error::Config("base_seed + replications overflows".into()));
        }
        self.quadrature.validate()?;
        Ok(())
    }

    /// Seed of replication `i`.
    pub fn seed(&self, i: usize) -> u64 {
        self.base_seed + i as u64
    }
}
