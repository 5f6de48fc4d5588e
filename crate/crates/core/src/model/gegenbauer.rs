use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gegenbauer_coeffs;

use super::SpectralModel;

/// Parameters of the truncated Gegenbauer moving average
/// `X(t) = Σ_{n<truncation} C_n^{(d)}(u) ε_{t−n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GegenbauerSpec {
    /// Fractional exponent, equal to `α`.
    pub d: f64,
    /// Cosine of the Gegenbauer frequency.
    pub u: f64,
    /// Standard deviation of the innovations.
    pub sigma_eps: f64,
    /// Number of moving-average terms.
    pub truncation: usize,
}

impl GegenbauerSpec {
    pub fn new(d: f64, u: f64, sigma_eps: f64, truncation: usize) -> Result<Self> {
        let spec = GegenbauerSpec {
            d,
            u,
            sigma_eps,
            truncation,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d < 0.5) {
            return Err(Error::domain(
                "gegenbauer spec",
                format!("d = {} must lie in (0, 1/2)", self.d),
            ));
        }
        if !(self.u.abs() < 1.0) {
            return Err(Error::domain(
                "gegenbauer spec",
                format!("|u| = {} must be below 1", self.u.abs()),
            ));
        }
        if !(self.sigma_eps >= 0.0 && self.sigma_eps.is_finite()) {
            return Err(Error::domain("gegenbauer spec", "sigma_eps must be non-negative"));
        }
        if self.truncation == 0 {
            return Err(Error::domain("gegenbauer spec", "truncation must be at least 1"));
        }
        Ok(())
    }

    /// Gegenbauer frequency `ν = arccos(u)`.
    pub fn nu(&self) -> f64 {
        self.u.acos()
    }

    /// MA weights `C_0, ..., C_{truncation−1}`.
    pub fn coefficients(&self) -> Result<Vec<f64>> {
        gegenbauer_coeffs(self.truncation, self.d, self.u)
    }

    /// Variance of the truncated process, `σ_ε² Σ C_n²`.
    pub fn variance(&self) -> Result<f64> {
        let c = self.coefficients()?;
        Ok(self.sigma_eps * self.sigma_eps * c.iter().map(|x| x * x).sum::<f64>())
    }

    /// Spectral model with `s0 = ν`, `α = d` and the normalized Gegenbauer factor.
    pub fn spectral_model(&self) -> Result<SpectralModel> {
        SpectralModel::gegenbauer(self.d, self.u)
    }
}
