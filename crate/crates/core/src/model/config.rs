use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{builtin_filter, FilterSpec, GegenbauerSpec, SpectralModel};

/// Spectral family selected in a model configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `|λ² − s0²|^{-2α}` on `[-M, M]`.
    Indicator,
    /// Gegenbauer process with `s0 = arccos(u)`, `α = d`.
    Gegenbauer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            name: "mexican-hat".into(),
            sigma: Some(1.0),
        }
    }
}

impl FilterConfig {
    pub fn build(&self) -> Result<FilterSpec> {
        builtin_filter(&self.name, self.sigma)
    }
}

fn default_sigma_eps() -> f64 {
    1.0
}

fn default_truncation() -> usize {
    40
}

/// JSON form of a model and filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Cutoff of the indicator family.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default = "default_sigma_eps")]
    pub sigma_eps: f64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub filter: FilterConfig,
}

impl ModelConfig {
    /// The Gegenbauer setting `d = 0.1`, `u = 0.3`, 40 terms, Mexican hat with `σ = 1`.
    pub fn gegenbauer_default() -> Self {
        ModelConfig {
            family: Family::Gegenbauer,
            s0: None,
            alpha: None,
            m: None,
            d: Some(0.1),
            u: Some(0.3),
            sigma_eps: 1.0,
            truncation: 40,
            filter: FilterConfig::default(),
        }
    }

    fn need(v: Option<f64>, key: &str, family: &str) -> Result<f64> {
        v.ok_or_else(|| Error::Config(format!("family '{family}' requires '{key}'")))
    }

    pub fn spectral_model(&self) -> Result<SpectralModel> {
        match self.family {
            Family::Indicator => SpectralModel::indicator(
                Self::need(self.s0, "s0", "indicator")?,
                Self::need(self.alpha, "alpha", "indicator")?,
                Self::need(self.m, "M", "indicator")?,
            ),
            Family::Gegenbauer => self.gegenbauer_spec()?.spectral_model(),
        }
    }

    pub fn gegenbauer_spec(&self) -> Result<GegenbauerSpec> {
        if self.family != Family::Gegenbauer {
            return Err(Error::Config("a moving-average path needs family 'gegenbauer'".into()));
        }
        GegenbauerSpec::new(
            Self::need(self.d, "d", "gegenbauer")?,
            Self::need(self.u, "u", "gegenbauer")?,
            self.sigma_eps,
            self.truncation,
        )
    }

    pub fn filter_spec(&self) -> Result<FilterSpec> {
        self.filter.build()
    }

    /// True parameters `(s0, α)`.
    pub fn targets(&self) -> Result<(f64, f64)> {
        let m = self.spectral_model()?;
        Ok((m.s0, m.alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_indicator() {
        let cfg: ModelConfig = serde_json::from_str(
            r#"{"family":"indicator","s0":1.5,"alpha":0.1,"M":3,"filter":{"name":"shannon-father"}}"#,
        )
        .unwrap();
        let m = cfg.spectral_model().unwrap();
        assert_eq!(m.cutoff(), Some(3.0));
        assert_eq!(cfg.filter_spec().unwrap().name, "shannon-father");
        assert!(cfg.gegenbauer_spec().is_err());
    }

    #[test]
    fn parses_gegenbauer_with_defaults() {
        let cfg: ModelConfig = serde_json::from_str(r#"{"family":"gegenbauer","d":0.1,"u":0.3}"#).unwrap();
        assert_eq!(cfg, ModelConfig::gegenbauer_default());
        let (s0, a) = cfg.targets().unwrap();
        assert!((s0 - 0.3f64.acos()).abs() < 1e-15);
        assert_eq!(a, 0.1);
    }

    #[test]
    fn missing_and_unknown_keys() {
        let cfg: ModelConfig = serde_json::from_str(r#"{"family":"indicator","s0":1.5}"#).unwrap();
        assert!(matches!(cfg.spectral_model(), Err(Error::Config(_))));
        assert!(serde_json::from_str::<ModelConfig>(r#"{"family":"indicator","bogus":1}"#).is_err());
        assert!(serde_json::from_str::<ModelConfig>(r#"{"family":"arma"}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = ModelConfig::gegenbauer_default();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: ModelConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
    }
}
