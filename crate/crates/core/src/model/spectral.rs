use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::specfun::{integrate, QuadratureSpec};

/// User-supplied smooth factor `h`.
pub type FactorFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The smooth factor `h(λ)` of a spectral density.
#[derive(Clone)]
pub enum Factor {
    /// `h = 1` on `[-cutoff, cutoff]`, zero outside.
    Indicator { cutoff: f64 },
    /// Factor that turns `|λ² − ν²|^{-2d}` into the density of a Gegenbauer
    /// process on the integers, normalized so that `h(0) = 1`. Supported on `[-π, π]`.
    Gegenbauer { u: f64, d: f64 },
    /// Arbitrary even non-negative factor.
    Custom {
        h: FactorFn,
        /// Support bound; `None` means the whole line.
        cutoff: Option<f64>,
        /// Decay exponent `p` in `h(λ) = O(|λ|^{-p})`, used for the integrability check.
        envelope: f64,
        /// Points where `h` is not smooth.
        breakpoints: Vec<f64>,
    },
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Indicator { cutoff } => f.debug_struct("Indicator").field("cutoff", cutoff).finish(),
            Factor::Gegenbauer { u, d } => f.debug_struct("Gegenbauer").field("u", u).field("d", d).finish(),
            Factor::Custom {
                cutoff,
                envelope,
                breakpoints,
                ..
            } => f
                .debug_struct("Custom")
                .field("cutoff", cutoff)
                .field("envelope", envelope)
                .field("breakpoints", breakpoints)
                .finish_non_exhaustive(),
        }
    }
}

/// Spectral density `f(λ) = h(λ) / |λ² − s0²|^{2α}`.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    /// Location of the pole, `s0 > 1`.
    pub s0: f64,
    /// Long-memory exponent in `(0, 1/2)`.
    pub alpha: f64,
    pub factor: Factor,
}

impl SpectralModel {
    pub fn new(s0: f64, alpha: f64, factor: Factor) -> Result<Self> {
        if !(s0.is_finite() && s0 > 1.0) {
            return Err(Error::domain("spectral model", format!("s0 = {s0} must exceed 1")));
        }
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::domain(
                "spectral model",
                format!("alpha = {alpha} must lie in (0, 1/2)"),
            ));
        }
        match &factor {
            Factor::Indicator { cutoff } if !(cutoff.is_finite() && *cutoff > 0.0) => {
                return Err(Error::domain("spectral model", "indicator cutoff must be positive"));
            }
            Factor::Gegenbauer { u, d } => {
                if !(u.abs() < 1.0) || !(*d > 0.0 && *d < 0.5) {
                    return Err(Error::domain(
                        "spectral model",
                        "gegenbauer factor needs |u| < 1 and d in (0, 1/2)",
                    ));
                }
                let nu = u.acos();
                if (nu - s0).abs() > 1e-12 * s0 || (d - alpha).abs() > 1e-12 {
                    return Err(Error::domain(
                        "spectral model",
                        "gegenbauer factor requires s0 = arccos(u) and alpha = d",
                    ));
                }
            }
            Factor::Custom { cutoff: Some(c), .. } if !(c.is_finite() && *c > 0.0) => {
                return Err(Error::domain("spectral model", "custom cutoff must be positive"));
            }
            _ => {}
        }
        Ok(SpectralModel { s0, alpha, factor })
    }

    /// Indicator model `|λ² − s0²|^{-2α}` on `[-m, m]`.
    pub fn indicator(s0: f64, alpha: f64, m: f64) -> Result<Self> {
        Self::new(s0, alpha, Factor::Indicator { cutoff: m })
    }

    /// Normalized density of the Gegenbauer process with parameters `(d, u)`.
    ///
    /// `u` must satisfy `arccos(u) > 1`, i.e. `u < cos 1`.
    pub fn gegenbauer(d: f64, u: f64) -> Result<Self> {
        if !(u.abs() < 1.0) {
            return Err(Error::domain(
                "spectral model",
                format!("|u| = {} must be below 1", u.abs()),
            ));
        }
        Self::new(u.acos(), d, Factor::Gegenbauer { u, d })
    }

    /// Support bound of `h`, or `None` for the whole line.
    pub fn cutoff(&self) -> Option<f64> {
        match &self.factor {
            Factor::Indicator { cutoff } => Some(*cutoff),
            Factor::Gegenbauer { .. } => Some(std::f64::consts::PI),
            Factor::Custom { cutoff, .. } => *cutoff,
        }
    }

    /// Points in `[0, ∞)` where the density is singular.
    pub fn singularities(&self) -> Vec<f64> {
        match self.cutoff() {
            Some(c) if c < self.s0 => Vec::new(),
            _ => vec![self.s0],
        }
    }

    /// Non-negative points where `h` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(c) = self.cutoff() {
            out.push(c);
        }
        if let Factor::Custom { breakpoints, .. } = &self.factor {
            out.extend(breakpoints.iter().map(|b| b.abs()));
        }
        out
    }

    /// The smooth factor `h(λ)`.
    pub fn h(&self, lambda: f64) -> f64 {
        let l = lambda.abs();
        if let Some(c) = self.cutoff() {
            if l > c {
                return 0.0;
            }
        }
        match &self.factor {
            Factor::Indicator { .. } => 1.0,
            Factor::Gegenbauer { u, d } => {
                let nu = u.acos();
                let ratio = |x: f64| {
                    let gap = x - nu;
                    if gap.abs() < 1e-7 {
                        nu / nu.sin()
                    } else {
                        (x * x - nu * nu).abs() / (2.0 * cos_gap(x, nu).abs())
                    }
                };
                (ratio(l) / ratio(0.0)).powf(2.0 * d)
            }
            Factor::Custom { h, .. } => h(lambda),
        }
    }

    /// Sampled sanity checks on `h`; returns human-readable warnings.
    pub fn validate(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let h0 = self.h(0.0);
        if (h0 - 1.0).abs() > 1e-9 {
            warnings.push(format!("h(0) = {h0}, expected 1"));
        }
        let top = self.cutoff().unwrap_or(4.0 * self.s0);
        for i in 1..=200 {
            let l = top * i as f64 / 200.0;
            let (hp, hm) = (self.h(l), self.h(-l));
            if !(hp >= 0.0 && hm >= 0.0) {
                warnings.push(format!("h is negative or undefined near lambda = {l}"));
                break;
            }
            if (hp - hm).abs() > 1e-12 * hp.abs().max(1.0) {
                warnings.push(format!("h is not even at lambda = {l}"));
                break;
            }
        }
        if let Factor::Custom {
            cutoff: None, envelope, ..
        } = &self.factor
        {
            if envelope + 4.0 * self.alpha <= 1.0 {
                warnings.push(format!(
                    "density may not be integrable: envelope {envelope} + 4 alpha <= 1"
                ));
            }
        }
        warnings
    }
}

/// `cos x − cos ν` without cancellation near `x = ν`.
fn cos_gap(x: f64, nu: f64) -> f64 {
    -2.0 * (0.5 * (x + nu)).sin() * (0.5 * (x - nu)).sin()
}

/// Evaluates `f(λ) = h(λ) / |λ² − s0²|^{2α}`.
pub fn density_eval(model: &SpectralModel, lambda: f64) -> Result<f64> {
    if lambda.is_nan() {
        return Err(Error::domain("density_eval", "lambda is NaN"));
    }
    let l = lambda.abs();
    if l == model.s0 {
        return Err(Error::Singularity { lambda });
    }
    if let Some(c) = model.cutoff() {
        if l > c {
            return Ok(0.0);
        }
    }
    let value = match &model.factor {
        Factor::Gegenbauer { u, d } => {
            let nu = u.acos();
            let norm = (nu * nu / (2.0 * (1.0 - u))).powf(-2.0 * d);
            norm * (2.0 * cos_gap(l, nu).abs()).powf(-2.0 * d)
        }
        _ => model.h(lambda) * (l * l - model.s0 * model.s0).abs().powf(-2.0 * model.alpha),
    };
    Ok(value)
}

pub(crate) fn density_unchecked(model: &SpectralModel, lambda: f64) -> f64 {
    density_eval(model, lambda).unwrap_or(0.0)
}

/// Covariance `B(r) = ∫ cos(rλ) f(λ) dλ` over the real line.
pub fn covariance_eval(model: &SpectralModel, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    let hi = model.cutoff().unwrap_or(f64::INFINITY);
    let q = spec
        .clone()
        .with_singularities(model.singularities())
        .with_breakpoints(model.breakpoints());
    let half = integrate(|l| (r * l).cos() * density_unchecked(model, l), 0.0, hi, &q)?;
    Ok(2.0 * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_at_zero() {
        let m = SpectralModel::indicator(2.0, 0.25, 3.0).unwrap();
        assert!((density_eval(&m, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn indicator_vanishes_outside_support() {
        let m = SpectralModel::indicator(1.5, 0.1, 3.0).unwrap();
        assert_eq!(density_eval(&m, 3.5).unwrap(), 0.0);
        assert_eq!(density_eval(&m, -7.0).unwrap(), 0.0);
        assert!(density_eval(&m, 2.9).unwrap() > 0.0);
    }

    #[test]
    fn pole_is_an_error_and_values_grow_toward_it() {
        let m = SpectralModel::indicator(1.5, 0.1, 3.0).unwrap();
        assert!(matches!(density_eval(&m, 1.5), Err(Error::Singularity { .. })));
        assert!(matches!(density_eval(&m, -1.5), Err(Error::Singularity { .. })));
        let mut last = 0.0;
        for k in 1..=12 {
            let v = density_eval(&m, 1.5 - 10f64.powi(-k)).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn density_is_even() {
        let m = SpectralModel::gegenbauer(0.1, 0.3).unwrap();
        for i in 0..100 {
            let l = -3.2 + 0.0641 * i as f64;
            let (a, b) = (density_eval(&m, l).unwrap(), density_eval(&m, -l).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(SpectralModel::indicator(0.9, 0.1, 3.0).is_err());
        assert!(SpectralModel::indicator(1.5, 0.5, 3.0).is_err());
        assert!(SpectralModel::indicator(1.5, 0.1, -1.0).is_err());
        assert!(SpectralModel::gegenbauer(0.1, 0.9).is_err());
        assert!(SpectralModel::new(1.5, 0.1, Factor::Gegenbauer { u: 0.3, d: 0.1 }).is_err());
    }

    #[test]
    fn gegenbauer_factor_is_normalized_and_matches_density() {
        let m = SpectralModel::gegenbauer(0.1, 0.3).unwrap();
        assert!(m.validate().is_empty(), "{:?}", m.validate());
        assert!((m.h(0.0) - 1.0).abs() < 1e-15);
        for &l in &[0.1, 0.7, 1.2, 1.3, 2.0, 3.0] {
            let direct = m.h(l) * (l * l - m.s0 * m.s0).abs().powf(-2.0 * m.alpha);
            let f = density_eval(&m, l).unwrap();
            assert!((direct - f).abs() < 1e-12 * f, "lambda = {l}");
        }
        assert!((density_eval(&m, 0.0).unwrap() - m.s0.powf(-4.0 * m.alpha)).abs() < 1e-14);
    }

    #[test]
    fn custom_factor_warnings() {
        let bad = SpectralModel::new(
            1.5,
            0.1,
            Factor::Custom {
                h: Arc::new(|l: f64| 2.0 + l),
                cutoff: None,
                envelope: 0.0,
                breakpoints: vec![],
            },
        )
        .unwrap();
        let w = bad.validate();
        assert!(w.iter().any(|s| s.contains("h(0)")));
        assert!(w.iter().any(|s| s.contains("even")));
        assert!(w.iter().any(|s| s.contains("integrable")));
    }

    #[test]
    fn covariance_is_even_and_bounded() {
        let m = SpectralModel::indicator(1.5, 0.1, 3.0).unwrap();
        let spec = QuadratureSpec::default();
        let b0 = covariance_eval(&m, 0.0, &spec).unwrap();
        for &r in &[0.5, 1.0, 3.0, 10.0] {
            let bp = covariance_eval(&m, r, &spec).unwrap();
            let bm = covariance_eval(&m, -r, &spec).unwrap();
            assert!((bp - bm).abs() < 1e-12);
            assert!(bp.abs() <= b0);
        }
    }

    #[test]
    fn covariance_with_unbounded_custom_factor() {
        // h = exp(-λ²) keeps the density integrable on the whole line.
        let m = SpectralModel::new(
            1.5,
            0.1,
            Factor::Custom {
                h: Arc::new(|l: f64| (-l * l).exp()),
                cutoff: None,
                envelope: 10.0,
                breakpoints: vec![],
            },
        )
        .unwrap();
        let b0 = covariance_eval(&m, 0.0, &QuadratureSpec::default()).unwrap();
        assert!(b0 > 0.0 && b0.is_finite());
    }
}
