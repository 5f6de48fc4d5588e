use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{integrate, QuadratureSpec};

pub type PsiHatFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type PsiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Names accepted by [`builtin_filter`].
pub const BUILTIN_FILTERS: [&str; 5] = [
    "shannon-father",
    "shannon-mother",
    "meyer-father",
    "meyer-mother",
    "mexican-hat",
];

/// Frequency support of `ψ̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandLimit {
    /// `ψ̂` vanishes identically outside `[-A, A]`.
    Exact(f64),
    /// `|ψ̂|²` falls below `1e-12` of its peak outside `[-A, A]`.
    Effective(f64),
}

impl BandLimit {
    pub fn value(&self) -> f64 {
        match *self {
            BandLimit::Exact(a) | BandLimit::Effective(a) => a,
        }
    }
}

/// A filter `ψ` with its Fourier transform `ψ̂(λ) = ∫ e^{-iλt} ψ(t) dt` and moments.
#[derive(Clone)]
pub struct FilterSpec {
    pub name: String,
    psi: Option<PsiFn>,
    psi_hat: PsiHatFn,
    band_limit: BandLimit,
    /// Non-smooth points of `|ψ̂|²` (positive side).
    breakpoints: Vec<f64>,
    time_support: Option<f64>,
    /// Whether `|ψ̂|²` must be integrated over the whole line.
    unbounded: bool,
    c2: f64,
    c3: f64,
}

impl fmt::Debug for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterSpec")
            .field("name", &self.name)
            .field("band_limit", &self.band_limit)
            .field("time_support", &self.time_support)
            .field("c2", &self.c2)
            .field("c3", &self.c3)
            .finish_non_exhaustive()
    }
}

impl FilterSpec {
    /// Builds a filter from its transform and computes `c2`, `c3` by quadrature.
    ///
    /// `breakpoints` lists the non-negative frequencies where `|ψ̂|²` is not
    /// smooth. `time_support` is the half-width `T` beyond which `ψ` is
    /// negligible; required for path transforms.
    pub fn new(
        name: impl Into<String>,
        psi_hat: PsiHatFn,
        psi: Option<PsiFn>,
        band_limit: BandLimit,
        breakpoints: Vec<f64>,
        time_support: Option<f64>,
    ) -> Result<Self> {
        let a = band_limit.value();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::domain("filter", "band limit must be positive"));
        }
        let mut spec = FilterSpec {
            name: name.into(),
            psi,
            psi_hat,
            band_limit,
            breakpoints,
            time_support,
            unbounded: matches!(band_limit, BandLimit::Effective(_)),
            c2: f64::NAN,
            c3: f64::NAN,
        };
        let (c2, c3) = spec.moments(&Self::moment_quadrature())?;
        if !(c2 > 0.0 && c3 > 0.0) {
            return Err(Error::domain(
                "filter",
                format!("degenerate moments c2 = {c2}, c3 = {c3}"),
            ));
        }
        spec.c2 = c2;
        spec.c3 = c3;
        Ok(spec)
    }

    fn moment_quadrature() -> QuadratureSpec {
        QuadratureSpec::new(1e-14, 1e-13).with_max_subdivisions(20_000)
    }

    /// Recomputes `(c2, c3)` with the given quadrature settings.
    pub fn moments(&self, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let hi = if self.unbounded {
            f64::INFINITY
        } else {
            self.band_limit.value()
        };
        let q = spec.clone().with_breakpoints(self.breakpoints.iter().copied());
        let c2 = 2.0 * integrate(|l| self.psi_hat_sq(l), 0.0, hi, &q)?;
        let c3 = 4.0 * integrate(|l| l * l * self.psi_hat_sq(l), 0.0, hi, &q)?;
        Ok((c2, c3))
    }

    pub fn psi_hat(&self, lambda: f64) -> Complex64 {
        (self.psi_hat)(lambda)
    }

    pub fn psi_hat_sq(&self, lambda: f64) -> f64 {
        (self.psi_hat)(lambda).norm_sqr()
    }

    /// Time-domain filter, if one is available.
    pub fn psi(&self, t: f64) -> Option<f64> {
        self.psi.as_ref().map(|p| p(t))
    }

    pub fn has_time_domain(&self) -> bool {
        self.psi.is_some()
    }

    pub fn band_limit(&self) -> BandLimit {
        self.band_limit
    }

    /// Half-width of the time window used by path transforms.
    pub fn time_support(&self) -> Option<f64> {
        self.time_support
    }

    /// Non-negative frequencies where `|ψ̂|²` is not smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// True if `ψ̂` has to be integrated over the whole line.
    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    /// `c2 = ∫ |ψ̂|²`.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `c3 = 2 ∫ λ² |ψ̂|²`.
    pub fn c3(&self) -> f64 {
        self.c3
    }
}

/// `sin(πx)/(πx)` with the removable singularity filled in.
fn sinc_pi(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn meyer_nu(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Smallest `T` from half-integers with `envelope / T < threshold`.
fn half_integer_support(envelope: f64, threshold: f64) -> f64 {
    (envelope / threshold - 0.5).ceil() + 0.5
}

/// Root of a decreasing function on `[lo, hi]` by bisection.
fn bisect_decreasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Threshold for the Shannon time window, relative to `max |ψ|`.
pub const SHANNON_SUPPORT_THRESHOLD: f64 = 1e-3;
/// Threshold for the Mexican-hat time window, relative to `max |ψ|`.
pub const GAUSSIAN_SUPPORT_THRESHOLD: f64 = 1e-10;
/// Threshold defining the effective band limit, relative to `max |ψ̂|²`.
pub const EFFECTIVE_BAND_THRESHOLD: f64 = 1e-12;

/// One of the built-in filters. `sigma` applies to `mexican-hat` only (default 1).
pub fn builtin_filter(name: &str, sigma: Option<f64>) -> Result<FilterSpec> {
    match name {
        "shannon-father" => FilterSpec::new(
            name,
            Arc::new(|l: f64| {
                if l.abs() <= PI {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            Some(Arc::new(sinc_pi)),
            BandLimit::Exact(PI),
            vec![PI],
            Some(half_integer_support(1.0 / PI, SHANNON_SUPPORT_THRESHOLD)),
        ),
        "shannon-mother" => FilterSpec::new(
            name,
            Arc::new(|l: f64| {
                let a = l.abs();
                if a > PI && a <= 2.0 * PI {
                    -Complex64::from_polar(1.0, -0.5 * l)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            Some(Arc::new(|t: f64| {
                let s = t - 0.5;
                sinc_pi(s) - 2.0 * sinc_pi(2.0 * s)
            })),
            BandLimit::Exact(2.0 * PI),
            vec![PI, 2.0 * PI],
            Some(half_integer_support(2.0 / PI, SHANNON_SUPPORT_THRESHOLD)),
        ),
        "meyer-father" => FilterSpec::new(
            name,
            Arc::new(|l: f64| {
                let a = l.abs();
                let v = if a <= 2.0 * PI / 3.0 {
                    1.0
                } else if a <= 4.0 * PI / 3.0 {
                    (0.5 * PI * meyer_nu(3.0 * a / (2.0 * PI) - 1.0)).cos()
                } else {
                    0.0
                };
                Complex64::new(v, 0.0)
            }),
            None,
            BandLimit::Exact(4.0 * PI / 3.0),
            vec![2.0 * PI / 3.0, 4.0 * PI / 3.0],
            None,
        ),
        "meyer-mother" => FilterSpec::new(
            name,
            Arc::new(|l: f64| {
                let a = l.abs();
                let m = if a < 2.0 * PI / 3.0 {
                    0.0
                } else if a <= 4.0 * PI / 3.0 {
                    (0.5 * PI * meyer_nu(3.0 * a / (2.0 * PI) - 1.0)).sin()
                } else if a <= 8.0 * PI / 3.0 {
                    (0.5 * PI * meyer_nu(3.0 * a / (4.0 * PI) - 1.0)).cos()
                } else {
                    0.0
                };
                Complex64::from_polar(m, 0.5 * l)
            }),
            None,
            BandLimit::Exact(8.0 * PI / 3.0),
            vec![2.0 * PI / 3.0, 4.0 * PI / 3.0, 8.0 * PI / 3.0],
            None,
        ),
        "mexican-hat" => mexican_hat(sigma.unwrap_or(1.0)),
        other => Err(Error::UnknownFilter(other.to_string())),
    }
}

fn mexican_hat(sigma: f64) -> Result<FilterSpec> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(
            "mexican-hat",
            format!("sigma = {sigma} must be positive"),
        ));
    }
    let amp_hat = 8f64.sqrt() * PI.powf(0.25) * sigma.powf(2.5) / 3f64.sqrt();
    let amp = 2.0 / ((3.0 * sigma).sqrt() * PI.powf(0.25));

    // |ψ̂|² ∝ x⁴ e^{-x²} with x = σλ, peak at x² = 2.
    let rel = |x: f64| x.powi(4) * (-x * x).exp() / (4.0 * (-2.0f64).exp());
    let x_band = bisect_decreasing(|x| rel(x) - EFFECTIVE_BAND_THRESHOLD, 2f64.sqrt(), 20.0);
    // |ψ| ∝ |1 − s²| e^{-s²/2} with s = t/σ, peak at s = 0.
    let s_time = bisect_decreasing(
        |s| (s * s - 1.0) * (-0.5 * s * s).exp() - GAUSSIAN_SUPPORT_THRESHOLD,
        3f64.sqrt(),
        20.0,
    );

    FilterSpec::new(
        "mexican-hat",
        Arc::new(move |l: f64| {
            let x = sigma * l;
            Complex64::new(amp_hat * l * l * (-0.5 * x * x).exp(), 0.0)
        }),
        Some(Arc::new(move |t: f64| {
            let s = t / sigma;
            amp * (1.0 - s * s) * (-0.5 * s * s).exp()
        })),
        BandLimit::Effective(x_band / sigma),
        vec![],
        Some(s_time * sigma),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn shannon_constants() {
        let f = builtin_filter("shannon-father", None).unwrap();
        assert!(rel(f.c2(), 2.0 * PI) < 1e-10);
        assert!(rel(f.c3(), 4.0 / 3.0 * PI.powi(3)) < 1e-10);
        let m = builtin_filter("shannon-mother", None).unwrap();
        assert!(rel(m.c2(), 2.0 * PI) < 1e-10);
        assert!(rel(m.c3(), 28.0 / 3.0 * PI.powi(3)) < 1e-10);
    }

    #[test]
    fn meyer_constants() {
        let f = builtin_filter("meyer-father", None).unwrap();
        assert!(rel(f.c2(), 2.0 * PI) < 1e-10);
        assert!(rel(f.c3(), 16.0 / 9.0 * PI * (PI * PI - 2.0)) < 1e-10);
        let m = builtin_filter("meyer-mother", None).unwrap();
        assert!(rel(m.c2(), 2.0 * PI) < 1e-10);
        assert!(rel(m.c3(), 112.0 / 9.0 * PI * (PI * PI - 2.0)) < 1e-10);
    }

    #[test]
    fn mexican_hat_constants_scale_with_sigma() {
        for &s in &[0.5, 1.0, 2.0] {
            let f = builtin_filter("mexican-hat", Some(s)).unwrap();
            assert!(rel(f.c2(), 2.0 * PI) < 1e-9, "sigma {s}: c2 = {}", f.c2());
            assert!(rel(f.c3(), 10.0 * PI / (s * s)) < 1e-9, "sigma {s}: c3 = {}", f.c3());
        }
    }

    #[test]
    fn meyer_window_identity() {
        let f = builtin_filter("meyer-father", None).unwrap();
        let m = builtin_filter("meyer-mother", None).unwrap();
        for i in 0..=100 {
            let l = 2.0 * PI / 3.0 + (2.0 * PI / 3.0) * i as f64 / 100.0;
            let s = f.psi_hat_sq(l) + m.psi_hat_sq(l);
            assert!((s - 1.0).abs() < 1e-14, "lambda = {l}");
        }
    }

    #[test]
    fn shannon_time_and_frequency_forms_agree() {
        // ψ(t) = (1/2π) ∫ ψ̂(λ) e^{iλt} dλ, checked at a few points.
        let spec = QuadratureSpec::new(1e-12, 1e-12).with_breakpoints([PI, 2.0 * PI]);
        for name in ["shannon-father", "shannon-mother"] {
            let f = builtin_filter(name, None).unwrap();
            for &t in &[0.0, 0.3, 0.5, 1.7, -2.2] {
                let re = integrate(
                    |l| (f.psi_hat(l) * Complex64::from_polar(1.0, l * t)).re,
                    -2.0 * PI,
                    2.0 * PI,
                    &spec,
                )
                .unwrap()
                    / (2.0 * PI);
                assert!((re - f.psi(t).unwrap()).abs() < 1e-10, "{name} t = {t}");
            }
        }
    }

    #[test]
    fn mexican_hat_time_and_frequency_forms_agree() {
        let f = builtin_filter("mexican-hat", Some(1.5)).unwrap();
        let spec = QuadratureSpec::new(1e-12, 1e-12);
        for &t in &[0.0, 0.8, 2.0, -3.1] {
            let v = integrate(
                |l| f.psi_hat(l).re * (l * t).cos(),
                f64::NEG_INFINITY,
                f64::INFINITY,
                &spec,
            )
            .unwrap()
                / (2.0 * PI);
            assert!((v - f.psi(t).unwrap()).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn effective_band_and_support() {
        let f = builtin_filter("mexican-hat", Some(1.0)).unwrap();
        let a = f.band_limit().value();
        let peak = f.psi_hat_sq(2f64.sqrt());
        assert!((f.psi_hat_sq(a) / peak - 1e-12).abs() < 1e-15);
        assert!(f.psi_hat_sq(a * 1.01) / peak < 1e-12);
        let t = f.time_support().unwrap();
        assert!((f.psi(t).unwrap().abs() / f.psi(0.0).unwrap() - 1e-10).abs() < 1e-14);

        let s = builtin_filter("shannon-father", None).unwrap();
        let ts = s.time_support().unwrap();
        assert_eq!(ts, 318.5);
        assert_eq!(s.band_limit(), BandLimit::Exact(PI));
    }

    #[test]
    fn moments_stable_under_tighter_quadrature() {
        for name in BUILTIN_FILTERS {
            let f = builtin_filter(name, None).unwrap();
            let (c2, c3) = f
                .moments(&QuadratureSpec::new(1e-15, 5e-14).with_max_subdivisions(40_000))
                .unwrap();
            assert!(rel(c2, f.c2()) < 1e-8 && rel(c3, f.c3()) < 1e-8, "{name}");
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin_filter("haar", None), Err(Error::UnknownFilter(_))));
        assert!(builtin_filter("mexican-hat", Some(-1.0)).is_err());
    }
}
