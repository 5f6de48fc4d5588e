//! Exact Gaussian sampling of filter coefficients from their covariance
//! `I(k1, k2) = a ∫ cos((b_k1 − b_k2)λ) |ψ̂(aλ)|² f(λ) dλ`.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{density_unchecked, FilterSpec, SpectralModel};
use crate::simulate::{CoefficientPanel, PanelLevel, Provenance};
use crate::specfun::{integrate, QuadratureSpec};
use crate::transform::ScaleSchedule;

/// Largest number of shifts per level the sampler will factor.
pub const MAX_EXACT_SHIFTS: usize = 8192;

const STREAM_BASE: u64 = 1 << 62;

/// `a ∫ cos(Δb·λ) |ψ̂(aλ)|² f(λ) dλ` for one shift difference `Δb`.
pub fn shift_covariance(
    model: &SpectralModel,
    filter: &FilterSpec,
    a: f64,
    delta_b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(
            "coefficient_covariance",
            format!("scale {a} must be positive"),
        ));
    }
    let mut hi = filter.band_limit().value() / a;
    if let Some(c) = model.cutoff() {
        hi = hi.min(c);
    }
    let mut q = spec.clone();
    if model.s0 <= hi {
        q.singularities.push(model.s0);
    }
    q.breakpoints
        .extend(filter.breakpoints().iter().map(|b| b / a).filter(|&b| b < hi));
    q.breakpoints
        .extend(model.breakpoints().into_iter().filter(|&b| b < hi));
    let half = integrate(
        |l| (delta_b * l).cos() * filter.psi_hat_sq(a * l) * density_unchecked(model, l),
        0.0,
        hi,
        &q,
    )?;
    Ok(2.0 * a * half)
}

/// Variance `J(a) = a ∫ |ψ̂(aλ)|² f(λ) dλ` of a coefficient at scale `a`.
pub fn coefficient_variance(model: &SpectralModel, filter: &FilterSpec, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    shift_covariance(model, filter, a, 0.0, spec)
}

fn warn_small_scale(filter: &FilterSpec, a: f64) {
    let a_lim = filter.band_limit().value();
    if a / (2.0 * a_lim) < 1.0 {
        log::warn!(
            "scale {a} is below 2A = {}; covariance decay bounds do not apply",
            2.0 * a_lim
        );
    }
}

fn is_arithmetic(shifts: &[f64]) -> Option<f64> {
    if shifts.len() < 2 {
        return Some(0.0);
    }
    let step = shifts[1] - shifts[0];
    shifts
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-12 * step.abs().max(1.0))
        .then_some(step)
}

/// Covariance matrix of `δ_k = d_x(a, b_k)` over the given shifts.
///
/// Equally spaced shifts give a Toeplitz matrix, computed with one quadrature per lag.
pub fn coefficient_covariance(
    model: &SpectralModel,
    filter: &FilterSpec,
    a: f64,
    shifts: &[f64],
    spec: &QuadratureSpec,
) -> Result<DMatrix<f64>> {
    let m = shifts.len();
    if m == 0 {
        return Err(Error::domain("coefficient_covariance", "no shifts given"));
    }
    warn_small_scale(filter, a);
    let entry = |k1: usize, k2: usize, db: f64| {
        shift_covariance(model, filter, a, db, spec).map_err(|e| Error::CovarianceEntry {
            k1: k1 + 1,
            k2: k2 + 1,
            a,
            source: Box::new(e),
        })
    };
    if let Some(step) = is_arithmetic(shifts) {
        let lags: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|lag| entry(0, lag, lag as f64 * step))
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(m, m, |i, j| lags[i.abs_diff(j)]))
    } else {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
        let vals: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| entry(i, j, shifts[i] - shifts[j]))
            .collect::<Result<_>>()?;
        let mut out = DMatrix::zeros(m, m);
        for (&(i, j), &v) in pairs.iter().zip(&vals) {
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
        Ok(out)
    }
}

/// Lower Cholesky factor, adding diagonal jitter from `1e-12` up to `1e-6`
/// times the mean diagonal if needed. Returns the factor and the jitter used.
pub fn cholesky_with_jitter(cov: DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let m = cov.nrows();
    let scale = cov.trace() / m as f64;
    if let Some(c) = Cholesky::new(cov.clone()) {
        return Ok((c.unpack(), 0.0));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Factorization { size: m, jitter: 0.0 });
    }
    let mut jitter = 1e-12 * scale;
    let mut last = jitter;
    while jitter <= 1e-6 * scale * (1.0 + 1e-9) {
        let mut a = cov.clone();
        for i in 0..m {
            a[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(a) {
            log::debug!("cholesky of size {m} needed jitter {jitter:e}");
            return Ok((c.unpack(), jitter));
        }
        last = jitter;
        jitter *= 10.0;
    }
    Err(Error::Factorization { size: m, jitter: last })
}

/// Factored covariance of one level.
#[derive(Debug, Clone)]
pub struct LevelFactor {
    pub j: usize,
    pub a: f64,
    pub shifts: Vec<f64>,
    /// `J(a_j)`.
    pub variance: f64,
    /// Diagonal jitter added before factorization.
    pub jitter: f64,
    chol: DMatrix<f64>,
}

/// Draws coefficient panels from the exact joint Gaussian law, one
/// independent vector per level. Factorizations are computed once.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    levels: Vec<LevelFactor>,
}

impl ExactSampler {
    pub fn new(
        model: &SpectralModel,
        filter: &FilterSpec,
        schedule: &ScaleSchedule,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let mut levels = Vec::with_capacity(schedule.levels().len());
        for l in schedule.levels() {
            if l.m > MAX_EXACT_SHIFTS {
                return Err(Error::domain(
                    "exact sampler",
                    format!("level {} has m = {} > {MAX_EXACT_SHIFTS}", l.j, l.m),
                ));
            }
            let shifts = ScaleSchedule::shifts(l);
            let cov = coefficient_covariance(model, filter, l.a, &shifts, spec)?;
            let variance = cov[(0, 0)];
            let (chol, jitter) = cholesky_with_jitter(cov)?;
            log::info!(
                "level {} (a = {}, m = {}): J = {variance:.6e}, jitter {jitter:e}",
                l.j,
                l.a,
                l.m
            );
            levels.push(LevelFactor {
                j: l.j,
                a: l.a,
                shifts,
                variance,
                jitter,
                chol,
            });
        }
        Ok(ExactSampler { levels })
    }

    pub fn levels(&self) -> &[LevelFactor] {
        &self.levels
    }

    /// One panel; level `i` uses an independent stream derived from `seed`.
    pub fn sample(&self, seed: u64) -> CoefficientPanel {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, lf)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(STREAM_BASE + i as u64);
                let m = lf.shifts.len();
                let z = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = &lf.chol * z;
                PanelLevel {
                    j: lf.j,
                    a: lf.a,
                    shifts: lf.shifts.clone(),
                    coeffs: x.iter().copied().collect(),
                }
            })
            .collect();
        CoefficientPanel::new(levels, Provenance::ExactGaussian, seed).expect("schedule levels are validated")
    }
}

/// Builds an [`ExactSampler`] and draws a single panel.
pub fn exact_coefficient_sample(
    model: &SpectralModel,
    filter: &FilterSpec,
    schedule: &ScaleSchedule,
    seed: u64,
    spec: &QuadratureSpec,
) -> Result<CoefficientPanel> {
    Ok(ExactSampler::new(model, filter, schedule, spec)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_filter;
    use crate::transform::{geometric_schedule, Level};

    fn setup() -> (SpectralModel, FilterSpec) {
        (
            SpectralModel::indicator(1.5, 0.1, 3.0).unwrap(),
            builtin_filter("shannon-father", None).unwrap(),
        )
    }

    #[test]
    fn single_shift_gives_variance() {
        let (m, f) = setup();
        let spec = QuadratureSpec::default();
        let c = coefficient_covariance(&m, &f, 8.0, &[3.0], &spec).unwrap();
        assert_eq!(c.shape(), (1, 1));
        let j = coefficient_variance(&m, &f, 8.0, &spec).unwrap();
        assert!((c[(0, 0)] - j).abs() < 1e-14);
    }

    #[test]
    fn variance_approaches_limit() {
        let (m, f) = setup();
        let spec = QuadratureSpec::default();
        let limit = f.c2() * m.s0.powf(-4.0 * m.alpha);
        let errs: Vec<f64> = [8.0, 16.0, 32.0]
            .iter()
            .map(|&a| (coefficient_variance(&m, &f, a, &spec).unwrap() - limit).abs())
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }

    #[test]
    fn toeplitz_matches_general_path() {
        let (m, f) = setup();
        let spec = QuadratureSpec::default();
        let even = coefficient_covariance(&m, &f, 8.0, &[8.0, 16.0, 24.0], &spec).unwrap();
        let uneven = coefficient_covariance(&m, &f, 8.0, &[8.0, 16.0, 24.000001], &spec).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((even[(i, j)] - even[(j, i)]).abs() == 0.0);
                assert!((even[(i, j)] - uneven[(i, j)]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn jitter_rescues_semidefinite_matrix() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let rank_one = &v * v.transpose();
        let (l, jitter) = cholesky_with_jitter(rank_one).unwrap();
        assert!(jitter > 0.0);
        assert!(l[(0, 0)] > 0.0);
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(cholesky_with_jitter(neg), Err(Error::Factorization { .. })));
    }

    #[test]
    fn sampling_is_deterministic() {
        let (m, f) = setup();
        let s = geometric_schedule(2, 4.0, 2.0, 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let sampler = ExactSampler::new(&m, &f, &s, &spec).unwrap();
        let a = sampler.sample(5);
        let b = sampler.sample(5);
        assert_eq!(a, b);
        assert_ne!(a, sampler.sample(6));
        assert_eq!(a.provenance, Provenance::ExactGaussian);
        assert_eq!(a.levels()[0].coeffs.len(), 8);
    }

    #[test]
    fn guard_on_level_size() {
        let (m, f) = setup();
        let s = ScaleSchedule::new(vec![Level {
            j: 1,
            a: 8.0,
            gamma: 8.0,
            m: MAX_EXACT_SHIFTS + 1,
            r: 1.0,
        }])
        .unwrap();
        assert!(ExactSampler::new(&m, &f, &s, &QuadratureSpec::default()).is_err());
    }
}
