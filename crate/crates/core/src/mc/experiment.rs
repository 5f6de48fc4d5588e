use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate, first_statistic, EstimateResult};
use crate::model::FilterSpec;
use crate::simulate::{gegenbauer_path_covering, CoefficientPanel, ExactSampler};
use crate::transform::{panel_from_path, required_extent, ScaleSchedule, TransformRequest};

use super::{Backend, ExperimentConfig};

/// Largest tolerated fraction of failed replications.
pub const MAX_FAILURE_FRACTION: f64 = 0.2;

/// True values the per-level statistics are compared to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub s0: f64,
    pub alpha: f64,
    /// `c2·s0^{-4α}`.
    pub delta_bar: f64,
    /// `α·c3·s0^{-4α−2}`.
    pub ddelta: f64,
}

impl Targets {
    pub fn new(s0: f64, alpha: f64, filter: &FilterSpec) -> Self {
        let y1 = s0.powf(-4.0 * alpha);
        Targets {
            s0,
            alpha,
            delta_bar: filter.c2() * y1,
            ddelta: alpha * filter.c3() * y1 / (s0 * s0),
        }
    }
}

/// One level of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub j: usize,
    pub a_j: f64,
    pub delta_bar: f64,
    /// Absent at the last level and at skipped levels.
    pub estimate: Option<EstimateResult>,
}

/// A successful replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub rep: usize,
    pub seed: u64,
    pub levels: Vec<LevelOutcome>,
}

/// A replication that returned an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedReplication {
    pub rep: usize,
    pub seed: u64,
    pub error: String,
}

/// Aggregates at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub j: usize,
    pub a_j: f64,
    /// Replications contributing to `mse_delta_bar`.
    pub n: usize,
    /// Replications contributing to the estimate columns.
    pub n_estimates: usize,
    pub mse_delta_bar: f64,
    /// Monte Carlo standard error of `mse_delta_bar`.
    pub se_mse_delta_bar: f64,
    pub mse_ddelta: Option<f64>,
    pub mse_s0_hat: Option<f64>,
    pub mse_alpha_hat: Option<f64>,
    pub mean_s0_hat: Option<f64>,
    pub mean_alpha_hat: Option<f64>,
    /// Mean of `|ŝ0 − s0|`.
    pub mean_abs_err_s0: Option<f64>,
    /// Mean of `|α̂ − α|`.
    pub mean_abs_err_alpha: Option<f64>,
}

/// Result of [`run_experiment`]: per-level MSEs plus the raw replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseTable {
    pub targets: Targets,
    pub backend: Backend,
    pub replications_requested: usize,
    pub rows: Vec<MseRow>,
    pub replications: Vec<Replication>,
    pub failures: Vec<FailedReplication>,
}

impl MseTable {
    pub fn row(&self, j: usize) -> Option<&MseRow> {
        self.rows.iter().find(|r| r.j == j)
    }

    /// Row of the largest scale carrying estimates.
    pub fn last_estimated_row(&self) -> Option<&MseRow> {
        self.rows.iter().rev().find(|r| r.n_estimates > 0)
    }
}

/// Order-independent sum: pairwise over the given order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| pairwise_sum(xs) / xs.len() as f64)
}

fn mse(xs: &[f64], target: f64) -> Option<f64> {
    let sq: Vec<f64> = xs.iter().map(|x| (x - target).powi(2)).collect();
    mean(&sq)
}

fn mean_abs(xs: &[f64], target: f64) -> Option<f64> {
    let d: Vec<f64> = xs.iter().map(|x| (x - target).abs()).collect();
    mean(&d)
}

/// Standard error of the mean of `xs`.
fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = pairwise_sum(xs) / n as f64;
    let ss: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    (pairwise_sum(&ss) / (n - 1) as f64 / n as f64).sqrt()
}

enum Generator {
    Exact(ExactSampler),
    Path {
        spec: crate::model::GegenbauerSpec,
        lo: f64,
        hi: f64,
        dt: f64,
    },
}

impl Generator {
    fn panel(&self, seed: u64, filter: &FilterSpec, schedule: &ScaleSchedule) -> Result<CoefficientPanel> {
        match self {
            Generator::Exact(s) => Ok(s.sample(seed)),
            Generator::Path { spec, lo, hi, dt } => {
                let path = gegenbauer_path_covering(spec, *lo, *hi, *dt, seed)?;
                panel_from_path(TransformRequest {
                    path: &path,
                    filter,
                    schedule,
                })
            }
        }
    }
}

fn replicate(
    rep: usize,
    seed: u64,
    gen: &Generator,
    filter: &FilterSpec,
    schedule: &ScaleSchedule,
) -> Result<Replication> {
    let panel = gen.panel(seed, filter, schedule)?;
    let est = estimate(&panel, filter)?;
    let levels = panel
        .levels()
        .iter()
        .map(|l| {
            Ok(LevelOutcome {
                j: l.j,
                a_j: l.a,
                delta_bar: first_statistic(&panel, l.j)?,
                estimate: est.rows.iter().find(|r| r.j == l.j).copied(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Replication { rep, seed, levels })
}

fn aggregate(schedule: &ScaleSchedule, targets: &Targets, reps: &[Replication]) -> Vec<MseRow> {
    schedule
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let outcomes: Vec<&LevelOutcome> = reps.iter().filter_map(|r| r.levels.get(i)).collect();
            let db: Vec<f64> = outcomes.iter().map(|o| o.delta_bar).collect();
            let ests: Vec<&EstimateResult> = outcomes.iter().filter_map(|o| o.estimate.as_ref()).collect();
            let dd: Vec<f64> = ests.iter().map(|e| e.stats.ddelta).collect();
            let s0: Vec<f64> = ests.iter().map(|e| e.s0_hat).collect();
            let al: Vec<f64> = ests.iter().map(|e| e.alpha_hat).collect();
            let sq: Vec<f64> = db.iter().map(|x| (x - targets.delta_bar).powi(2)).collect();
            MseRow {
                j: l.j,
                a_j: l.a,
                n: db.len(),
                n_estimates: ests.len(),
                mse_delta_bar: mean(&sq).unwrap_or(f64::NAN),
                se_mse_delta_bar: std_error(&sq),
                mse_ddelta: mse(&dd, targets.ddelta),
                mse_s0_hat: mse(&s0, targets.s0),
                mse_alpha_hat: mse(&al, targets.alpha),
                mean_s0_hat: mean(&s0),
                mean_alpha_hat: mean(&al),
                mean_abs_err_s0: mean_abs(&s0, targets.s0),
                mean_abs_err_alpha: mean_abs(&al, targets.alpha),
            }
        })
        .collect()
}

/// Runs every replication, estimates per level, and aggregates squared errors
/// against the model's true values.
///
/// Replications run in parallel on the current rayon pool and are collected in
/// index order. A failing replication is recorded; more than
/// [`MAX_FAILURE_FRACTION`] failures abort the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MseTable> {
    config.validate()?;
    let filter = config.model.filter_spec()?;
    let schedule = config.schedule.build()?;
    let (s0, alpha) = config.model.targets()?;
    let targets = Targets::new(s0, alpha, &filter);

    let gen = match config.backend {
        Backend::ExactGaussian => {
            let model = config.model.spectral_model()?;
            Generator::Exact(ExactSampler::new(&model, &filter, &schedule, &config.quadrature)?)
        }
        Backend::PathTransform => {
            let (lo, hi) = required_extent(&filter, &schedule)?;
            Generator::Path {
                spec: config.model.gegenbauer_spec()?,
                lo,
                hi,
                dt: config.dt,
            }
        }
    };

    let outcomes: Vec<(usize, u64, Result<Replication>)> = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed(i);
            (i, seed, replicate(i, seed, &gen, &filter, &schedule))
        })
        .collect();

    let mut replications = Vec::new();
    let mut failures = Vec::new();
    for (rep, seed, r) in outcomes {
        match r {
            Ok(r) => replications.push(r),
            Err(e) => {
                log::warn!("replication {rep} (seed {seed}) failed: {e}");
                failures.push(FailedReplication {
                    rep,
                    seed,
                    error: e.to_string(),
                });
            }
        }
    }
    if failures.len() as f64 > MAX_FAILURE_FRACTION * config.replications as f64 {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: config.replications,
        });
    }
    let rows = aggregate(&schedule, &targets, &replications);
    Ok(MseTable {
        targets,
        backend: config.backend,
        replications_requested: config.replications,
        rows,
        replications,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_filter, Family, FilterConfig, ModelConfig};
    use crate::transform::{ScheduleConfig, ScheduleRule};

    fn small(backend: Backend, reps: usize) -> ExperimentConfig {
        let model = match backend {
            Backend::ExactGaussian => ModelConfig {
                family: Family::Indicator,
                s0: Some(1.5),
                alpha: Some(0.1),
                m: Some(3.0),
                d: None,
                u: None,
                sigma_eps: 1.0,
                truncation: 40,
                filter: FilterConfig {
                    name: "shannon-father".into(),
                    sigma: None,
                },
            },
            Backend::PathTransform => ModelConfig::gegenbauer_default(),
        };
        ExperimentConfig {
            model,
            schedule: ScheduleConfig {
                rule: ScheduleRule::Geometric,
                j_max: 3,
                a0: Some(1.0),
                rho: Some(2.0),
                kappa: 2.0,
                gamma_mode: None,
                m_max: Some(16),
            },
            backend,
            replications: reps,
            base_seed: 11,
            dt: 0.5,
            quadrature: crate::specfun::QuadratureSpec::new(1e-10, 1e-9).with_max_subdivisions(100_000),
        }
    }

    #[test]
    fn targets_formula() {
        let f = builtin_filter("shannon-father", None).unwrap();
        let t = Targets::new(2.0, 0.25, &f);
        assert!((t.delta_bar - f.c2() / 2.0).abs() < 1e-14);
        assert!((t.ddelta - 0.25 * f.c3() / 8.0).abs() < 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), 2475.0);
        assert_eq!(mean(&[]), None);
        assert_eq!(std_error(&[1.0]), 0.0);
    }

    #[test]
    fn single_replication_table_is_its_squared_errors() {
        let t = run_experiment(&small(Backend::ExactGaussian, 1)).unwrap();
        assert_eq!(t.replications.len(), 1);
        let r = &t.replications[0];
        for (row, lv) in t.rows.iter().zip(&r.levels) {
            assert_eq!(row.mse_delta_bar, (lv.delta_bar - t.targets.delta_bar).powi(2));
            if let Some(e) = lv.estimate {
                assert_eq!(row.mse_s0_hat, Some((e.s0_hat - t.targets.s0).powi(2)));
                assert_eq!(row.mse_alpha_hat, Some((e.alpha_hat - t.targets.alpha).powi(2)));
                assert_eq!(row.mse_ddelta, Some((e.stats.ddelta - t.targets.ddelta).powi(2)));
            }
        }
        assert_eq!(t.rows.last().unwrap().mse_s0_hat, None);
    }

    #[test]
    fn deterministic_and_seeded_by_index() {
        let c = small(Backend::ExactGaussian, 4);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a, b);
        let seeds: Vec<u64> = a.replications.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![11, 12, 13, 14]);
        for row in &a.rows {
            assert!(row.mse_delta_bar >= 0.0);
        }
    }

    #[test]
    fn path_backend_runs() {
        let t = run_experiment(&small(Backend::PathTransform, 2)).unwrap();
        assert_eq!(t.replications.len(), 2);
        assert!(t.failures.is_empty());
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows[0].n_estimates == 2);
    }

    #[test]
    fn path_backend_needs_gegenbauer() {
        let mut c = small(Backend::ExactGaussian, 1);
        c.backend = Backend::PathTransform;
        assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
    }
}
