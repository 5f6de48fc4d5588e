use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use slm_core::estimator::{estimate, write_results_csv};
use slm_core::mc::{run_experiment, summarize, write_outputs, Backend, ExperimentConfig};
use slm_core::model::{builtin_filter, covariance_eval, density_eval, BandLimit, FilterSpec, ModelConfig};
use slm_core::simulate::{
    gegenbauer_path, gegenbauer_path_covering, CoefficientPanel, ExactSampler, PathRealization, Provenance,
};
use slm_core::specfun::QuadratureSpec;
use slm_core::transform::{panel_from_path, required_extent, ScheduleConfig, TransformRequest};

use crate::args::{
    ConstantsArgs, EstimateArgs, FilterArgs, ModelArgs, MontecarloArgs, SimulateArgs, SpectrumArgs, TransformArgs,
};
use crate::io::{json_pointer, prepare_dir, read_config, write_json, write_manifest, CliError, CliResult};

fn default_dt() -> f64 {
    1.0
}

fn default_quadrature() -> QuadratureSpec {
    QuadratureSpec::new(1e-12, 1e-11).with_max_subdivisions(200_000)
}

fn default_backend() -> Backend {
    Backend::PathTransform
}

/// Config of `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelConfig,
    pub n_points: usize,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Config of `transform`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub model: ModelConfig,
    pub schedule: ScheduleConfig,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_quadrature")]
    pub quadrature: QuadratureSpec,
}

fn filter_from_args(args: &FilterArgs, fallback: Option<&ModelConfig>) -> CliResult<FilterSpec> {
    let mut cfg = fallback.map(|m| m.filter.clone()).unwrap_or_default();
    if let Some(name) = &args.filter {
        cfg.name = name.clone();
        if args.sigma.is_none() && name != "mexican-hat" {
            cfg.sigma = None;
        }
    }
    if args.sigma.is_some() {
        cfg.sigma = args.sigma;
    }
    Ok(cfg.build()?)
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn constants(args: &ConstantsArgs) -> CliResult<()> {
    let name = args
        .filter
        .filter
        .as_deref()
        .ok_or_else(|| CliError::Usage("constants requires --filter".into()))?;
    let f = builtin_filter(name, args.filter.sigma)?;
    let (kind, a) = match f.band_limit() {
        BandLimit::Exact(a) => ("exact", a),
        BandLimit::Effective(a) => ("effective", a),
    };
    let out = json!({
        "name": f.name,
        "A_effective": a,
        "band_limit": kind,
        "c2": f.c2(),
        "c3": f.c3(),
        "T_psi": f.time_support(),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    if let Some(dir) = &args.out {
        prepare_dir(dir)?;
        let path = dir.join("constants.json");
        write_json(&path, &out)?;
        write_manifest(
            dir,
            "constants",
            json!({"filter": name, "sigma": args.filter.sigma}),
            Value::Null,
            &[path],
        )?;
    }
    Ok(())
}

fn model_config(args: &ModelArgs) -> CliResult<ModelConfig> {
    let mut base = match &args.config {
        Some(p) => read_config::<Value>(p)?,
        None => Value::Object(Map::new()),
    };
    let obj = base
        .as_object_mut()
        .ok_or_else(|| CliError::Usage("model config must be a JSON object".into()))?;
    if let Some(f) = &args.family {
        obj.insert("family".into(), json!(f));
    }
    for (key, v) in [
        ("s0", args.s0),
        ("alpha", args.alpha),
        ("M", args.m),
        ("d", args.d),
        ("u", args.u),
    ] {
        if let Some(v) = v {
            obj.insert(key.into(), json!(v));
        }
    }
    serde_path_to_error::deserialize(base)
        .map_err(|e| CliError::Usage(format!("model at '{}': {}", json_pointer(e.path()), e.inner())))
}

/// Uniform grid; points falling on `±s0` move half a step away from zero.
fn frequency_grid(lo: f64, hi: f64, n: usize, s0: f64) -> CliResult<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(CliError::Usage(
            "the grid needs lambda_max > lambda_min and at least 2 points".into(),
        ));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let tol = 1e-12 * s0.max(1.0);
    Ok((0..n)
        .map(|i| {
            let l = if i == n - 1 { hi } else { lo + i as f64 * h };
            if (l.abs() - s0).abs() <= tol {
                let moved = l + 0.5 * h * l.signum();
                log::warn!("grid point {l} sits on the pole; moved to {moved}");
                moved
            } else {
                l
            }
        })
        .collect())
}

pub fn spectrum(args: &SpectrumArgs) -> CliResult<()> {
    let cfg = model_config(&args.model)?;
    let model = cfg.spectral_model()?;
    for w in model.validate() {
        log::warn!("{w}");
    }
    prepare_dir(&args.out)?;
    let grid = frequency_grid(args.lambda_min, args.lambda_max, args.points, model.s0)?;
    let spec_path = args.out.join("spectrum.csv");
    let mut w = csv::Writer::from_path(&spec_path).map_err(slm_core::Error::from)?;
    w.write_record(["lambda", "f"]).map_err(slm_core::Error::from)?;
    for &l in &grid {
        let f = density_eval(&model, l)?;
        w.write_record([l.to_string(), f.to_string()])
            .map_err(slm_core::Error::from)?;
    }
    w.flush()?;
    let mut outputs = vec![spec_path];

    if let Some(r_max) = args.r_max {
        if !(r_max >= 0.0) || args.r_points < 1 {
            return Err(CliError::Usage(
                "--r-max must be non-negative and --r-points positive".into(),
            ));
        }
        let q = QuadratureSpec::new(1e-10, 1e-9).with_max_subdivisions(100_000);
        let cov_path = args.out.join("covariance.csv");
        let mut w = csv::Writer::from_path(&cov_path).map_err(slm_core::Error::from)?;
        w.write_record(["r", "B"]).map_err(slm_core::Error::from)?;
        for i in 0..args.r_points {
            let r = if args.r_points == 1 {
                0.0
            } else {
                r_max * i as f64 / (args.r_points - 1) as f64
            };
            let b = covariance_eval(&model, r, &q)?;
            w.write_record([r.to_string(), b.to_string()])
                .map_err(slm_core::Error::from)?;
        }
        w.flush()?;
        outputs.push(cov_path);
    }
    let config = json!({
        "model": to_value(&cfg)?,
        "lambda_min": args.lambda_min,
        "lambda_max": args.lambda_max,
        "points": args.points,
        "r_max": args.r_max,
        "r_points": args.r_points,
    });
    write_manifest(&args.out, "spectrum", config, Value::Null, &outputs)?;
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let mut cfg: SimulateConfig = read_config(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let spec = cfg.model.gegenbauer_spec()?;
    let path = gegenbauer_path(&spec, cfg.n_points, cfg.t0, cfg.dt, cfg.seed)?;
    prepare_dir(&args.out)?;
    let out = args.out.join("path.csv");
    path.write_csv(&out)?;
    log::info!("wrote {} points to {}", path.len(), out.display());
    write_manifest(
        &args.out,
        "simulate",
        to_value(&cfg)?,
        json!({"seed": cfg.seed}),
        &[out],
    )?;
    Ok(())
}

pub fn transform(args: &TransformArgs) -> CliResult<()> {
    let mut cfg: TransformConfig = read_config(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let filter = cfg.model.filter_spec()?;
    let schedule = cfg.schedule.build()?;
    prepare_dir(&args.out)?;
    let mut outputs = Vec::new();

    let panel = match (&args.input, cfg.backend) {
        (Some(input), Backend::PathTransform) => {
            let path = PathRealization::read_csv(input, cfg.seed)?;
            panel_from_path(TransformRequest {
                path: &path,
                filter: &filter,
                schedule: &schedule,
            })?
        }
        (Some(_), Backend::ExactGaussian) => {
            return Err(CliError::Usage("--input needs backend 'path-transform'".into()));
        }
        (None, Backend::PathTransform) => {
            let (lo, hi) = required_extent(&filter, &schedule)?;
            let spec = cfg.model.gegenbauer_spec()?;
            let path = gegenbauer_path_covering(&spec, lo, hi, cfg.dt, cfg.seed)?;
            let p = args.out.join("path.csv");
            path.write_csv(&p)?;
            outputs.push(p);
            panel_from_path(TransformRequest {
                path: &path,
                filter: &filter,
                schedule: &schedule,
            })?
        }
        (None, Backend::ExactGaussian) => {
            let model = cfg.model.spectral_model()?;
            ExactSampler::new(&model, &filter, &schedule, &cfg.quadrature)?.sample(cfg.seed)
        }
    };
    let p = args.out.join("panel.csv");
    panel.write_csv(&p)?;
    outputs.push(p);
    let mut config = to_value(&cfg)?;
    if let Some(input) = &args.input {
        config["input"] = json!(input.display().to_string());
    }
    write_manifest(&args.out, "transform", config, json!({"seed": cfg.seed}), &outputs)?;
    Ok(())
}

pub fn estimate_cmd(args: &EstimateArgs) -> CliResult<()> {
    let model: Option<ModelConfig> = args.config.as_deref().map(read_config).transpose()?;
    let filter = filter_from_args(&args.filter, model.as_ref())?;
    let seed = args.seed.unwrap_or(0);
    let panel = read_panel(&args.input, seed)?;
    let est = estimate(&panel, &filter)?;
    prepare_dir(&args.out)?;
    let out = args.out.join("estimates.csv");
    write_results_csv(&est.rows, BufWriter::new(File::create(&out)?))?;

    let stdout = std::io::stdout();
    let mut o = stdout.lock();
    if let Some(m) = &model {
        let (s0, alpha) = m.targets()?;
        writeln!(o, "true: s0 = {s0:.6}  alpha = {alpha:.6}")?;
    }
    writeln!(
        o,
        "{:>4} {:>10} {:>12} {:>12} {:>8}",
        "j", "a_j", "s0_hat", "alpha_hat", "case"
    )?;
    for r in &est.rows {
        writeln!(
            o,
            "{:>4} {:>10} {:>12.6} {:>12.6} {:>8}",
            r.j, r.stats.a_j, r.s0_hat, r.alpha_hat, r.point.case_applied
        )?;
    }
    for s in &est.skipped {
        writeln!(o, "level {} skipped: {}", s.j, s.reason)?;
    }
    let config = json!({
        "input": args.input.display().to_string(),
        "filter": {"name": filter.name, "c2": filter.c2(), "c3": filter.c3()},
        "model": model.as_ref().map(to_value).transpose()?,
    });
    write_manifest(&args.out, "estimate", config, json!({"seed": seed}), &[out])?;
    Ok(())
}

fn read_panel(path: &Path, seed: u64) -> CliResult<CoefficientPanel> {
    if !path.exists() {
        return Err(CliError::Usage(format!("input '{}' does not exist", path.display())));
    }
    Ok(CoefficientPanel::read_csv(path, Provenance::PathTransform, seed)?)
}

pub fn montecarlo(args: &MontecarloArgs) -> CliResult<()> {
    let mut cfg: ExperimentConfig = read_config(&args.config)?;
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    let table = run_experiment(&cfg)?;
    let report = summarize(&table);
    prepare_dir(&args.out)?;
    let mut outputs: Vec<PathBuf> = write_outputs(&table, &args.out)?;
    let txt = args.out.join("report.txt");
    std::fs::write(&txt, &report.text)?;
    outputs.push(txt);
    print!("{}", report.text);
    let seeds = json!({
        "base_seed": cfg.base_seed,
        "replications": cfg.replications,
        "rule": "base_seed + replication index",
    });
    write_manifest(&args.out, "montecarlo", to_value(&cfg)?, seeds, &outputs)?;
    Ok(())
}
