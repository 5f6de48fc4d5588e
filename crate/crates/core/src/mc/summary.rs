use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimator::{result_fields, RESULT_COLUMNS};

use super::{Backend, FailedReplication, MseRow, MseTable, Targets};

/// Column names of `mse_table.csv`.
pub const MSE_COLUMNS: [&str; 13] = [
    "j",
    "a_j",
    "n",
    "n_estimates",
    "mse_delta_bar",
    "se_mse_delta_bar",
    "mse_ddelta",
    "mse_s0_hat",
    "mse_alpha_hat",
    "mean_s0_hat",
    "mean_alpha_hat",
    "mean_abs_err_s0",
    "mean_abs_err_alpha",
];

/// Machine-readable digest of an [`MseTable`], written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub backend: Backend,
    pub targets: Targets,
    pub replications_requested: usize,
    pub replications_completed: usize,
    pub failures: Vec<FailedReplication>,
    pub levels: Vec<MseRow>,
}

/// Text and JSON forms of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub summary: Summary,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.4e}"),
        Some(x) => x.to_string(),
        None => "-".into(),
    }
}

/// Aligned text report plus the JSON summary.
type Cell = Box<dyn Fn(&MseRow) -> String>;

pub fn summarize(table: &MseTable) -> Report {
    let summary = Summary {
        backend: table.backend,
        targets: table.targets,
        replications_requested: table.replications_requested,
        replications_completed: table.replications.len(),
        failures: table.failures.clone(),
        levels: table.rows.clone(),
    };

    let backend = match table.backend {
        Backend::ExactGaussian => "exact-gaussian",
        Backend::PathTransform => "path-transform",
    };
    let t = &table.targets;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "backend: {backend}   replications: {}/{}",
        summary.replications_completed, summary.replications_requested
    );
    let _ = writeln!(
        text,
        "targets: s0 = {:.6}  alpha = {:.6}  delta_bar = {:.6e}  ddelta = {:.6e}",
        t.s0, t.alpha, t.delta_bar, t.ddelta
    );
    let _ = writeln!(text);

    let label_w = 18;
    let col_w = 12;
    let _ = write!(text, "{:<label_w$}", "quantity");
    for r in &table.rows {
        let _ = write!(text, "{:>col_w$}", format!("j={}", r.j));
    }
    let _ = writeln!(text);
    let lines: [(&str, Cell); 9] = [
        ("a_j", Box::new(|r| format!("{}", r.a_j))),
        ("n", Box::new(|r| r.n.to_string())),
        ("mse_delta_bar", Box::new(|r| cell(Some(r.mse_delta_bar)))),
        ("se_mse_delta_bar", Box::new(|r| cell(Some(r.se_mse_delta_bar)))),
        ("mse_ddelta", Box::new(|r| cell(r.mse_ddelta))),
        ("mse_s0_hat", Box::new(|r| cell(r.mse_s0_hat))),
        ("mse_alpha_hat", Box::new(|r| cell(r.mse_alpha_hat))),
        ("mean_s0_hat", Box::new(|r| cell(r.mean_s0_hat))),
        ("mean_alpha_hat", Box::new(|r| cell(r.mean_alpha_hat))),
    ];
    for (name, f) in &lines {
        let _ = write!(text, "{name:<label_w$}");
        for r in &table.rows {
            let _ = write!(text, "{:>col_w$}", f(r));
        }
        let _ = writeln!(text);
    }
    if !table.failures.is_empty() {
        let _ = writeln!(text);
        for f in &table.failures {
            let _ = writeln!(text, "failed replication {} (seed {}): {}", f.rep, f.seed, f.error);
        }
    }
    Report { text, summary }
}

/// Per-replication, per-level rows: `rep, seed` followed by the estimator columns.
pub fn write_replications_csv<W: Write>(table: &MseTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["rep", "seed"];
    header.extend(RESULT_COLUMNS);
    w.write_record(&header)?;
    for rep in &table.replications {
        for lv in &rep.levels {
            let mut rec = vec![rep.rep.to_string(), rep.seed.to_string()];
            match &lv.estimate {
                Some(e) => rec.extend(result_fields(e)),
                None => {
                    rec.extend([lv.j.to_string(), lv.a_j.to_string(), lv.delta_bar.to_string()]);
                    rec.extend(std::iter::repeat_n(String::new(), RESULT_COLUMNS.len() - 3));
                }
            }
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_mse_csv<W: Write>(table: &MseTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MSE_COLUMNS)?;
    for r in &table.rows {
        w.write_record([
            r.j.to_string(),
            r.a_j.to_string(),
            r.n.to_string(),
            r.n_estimates.to_string(),
            r.mse_delta_bar.to_string(),
            r.se_mse_delta_bar.to_string(),
            opt(r.mse_ddelta),
            opt(r.mse_s0_hat),
            opt(r.mse_alpha_hat),
            opt(r.mean_s0_hat),
            opt(r.mean_alpha_hat),
            opt(r.mean_abs_err_s0),
            opt(r.mean_abs_err_alpha),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `replications.csv`, `mse_table.csv` and `summary.json` into `dir`.
pub fn write_outputs(table: &MseTable, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let reps = dir.join("replications.csv");
    write_replications_csv(table, BufWriter::new(File::create(&reps)?))?;
    let mse = dir.join("mse_table.csv");
    write_mse_csv(table, BufWriter::new(File::create(&mse)?))?;
    let json = dir.join("summary.json");
    let mut f = BufWriter::new(File::create(&json)?);
    serde_json::to_writer_pretty(&mut f, &summarize(table).summary)?;
    writeln!(f)?;
    f.flush()?;
    Ok(vec![reps, mse, json])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(j: usize, est: bool) -> MseRow {
        let v = est.then_some(0.5);
        MseRow {
            j,
            a_j: 4.0 * j as f64,
            n: 3,
            n_estimates: if est { 3 } else { 0 },
            mse_delta_bar: 0.1 / j as f64,
            se_mse_delta_bar: 0.01,
            mse_ddelta: v,
            mse_s0_hat: v,
            mse_alpha_hat: v,
            mean_s0_hat: v,
            mean_alpha_hat: v,
            mean_abs_err_s0: v,
            mean_abs_err_alpha: v,
        }
    }

    fn table(rows: Vec<MseRow>) -> MseTable {
        MseTable {
            targets: Targets {
                s0: 1.5,
                alpha: 0.1,
                delta_bar: 5.0,
                ddelta: 2.0,
            },
            backend: Backend::ExactGaussian,
            replications_requested: 3,
            rows,
            replications: vec![],
            failures: vec![],
        }
    }

    fn j_columns(text: &str) -> usize {
        text.lines()
            .find(|l| l.starts_with("quantity"))
            .unwrap()
            .split_whitespace()
            .filter(|w| w.starts_with("j="))
            .count()
    }

    #[test]
    fn one_column_per_level() {
        assert_eq!(j_columns(&summarize(&table(vec![row(1, true)])).text), 1);
        let six: Vec<MseRow> = (1..=6).map(|j| row(j, j < 6)).collect();
        let rep = summarize(&table(six));
        assert_eq!(j_columns(&rep.text), 6);
        assert_eq!(rep.summary.levels.len(), 6);
        assert!(rep.text.contains(" -"));
    }

    #[test]
    fn csv_files_have_stable_headers() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&table(vec![row(1, true), row(2, false)]), dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let mse = std::fs::read_to_string(dir.path().join("mse_table.csv")).unwrap();
        assert!(mse.starts_with(&MSE_COLUMNS.join(",")));
        assert_eq!(mse.lines().count(), 3);
        let reps = std::fs::read_to_string(dir.path().join("replications.csv")).unwrap();
        assert!(reps.starts_with("rep,seed,j,a_j,"));
        let s: Summary =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(s.levels[1].mse_s0_hat, None);
    }
}
