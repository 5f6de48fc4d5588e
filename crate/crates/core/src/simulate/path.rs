use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GegenbauerSpec;

/// Samples `x_i = X(t0 + i·dt)` of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRealization {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl PathRealization {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, seed: u64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain("path", "dt must be positive"));
        }
        if values.len() < 2 {
            return Err(Error::domain("path", "a path needs at least two samples"));
        }
        Ok(PathRealization { t0, dt, values, seed })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    /// Writes `t,x` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_writer(std::fs::File::create(path)?)
    }

    /// Reads a `t,x` file written by [`write_csv`](Self::write_csv).
    pub fn read_csv(path: &Path, seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut ts = Vec::new();
        let mut xs = Vec::new();
        for row in r.deserialize::<(f64, f64)>() {
            let (t, x) = row?;
            ts.push(t);
            xs.push(x);
        }
        if ts.len() < 2 {
            return Err(Error::domain("path", "a path needs at least two samples"));
        }
        let dt = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
        for (i, &t) in ts.iter().enumerate() {
            if (t - (ts[0] + i as f64 * dt)).abs() > 1e-6 * dt.max(1.0) {
                return Err(Error::domain("path", "time column is not uniformly spaced"));
            }
        }
        Self::new(ts[0], dt, xs, seed)
    }

    /// Writes the path to any writer as CSV.
    pub fn to_writer<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x"])?;
        for (i, x) in self.values.iter().enumerate() {
            w.write_record([self.time(i).to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Standard normal innovation with integer time index `k`.
///
/// Each index has its own ChaCha stream, so a value depends only on `(seed, k)`.
pub fn innovation(seed: u64, k: i64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    innovation_from(&mut rng, k)
}

fn innovation_from(rng: &mut ChaCha8Rng, k: i64) -> f64 {
    rng.set_stream(k as u64);
    rng.set_word_pos(0);
    rng.sample(StandardNormal)
}

/// Integer-time moving average `X(k) = Σ_n C_n ε_{k−n}` for `k` in `first..=last`.
fn integer_path(spec: &GegenbauerSpec, coeffs: &[f64], first: i64, last: i64, seed: u64) -> Vec<f64> {
    let q = coeffs.len() as i64;
    let eps_first = first - (q - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps: Vec<f64> = (eps_first..=last)
        .map(|k| spec.sigma_eps * innovation_from(&mut rng, k))
        .collect();
    (first..=last)
        .map(|k| {
            let base = (k - eps_first) as usize;
            coeffs.iter().enumerate().map(|(n, c)| c * eps[base - n]).sum()
        })
        .collect()
}

/// Truncated Gegenbauer moving average sampled at `t0 + i·dt`, `i < n_points`.
///
/// The process lives on the integers; off-integer sample times are linearly
/// interpolated between neighbouring integer values (an approximation).
pub fn gegenbauer_path(spec: &GegenbauerSpec, n_points: usize, t0: f64, dt: f64, seed: u64) -> Result<PathRealization> {
    spec.validate()?;
    if n_points < 2 {
        return Err(Error::domain("gegenbauer_path", "n_points must be at least 2"));
    }
    if !(dt.is_finite() && dt > 0.0 && t0.is_finite()) {
        return Err(Error::domain("gegenbauer_path", "t0 must be finite and dt positive"));
    }
    let coeffs = spec.coefficients()?;
    let t_last = t0 + (n_points - 1) as f64 * dt;
    let first = t0.floor() as i64;
    let last = t_last.ceil() as i64 + 1;
    let x = integer_path(spec, &coeffs, first, last, seed);
    let values = (0..n_points)
        .map(|i| {
            let t = t0 + i as f64 * dt;
            let fl = t.floor();
            let idx = (fl as i64 - first) as usize;
            let frac = t - fl;
            if frac == 0.0 {
                x[idx]
            } else {
                (1.0 - frac) * x[idx] + frac * x[idx + 1]
            }
        })
        .collect();
    PathRealization::new(t0, dt, values, seed)
}

/// Path covering `[lo, hi]` with step `dt`, starting at an integer time.
pub fn gegenbauer_path_covering(
    spec: &GegenbauerSpec,
    lo: f64,
    hi: f64,
    dt: f64,
    seed: u64,
) -> Result<PathRealization> {
    if !(hi > lo) {
        return Err(Error::domain("gegenbauer_path", "empty time range"));
    }
    let t0 = lo.floor();
    let n = ((hi - t0) / dt).ceil() as usize + 1;
    gegenbauer_path(spec, n.max(2), t0, dt, seed)
}
