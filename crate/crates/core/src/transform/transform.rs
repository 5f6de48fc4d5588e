use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::FilterSpec;
use crate::simulate::{CoefficientPanel, PanelLevel, PathRealization, Provenance};

use super::ScaleSchedule;

/// Inputs of [`panel_from_path`].
#[derive(Debug, Clone, Copy)]
pub struct TransformRequest<'a> {
    pub path: &'a PathRealization,
    pub filter: &'a FilterSpec,
    pub schedule: &'a ScaleSchedule,
}

fn window(filter: &FilterSpec) -> Result<f64> {
    if !filter.has_time_domain() {
        return Err(Error::domain(
            "filter_transform",
            format!("filter '{}' has no time-domain form", filter.name),
        ));
    }
    filter.time_support().ok_or_else(|| {
        Error::domain(
            "filter_transform",
            format!("filter '{}' has no time support", filter.name),
        )
    })
}

fn slack(path: &PathRealization) -> f64 {
    1e-9 * path.dt
}

fn check_coverage(path: &PathRealization, lo: f64, hi: f64, level: Option<usize>) -> Result<()> {
    let eps = slack(path);
    if path.t0 > lo + eps || path.t_end() < hi - eps {
        return Err(Error::Coverage {
            need_lo: lo,
            need_hi: hi,
            have_lo: path.t0,
            have_hi: path.t_end(),
            level,
        });
    }
    Ok(())
}

fn transform_unchecked(path: &PathRealization, filter: &FilterSpec, a: f64, b: f64, half: f64) -> f64 {
    let lo = b - half;
    let hi = b + half;
    let eps = 1e-9;
    let i_lo = (((lo - path.t0) / path.dt) - eps).ceil().max(0.0) as usize;
    let i_hi = ((((hi - path.t0) / path.dt) + eps).floor() as usize).min(path.len() - 1);
    let mut acc = 0.0;
    for i in i_lo..=i_hi {
        let t = path.time(i);
        acc += filter.psi((t - b) / a).unwrap_or(0.0) * path.values[i];
    }
    acc * path.dt / a.sqrt()
}

/// `d_x(a, b) ≈ (dt/√a) Σ_i ψ((t_i − b)/a) X(t_i)` over samples with `|t_i − b| ≤ a·T_ψ`.
pub fn filter_transform(path: &PathRealization, filter: &FilterSpec, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0 && b.is_finite()) {
        return Err(Error::domain(
            "filter_transform",
            "scale must be positive and shift finite",
        ));
    }
    let half = a * window(filter)?;
    check_coverage(path, b - half, b + half, None)?;
    Ok(transform_unchecked(path, filter, a, b, half))
}

/// Transforms the path at every `(a_j, b_jk)` of the schedule.
pub fn panel_from_path(req: TransformRequest<'_>) -> Result<CoefficientPanel> {
    let t_psi = window(req.filter)?;
    let mut levels = Vec::with_capacity(req.schedule.levels().len());
    for l in req.schedule.levels() {
        let shifts = ScaleSchedule::shifts(l);
        let half = l.a * t_psi;
        check_coverage(req.path, shifts[0] - half, shifts[shifts.len() - 1] + half, Some(l.j))?;
        let coeffs = shifts
            .par_iter()
            .map(|&b| transform_unchecked(req.path, req.filter, l.a, b, half))
            .collect();
        levels.push(PanelLevel {
            j: l.j,
            a: l.a,
            shifts,
            coeffs,
        });
    }
    CoefficientPanel::new(levels, Provenance::PathTransform, req.path.seed)
}

/// Time range a path must cover for [`panel_from_path`].
pub fn required_extent(filter: &FilterSpec, schedule: &ScaleSchedule) -> Result<(f64, f64)> {
    let t_psi = window(filter)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for l in schedule.levels() {
        let half = l.a * t_psi;
        lo = lo.min(l.gamma - half);
        hi = hi.max(l.m as f64 * l.gamma + half);
    }
    Ok((lo, hi))
}
