//! The feasible region `R_y = {0 < y1 < 1, 0 < y2 < y1²/2}`, the reflection of
//! infeasible statistics into it, and the closed-form inverse of
//! `(s0, α) ↦ (s0^{-4α}, α·s0^{-4α−2})`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::lambert_w0;

/// Which adjustment rule produced a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Already feasible.
    None,
    /// `0 < y1 < 1`, `y2 ≥ y1²/2`.
    Case1,
    /// `0 < y1 < 1`, `y2 ≤ 0`.
    Case2,
    /// `y1 ≥ 1`, `0 < y2 < 1/2`.
    Case3,
    /// `y1 ≥ 1`, `y2 ≥ 1/2`.
    Case4,
    /// `y1 ≥ 1`, `y2 ≤ 0`.
    Case5,
    /// `y1 ≤ 0` or non-finite input: reflected/clamped, then cases 1–2 applied.
    Clamp,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::None => "none",
            Case::Case1 => "case1",
            Case::Case2 => "case2",
            Case::Case3 => "case3",
            Case::Case4 => "case4",
            Case::Case5 => "case5",
            Case::Clamp => "clamp",
        };
        f.write_str(s)
    }
}

/// A point of `R_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePoint {
    pub y1: f64,
    pub y2: f64,
    /// True unless the input was already feasible.
    pub adjusted: bool,
    pub case_applied: Case,
    /// True if a boundary landing was pushed inward.
    pub nudged: bool,
}

/// Strict membership in `R_y`.
pub fn in_region(y1: f64, y2: f64) -> bool {
    y1 > 0.0 && y1 < 1.0 && y2 > 0.0 && y2 < 0.5 * y1 * y1
}

/// `(s0^{-4α}, α·s0^{-4α−2})`.
pub fn forward_map(s0: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(s0 > 1.0 && s0.is_finite()) || !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(
            "forward_map",
            format!("(s0, alpha) = ({s0}, {alpha}) outside (1, inf) x (0, 1/2)"),
        ));
    }
    let y1 = s0.powf(-4.0 * alpha);
    Ok((y1, alpha * y1 / (s0 * s0)))
}

fn step(x: f64) -> f64 {
    1e-12_f64.max(1e-9 * x.abs())
}

/// Pushes a point that landed on or past `∂R_y` just inside, toward `(y1, y1²/4)`.
fn nudge(mut y1: f64, mut y2: f64) -> (f64, f64, bool) {
    let mut moved = false;
    if y1 >= 1.0 {
        y1 = 1.0 - step(1.0);
        moved = true;
    } else if y1 <= 0.0 {
        y1 = step(0.0);
        moved = true;
    }
    let upper = 0.5 * y1 * y1;
    let mid = 0.25 * y1 * y1;
    if y2 >= upper {
        y2 = (upper - step(upper)).max(mid);
        moved = true;
    } else if y2 <= 0.0 {
        y2 = step(0.0).min(mid);
        moved = true;
    }
    if !in_region(y1, y2) {
        y2 = mid;
        moved = true;
    }
    (y1, y2, moved)
}

fn reflect_y1(y1: f64) -> f64 {
    0.5 * (1.0 + (2.0 * y1).sqrt())
}

fn adjust_inner(y1: f64, y2: f64) -> (f64, f64, Case) {
    if y1 < 1.0 {
        if y2 >= 0.5 * y1 * y1 {
            return (y1, (y1 * y1 - y2).max(0.25 * y1 * y1), Case::Case1);
        }
        if y2 <= 0.0 {
            return (y1, (-y2).min(0.25 * y1 * y1), Case::Case2);
        }
        return (y1, y2, Case::None);
    }
    if y2 > 0.0 && y2 < 0.5 {
        return ((2.0 - y1).max(reflect_y1(y2)), y2, Case::Case3);
    }
    if y2 >= 0.5 {
        let y2a = (1.0 - y2).max(0.25);
        return ((2.0 - y1).max(reflect_y1(y2a)), y2a, Case::Case4);
    }
    let y2a = (-y2).min(0.25);
    ((2.0 - y1).max(reflect_y1(y2a)), y2a, Case::Case5)
}

/// Maps any `(y1, y2)` into `R_y`; the identity on `R_y`.
pub fn adjust(y1_raw: f64, y2_raw: f64) -> FeasiblePoint {
    if in_region(y1_raw, y2_raw) {
        return FeasiblePoint {
            y1: y1_raw,
            y2: y2_raw,
            adjusted: false,
            case_applied: Case::None,
            nudged: false,
        };
    }
    let (y1, y2, case) = if !(y1_raw.is_finite() && y2_raw.is_finite()) {
        (0.5, 0.0625, Case::Clamp)
    } else if y1_raw <= 0.0 {
        let (a, b, _) = adjust_inner((-y1_raw).clamp(step(0.0), 1.0 - step(1.0)), y2_raw);
        (a, b, Case::Clamp)
    } else {
        adjust_inner(y1_raw, y2_raw)
    };
    let (y1, y2, nudged) = nudge(y1, y2);
    FeasiblePoint {
        y1,
        y2,
        adjusted: true,
        case_applied: case,
        nudged,
    }
}

/// Unique `(s0, α) ∈ (1, ∞) × (0, 1/2)` with `forward_map(s0, α) = (y1, y2)`.
pub fn solve(point: &FeasiblePoint) -> Result<(f64, f64)> {
    let (y1, y2) = (point.y1, point.y2);
    if !in_region(y1, y2) {
        return Err(Error::domain(
            "solve",
            format!("({y1}, {y2}) is not inside the feasible region"),
        ));
    }
    let z = -(y1 / y2) * 0.5 * y1.ln();
    let w = lambert_w0(z)?;
    Ok(((0.5 * w).exp(), (y2 / y1) * w.exp()))
}
