use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH: f64 = -1.0 / E;
const MAX_ITER: usize = 50;

/// Principal branch `W0` of the Lambert W function, the solution `w ≥ −1` of `w·e^w = x`.
///
/// Accepts `x ≥ −1/e`. Values within a few ulps below the branch point are
/// snapped to `−1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x == f64::INFINITY {
        return Err(Error::domain("lambert_w0", format!("argument {x} is not finite")));
    }
    let gap = x - BRANCH;
    if gap.abs() <= 4.0 * f64::EPSILON {
        return Ok(-1.0);
    }
    if gap < 0.0 {
        return Err(Error::domain(
            "lambert_w0",
            format!("argument {x} is below the branch point -1/e"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = (w - step).max(-1.0);
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next;
        if done {
            break;
        }
    }

    if defect_ok(w, x) {
        return Ok(w);
    }
    // Halley can stall one ulp away; a couple of Newton steps settle it.
    for _ in 0..4 {
        let ew = w.exp();
        let f = w * ew - x;
        let d = ew * (w + 1.0);
        if d == 0.0 {
            break;
        }
        w = (w - f / d).max(-1.0);
        if defect_ok(w, x) {
            return Ok(w);
        }
    }
    Err(Error::Convergence {
        what: "lambert_w0",
        iterations: MAX_ITER,
    })
}

fn defect_ok(w: f64, x: f64) -> bool {
    let defect = (w * w.exp() - x).abs();
    let bound = if x.abs() < 1e-2 {
        1e-14
    } else {
        1e-12 * x.abs().max(1.0)
    };
    defect <= bound
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}
