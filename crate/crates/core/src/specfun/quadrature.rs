//! Adaptive Gauss–Kronrod quadrature with support for integrable endpoint
//! singularities and improper ranges.
//!
//! Regular pieces are refined by global adaptive bisection with the 21-point
//! Kronrod rule. Pieces adjacent to a declared singularity are cut into a
//! dyadic sequence of intervals shrinking toward the singular point; the
//! partial sums are accelerated with iterated Aitken extrapolation. Infinite
//! ranges go through `λ = tan θ`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and split points for [`integrate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target.
    pub rel_tol: f64,
    /// Budget of interval bisections shared by the whole integral.
    pub max_subdivisions: usize,
    /// Abscissae where the integrand may blow up (integrably).
    pub singularities: Vec<f64>,
    /// Abscissae where the integrand is bounded but not smooth (jumps, kinks).
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 5000,
            singularities: Vec::new(),
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_singularities(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singularities.extend(points);
        self
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain("quadrature", "abs_tol must be positive"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain("quadrature", "rel_tol must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("quadrature", "max_subdivisions must be at least 1"));
        }
        if self
            .singularities
            .iter()
            .chain(&self.breakpoints)
            .any(|p| !p.is_finite())
        {
            return Err(Error::domain("quadrature", "split points must be finite"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral of `f` over `(lo, hi)`; either bound may be infinite.
///
/// Split points outside the interval are ignored.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_error(f, lo, hi, spec).map(|(v, _)| v)
}

/// Like [`integrate`] but also returns the error estimate.
pub fn integrate_with_error<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::domain("quadrature", "integration bounds are NaN"));
    }
    if lo == hi {
        return Ok((0.0, 0.0));
    }
    if lo > hi {
        return match run(&f, hi, lo, spec) {
            Ok((v, e)) => Ok((-v, e)),
            Err(Error::NonConvergence { estimate, error_bound }) => Err(Error::NonConvergence {
                estimate: -estimate,
                error_bound,
            }),
            Err(e) => Err(e),
        };
    }
    run(&f, lo, hi, spec)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208931434911,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const MIN_PIECES: usize = 6;
const MAX_PIECES: usize = 1100;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.a.total_cmp(&self.a))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    val: f64,
    err: f64,
    resabs: f64,
}

impl Tally {
    fn add(&mut self, other: Tally) {
        self.val += other.val;
        self.err += other.err;
        self.resabs += other.resabs;
    }

    fn floor(&self) -> f64 {
        100.0 * f64::EPSILON * self.resabs
    }
}

struct Ctx<'a> {
    f: &'a dyn Fn(f64) -> f64,
    tan: bool,
    used: usize,
    budget: usize,
    exhausted: bool,
}

impl Ctx<'_> {
    fn eval(&self, x: f64) -> Result<f64> {
        let y = if self.tan {
            let c = x.cos();
            (self.f)(x.tan()) / (c * c)
        } else {
            (self.f)(x)
        };
        if y.is_finite() {
            Ok(y)
        } else {
            let at = if self.tan { x.tan() } else { x };
            Err(Error::domain("quadrature", format!("integrand is not finite at {at}")))
        }
    }

    fn gk21(&self, a: f64, b: f64) -> Result<Segment> {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let fc = self.eval(center)?;
        let mut resg = 0.0;
        let mut resk = WGK[10] * fc;
        let mut resabs = resk.abs();
        let mut fv1 = [0.0; 10];
        let mut fv2 = [0.0; 10];
        for j in 0..10 {
            let dx = half * XGK[j];
            let f1 = self.eval(center - dx)?;
            let f2 = self.eval(center + dx)?;
            fv1[j] = f1;
            fv2[j] = f2;
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[10] * (fc - reskh).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
        }
        let hl = half.abs();
        let val = resk * half;
        resabs *= hl;
        resasc *= hl;
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        Ok(Segment { a, b, val, err, resabs })
    }

    /// Global adaptive bisection until the summed error meets `tol(total)`.
    fn adapt(&mut self, segs: Vec<Segment>, tol: &dyn Fn(f64) -> f64) -> Result<Tally> {
        let mut heap: BinaryHeap<Segment> = segs.into_iter().collect();
        let mut settled: Vec<Segment> = Vec::new();
        let exact = |heap: &BinaryHeap<Segment>, settled: &[Segment]| {
            let mut t = Tally::default();
            let mut all: Vec<&Segment> = heap.iter().chain(settled.iter()).collect();
            all.sort_by(|x, y| x.a.total_cmp(&y.a));
            for s in all {
                t.add(Tally {
                    val: s.val,
                    err: s.err,
                    resabs: s.resabs,
                });
            }
            t
        };
        let mut run = exact(&heap, &settled);
        loop {
            if run.err <= tol(run.val).max(run.floor()) {
                run = exact(&heap, &settled);
                if run.err <= tol(run.val).max(run.floor()) {
                    return Ok(run);
                }
            }
            if self.exhausted || self.used >= self.budget {
                self.exhausted = true;
                return Ok(exact(&heap, &settled));
            }
            let Some(worst) = heap.pop() else {
                return Ok(exact(&heap, &settled));
            };
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b)
                || (worst.b - worst.a).abs() <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
            {
                settled.push(worst);
                if heap.is_empty() {
                    return Ok(exact(&heap, &settled));
                }
                continue;
            }
            self.used += 1;
            let left = self.gk21(worst.a, mid)?;
            let right = self.gk21(mid, worst.b)?;
            run.val += left.val + right.val - worst.val;
            run.err += left.err + right.err - worst.err;
            run.resabs += left.resabs + right.resabs - worst.resabs;
            heap.push(left);
            heap.push(right);
        }
    }

    /// Integral over the segment between `sigma` (singular) and `other`.
    fn singular_side(&mut self, sigma: f64, other: f64, tol: f64) -> Result<(Tally, bool)> {
        let len = other - sigma;
        let piece_tol = 1e-3 * tol;
        let mut sums: Vec<f64> = Vec::new();
        let mut first: Vec<f64> = Vec::new();
        let mut acc = Tally::default();
        let mut prev: Option<f64> = None;
        let mut last_diff = f64::INFINITY;
        let mut hits = 0;
        let mut outer = other;
        let mut scale = 0.5;
        for k in 0..MAX_PIECES {
            let inner = sigma + len * scale;
            scale *= 0.5;
            if inner == sigma || inner == outer || scale == 0.0 {
                break;
            }
            let (a, b) = if inner < outer { (inner, outer) } else { (outer, inner) };
            let seg = self.gk21(a, b)?;
            let piece = self.adapt(vec![seg], &|_| piece_tol)?;
            acc.add(piece);
            sums.push(acc.val);
            let n = sums.len();
            if n >= 3 {
                first.push(aitken(sums[n - 3], sums[n - 2], sums[n - 1]));
            }
            let m = first.len();
            let est = if m >= 3 {
                aitken(first[m - 3], first[m - 2], first[m - 1])
            } else if m > 0 {
                first[m - 1]
            } else {
                acc.val
            };
            if let Some(p) = prev {
                let diff = (est - p).abs();
                if k >= MIN_PIECES && diff <= tol {
                    hits += 1;
                    if hits >= 2 {
                        let err = diff.max(last_diff) + acc.err;
                        return Ok((
                            Tally {
                                val: est,
                                err,
                                resabs: acc.resabs,
                            },
                            true,
                        ));
                    }
                } else {
                    hits = 0;
                }
                last_diff = diff;
            }
            prev = Some(est);
            outer = inner;
            if self.exhausted {
                break;
            }
        }
        let val = prev.unwrap_or(acc.val);
        Ok((
            Tally {
                val,
                err: last_diff + acc.err,
                resabs: acc.resabs,
            },
            false,
        ))
    }
}

fn aitken(s0: f64, s1: f64, s2: f64) -> f64 {
    let d1 = s1 - s0;
    let d2 = s2 - s1;
    if d1 == 0.0 || d2 == 0.0 {
        return s2;
    }
    let r = d2 / d1;
    if !(r > -1.0 && r < 0.999) {
        return s2;
    }
    let out = s2 + d2 * r / (1.0 - r);
    if out.is_finite() {
        out
    } else {
        s2
    }
}

fn run(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let tan = lo.is_infinite() || hi.is_infinite();
    let map = |x: f64| {
        if tan {
            if x == f64::INFINITY {
                FRAC_PI_2
            } else if x == f64::NEG_INFINITY {
                -FRAC_PI_2
            } else {
                x.atan()
            }
        } else {
            x
        }
    };

    let mut points: Vec<(f64, bool)> = vec![(map(lo), lo.is_infinite()), (map(hi), hi.is_infinite())];
    for &s in &spec.singularities {
        if s >= lo && s <= hi {
            points.push((map(s), true));
        }
    }
    for &p in spec.breakpoints.iter().chain(std::iter::once(&0.0)) {
        if p > lo && p < hi {
            points.push((map(p), false));
        }
    }
    points.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, bool)> = Vec::with_capacity(points.len());
    for (x, sing) in points {
        match merged.last_mut() {
            Some(last) if last.0 == x => last.1 |= sing,
            _ => merged.push((x, sing)),
        }
    }

    let mut ctx = Ctx {
        f,
        tan,
        used: 0,
        budget: spec.max_subdivisions,
        exhausted: false,
    };

    let mut regular = Vec::new();
    let mut singular: Vec<(f64, f64)> = Vec::new();
    let mut rough = 0.0;
    for w in merged.windows(2) {
        let ((a, sa), (b, sb)) = (w[0], w[1]);
        let seg = ctx.gk21(a, b)?;
        rough += seg.val.abs();
        match (sa, sb) {
            (false, false) => regular.push(seg),
            (true, false) => singular.push((a, b)),
            (false, true) => singular.push((b, a)),
            (true, true) => {
                let mid = 0.5 * (a + b);
                singular.push((a, mid));
                singular.push((b, mid));
            }
        }
    }

    let sing_tol = 0.2 * spec.target(rough) / singular.len().max(1) as f64;
    let mut sing = Tally::default();
    let mut sing_ok = true;
    for &(sigma, other) in &singular {
        let (t, ok) = ctx.singular_side(sigma, other, sing_tol)?;
        sing.add(t);
        sing_ok &= ok;
    }

    let reg = ctx.adapt(regular, &|v| (spec.target(v + sing.val) - sing.err).max(0.0))?;

    let value = sing.val + reg.val;
    let err = sing.err + reg.err;
    let floor = 100.0 * f64::EPSILON * (sing.resabs + reg.resabs);
    if !sing_ok || err > spec.target(value).max(floor) {
        return Err(Error::NonConvergence {
            estimate: value,
            error_bound: err,
        });
    }
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, -1.0, 3.0, &QuadratureSpec::default()).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0 - 0.25 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_over_real_line() {
        let v = integrate(
            |x| (-x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn indicator_over_real_line() {
        let ind = |x: f64| if x.abs() <= PI { 1.0 } else { 0.0 };
        let spec = QuadratureSpec::default();
        let v = integrate(ind, f64::NEG_INFINITY, f64::INFINITY, &spec).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-8, "{v}");
        let spec = spec.with_breakpoints([-PI, PI]);
        let v = integrate(ind, f64::NEG_INFINITY, f64::INFINITY, &spec).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-12, "{v}");
    }

    #[test]
    fn strong_power_singularity() {
        let spec = QuadratureSpec::default().with_singularities([0.0]);
        let v = integrate(|x: f64| x.abs().powf(-0.9), -1.0, 1.0, &spec).unwrap();
        assert!((v - 20.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn log_singularity() {
        let spec = QuadratureSpec::default().with_singularities([0.0]);
        let v = integrate(|x: f64| x.ln(), 0.0, 1.0, &spec).unwrap();
        assert!((v + 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn interior_singularity_with_smooth_factor() {
        // ∫_0^2 (x-1)^2 |x-1|^{-1/2} dx = 2 ∫_0^1 t^{3/2} dt = 4/5
        let spec = QuadratureSpec::default().with_singularities([1.0]);
        let v = integrate(|x: f64| (x - 1.0).powi(2) * (x - 1.0).abs().powf(-0.5), 0.0, 2.0, &spec).unwrap();
        assert!((v - 0.8).abs() < 1e-10, "{v}");
        // e ∫_{-1}^{1} e^t |t|^{-0.3} dt = e Σ_{n even} 2 / (n! (n + 0.7))
        let v = integrate(|x: f64| x.exp() * (x - 1.0).abs().powf(-0.3), 0.0, 2.0, &spec).unwrap();
        let mut oracle = 0.0;
        let mut fact = 1.0;
        for n in 0..40 {
            if n > 0 {
                fact *= n as f64;
            }
            if n % 2 == 0 {
                oracle += 2.0 / (fact * (n as f64 + 0.7));
            }
        }
        oracle *= std::f64::consts::E;
        assert!((v - oracle).abs() < 1e-9 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn reversed_bounds_negate() {
        let spec = QuadratureSpec::default();
        let a = integrate(|x: f64| x.sin(), 0.0, 2.0, &spec).unwrap();
        let b = integrate(|x: f64| x.sin(), 2.0, 0.0, &spec).unwrap();
        assert_eq!(a, -b);
        assert_eq!(integrate(|x: f64| x, 1.0, 1.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let spec = QuadratureSpec::new(1e-14, 1e-14).with_max_subdivisions(1);
        match integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &spec) {
            Err(Error::NonConvergence { estimate, error_bound }) => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(integrate(|x| x, 0.0, 1.0, &spec).is_err());
        let spec = QuadratureSpec::default().with_singularities([f64::NAN]);
        assert!(integrate(|x| x, 0.0, 1.0, &spec).is_err());
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate(|_| f64::NAN, 0.0, 1.0, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::Domain { .. })));
    }
}
