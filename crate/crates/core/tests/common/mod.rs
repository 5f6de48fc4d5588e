//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// `C_n^{(d)}(u) = Σ_k (−1)^k (d)_{n−k} / (k! (n−2k)!) (2u)^{n−2k}` in exact rational
/// arithmetic, where `(d)_m = Γ(d+m)/Γ(d)` is the rising factorial.
pub fn gegenbauer_direct(n: usize, d: f64, u: f64) -> f64 {
    let d = exact(d);
    let two_u = exact(u) * BigRational::from_integer(BigInt::from(2));
    let fact = |m: usize| (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let mut sum = BigRational::zero();
    for k in 0..=n / 2 {
        let p = n - 2 * k;
        let rising = (0..n - k).fold(BigRational::one(), |acc, i| {
            acc * (d.clone() + BigRational::from_integer(BigInt::from(i)))
        });
        let pow = (0..p).fold(BigRational::one(), |acc, _| acc * two_u.clone());
        let term = rising * pow / BigRational::from_integer(fact(k) * fact(p));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum.to_f64().expect("representable")
}

/// Composite midpoint rule with `n` cells.
pub fn midpoint(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| f(lo + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Midpoint rule on `n` and `2n` cells, Richardson-combined for an error `∝ h^order`.
pub fn midpoint_richardson(f: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64, n: usize, order: f64) -> f64 {
    let coarse = midpoint(f, lo, hi, n);
    let fine = midpoint(f, lo, hi, 2 * n);
    let r = 2f64.powf(order);
    (r * fine - coarse) / (r - 1.0)
}

/// Log-spaced grid of `n` points on `[lo, hi]`, `lo > 0`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Sample variance with divisor `n − 1`.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}
