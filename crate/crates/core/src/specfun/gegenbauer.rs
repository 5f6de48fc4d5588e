use crate::error::{Error, Result};

fn check(d: f64, u: f64) -> Result<()> {
    if !(d.is_finite() && d > -0.5 && d < 0.5) || d == 0.0 {
        return Err(Error::domain(
            "gegenbauer_coeff",
            format!("d = {d} must lie in (-1/2, 1/2) and be non-zero"),
        ));
    }
    if !(u.is_finite() && u.abs() <= 1.0) {
        return Err(Error::domain(
            "gegenbauer_coeff",
            format!("|u| = {} exceeds 1", u.abs()),
        ));
    }
    Ok(())
}

/// Gegenbauer polynomial `C_n^{(d)}(u)` by the three-term recurrence.
pub fn gegenbauer_coeff(n: usize, d: f64, u: f64) -> Result<f64> {
    check(d, u)?;
    Ok(recurrence(n + 1, d, u)[n])
}

/// The first `count` coefficients `C_0^{(d)}(u), ..., C_{count-1}^{(d)}(u)`.
pub fn gegenbauer_coeffs(count: usize, d: f64, u: f64) -> Result<Vec<f64>> {
    check(d, u)?;
    Ok(recurrence(count, d, u))
}

fn recurrence(count: usize, d: f64, u: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(count);
    if count == 0 {
        return c;
    }
    c.push(1.0);
    if count == 1 {
        return c;
    }
    c.push(2.0 * d * u);
    for n in 2..count {
        let nf = n as f64;
        let next = 2.0 * u * ((nf - 1.0 + d) / nf) * c[n - 1] - ((nf - 2.0 + 2.0 * d) / nf) * c[n - 2];
        c.push(next);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(gegenbauer_coeff(0, 0.1, 0.3).unwrap(), 1.0);
        assert!((gegenbauer_coeff(1, 0.1, 0.3).unwrap() - 0.06).abs() < 1e-16);
        assert!((gegenbauer_coeff(2, 0.1, 0.3).unwrap() + 0.0802).abs() < 1e-15);
    }

    #[test]
    fn vector_matches_scalar() {
        let v = gegenbauer_coeffs(40, 0.1, 0.3).unwrap();
        assert_eq!(v.len(), 40);
        for (n, &c) in v.iter().enumerate() {
            assert_eq!(c, gegenbauer_coeff(n, 0.1, 0.3).unwrap());
        }
        assert!(gegenbauer_coeffs(0, 0.1, 0.3).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gegenbauer_coeff(3, 0.0, 0.3).is_err());
        assert!(gegenbauer_coeff(3, 0.5, 0.3).is_err());
        assert!(gegenbauer_coeff(3, 0.1, 1.01).is_err());
        assert!(gegenbauer_coeff(3, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn value_at_one_is_rising_factorial_ratio() {
        // C_n^{(d)}(1) = (2d)_n / n!
        let d = 0.3;
        let mut expect = 1.0;
        for n in 0..15 {
            if n > 0 {
                expect *= (2.0 * d + n as f64 - 1.0) / n as f64;
            }
            let got = gegenbauer_coeff(n, d, 1.0).unwrap();
            assert!((got - expect).abs() < 1e-13, "n = {n}");
        }
    }
}
