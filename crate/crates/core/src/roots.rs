//! Bracketing scalar root finder.

use crate::error::{Error, Result};

/// Bisection for a non-decreasing `f` with `f(lo) <= 0 <= f(hi)`.
///
/// Stops once the bracket is narrower than `tol` or can no longer be split
/// in double precision (`tol = 0.0` runs to full precision).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn full_precision() {
        let r = bisect(|x| x - (-x).exp(), 0.0, 1.0, 0.0).unwrap();
        assert!((r - (-r).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(matches!(
            bisect(|x| x + 1.0, 0.0, 1.0, 1e-9),
            Err(Error::InvalidBracket { .. })
        ));
    }

    #[test]
    fn endpoint_roots() {
        assert_eq!(bisect(|x| x, 0.0, 1.0, 1e-9).unwrap(), 0.0);
        assert_eq!(bisect(|x| x - 1.0, 0.0, 1.0, 1e-9).unwrap(), 1.0);
    }
}
