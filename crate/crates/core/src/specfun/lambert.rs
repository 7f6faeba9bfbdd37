//! Lower real branch of the Lambert W function.

use core::f64::consts::E;

use num_traits::Float;

use crate::error::{Error, Result};

/// W_{-1}(x) for x in [-1/e, 0): the solution of w e^w = x with w <= -1.
pub fn lambert_w_m1(x: f64) -> Result<f64> {
    let branch_point = -1.0 / E;
    if !(x < 0.0) || x < branch_point - 1e-15 {
        return Err(Error::Domain("W_{-1} is defined on [-1/e, 0)"));
    }
    let p2 = 2.0 * (1.0 + E * x);
    if p2 <= 1e-30 {
        return Ok(-1.0);
    }
    let mut w = if p2 < 0.5 {
        // branch-point series in p = -sqrt(2(1 + e x))
        let p = -p2.sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        // Halley step
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_point() {
        assert_eq!(lambert_w_m1(-1.0 / E).unwrap(), -1.0);
    }

    #[test]
    fn residual_small() {
        for &x in &[-0.3678, -0.3, -0.1, -1e-3, -1e-6, -1e-12, -1e-100] {
            let w = lambert_w_m1(x).unwrap();
            assert!(w <= -1.0);
            assert!((w * w.exp() - x).abs() < 1e-13 * x.abs(), "x = {x}");
        }
    }

    #[test]
    fn newton_oracle_at_minus_tenth() {
        // independent Newton iteration on w e^w = x from w = -4
        let x = -0.1f64;
        let mut w = -4.0f64;
        for _ in 0..60 {
            w -= (w * w.exp() - x) / (w.exp() * (w + 1.0));
        }
        let got = lambert_w_m1(x).unwrap();
        assert!((got - w).abs() < 1e-12);
        assert!((got + 3.577_152).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w_m1(0.0).is_err());
        assert!(lambert_w_m1(0.5).is_err());
        assert!(lambert_w_m1(-0.5).is_err());
    }
}
