//! Complete elliptic integral of the first kind via the arithmetic–geometric mean.

use std::f64::consts::PI;

use crate::{Error, Result};

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `K(m) = ∫_0^{π/2} dθ / sqrt(1 - m sin²θ)` for `m < 1`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(m < 1.0) || m.is_nan() {
        return Err(Error::Domain(format!("elliptic K requires m < 1, got {m}")));
    }
    Ok(PI / (2.0 * agm(1.0, (1.0 - m).sqrt())))
}

/// `K` as a function of the complementary modulus `k' = sqrt(1 - m) ∈ (0, 1]`,
/// for callers that know `k'` more accurately than `m`.
pub fn elliptic_k_complement(kp: f64) -> Result<f64> {
    if !(kp > 0.0) || !kp.is_finite() {
        return Err(Error::Domain(format!("complementary modulus must be > 0, got {kp}")));
    }
    Ok(PI / (2.0 * agm(1.0, kp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::integrate_adaptive;
    use approx::assert_relative_eq;

    #[test]
    fn anchor_values() {
        assert_relative_eq!(elliptic_k(0.0).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(elliptic_k(0.5).unwrap(), 1.854_074_677_301_372, max_relative = 1e-14);
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(2.0).is_err());
    }

    #[test]
    fn agrees_with_defining_integral() {
        for m in [-2.0, 0.1, 0.5, 0.9, 0.99] {
            let q = integrate_adaptive(|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14, 0.0)
                .unwrap();
            assert_relative_eq!(elliptic_k(m).unwrap(), q, max_relative = 1e-12);
        }
    }

    #[test]
    fn logarithmic_divergence() {
        let m = 0.999999;
        let k = elliptic_k(m).unwrap();
        assert!(k > 7.0);
        let asym = 0.5 * (16.0 / (1.0 - m)).ln();
        assert!((k - asym).abs() < 1e-5);
        let kp: f64 = 1e-9;
        assert_relative_eq!(elliptic_k_complement(kp).unwrap(), (4.0 / kp).ln(), max_relative = 1e-12);
    }
}
