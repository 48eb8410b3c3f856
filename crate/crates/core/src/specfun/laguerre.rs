//! Laguerre polynomials and the orthonormal Laguerre functions used as the
//! radial basis of each angular-momentum sector.

use super::gamma::ln_factorial;

/// `L_n^{(α)}(t)` by the three-term recurrence.
pub fn laguerre(n: usize, alpha: u32, t: f64) -> f64 {
    let a = alpha as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - t;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - t) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[L_0^{(α)}(t), …, L_n^{(α)}(t)]`.
pub fn laguerre_sequence(n: usize, alpha: u32, t: f64) -> Vec<f64> {
    let a = alpha as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + a - t);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - t) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Orthonormal Laguerre functions
/// `φ_j(t) = sqrt(j!/(j+α)!) t^{α/2} e^{-t/2} L_j^{(α)}(t)`, `j = 0..=n`.
///
/// Runs the normalised recurrence so that neither the factorials nor the
/// exponential overflow for large `j`, `α` or `t`.
pub fn laguerre_functions(n: usize, alpha: u32, t: f64) -> Vec<f64> {
    let a = alpha as f64;
    let mut out = Vec::with_capacity(n + 1);
    let phi0 = if t == 0.0 {
        if alpha == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (0.5 * a * t.ln() - 0.5 * t - 0.5 * ln_factorial(alpha as usize)).exp()
    };
    out.push(phi0);
    if n == 0 {
        return out;
    }
    out.push((1.0 + a - t) * phi0 / (1.0 + a).sqrt());
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - t) * out[j] - (jf * (jf + a)).sqrt() * out[j - 1])
            / ((jf + 1.0) * (jf + 1.0 + a)).sqrt();
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn low_degree_values() {
        assert_eq!(laguerre(0, 0, 0.7), 1.0);
        assert_eq!(laguerre(1, 0, 2.0), -1.0);
        let t: f64 = 1.0;
        let oracle = (-t.powi(5) + 25.0 * t.powi(4) - 200.0 * t.powi(3) + 600.0 * t * t - 600.0 * t + 120.0) / 120.0;
        assert_relative_eq!(laguerre(5, 0, 1.0), oracle, epsilon = 1e-15);
        assert_relative_eq!(laguerre(5, 0, 1.0), -7.0 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn associated_closed_form() {
        // L_2^{(α)}(t) = ((α+1)(α+2) - 2(α+2)t + t²)/2
        for alpha in 0..5u32 {
            let a = alpha as f64;
            let t = 1.3;
            let oracle = ((a + 1.0) * (a + 2.0) - 2.0 * (a + 2.0) * t + t * t) / 2.0;
            assert_relative_eq!(laguerre(2, alpha, t), oracle, epsilon = 1e-14);
        }
    }

    #[test]
    fn sequence_matches_pointwise() {
        let seq = laguerre_sequence(30, 3, 2.5);
        for (n, v) in seq.iter().enumerate() {
            assert_relative_eq!(*v, laguerre(n, 3, 2.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn laguerre_functions_orthonormal() {
        // ∫_0^∞ φ_j φ_k dt = δ_jk
        for alpha in [0u32, 1, 4] {
            let n = 12;
            let mut gram = vec![vec![0.0; n + 1]; n + 1];
            for p in 0..150 {
                let lo = p as f64;
                let hi = lo + 1.0;
                let r = crate::specfun::quadrature::gauss_legendre(30, lo, hi).unwrap();
                for (&t, &w) in r.nodes.iter().zip(&r.weights) {
                    let phi = laguerre_functions(n, alpha, t);
                    for j in 0..=n {
                        for k in 0..=n {
                            gram[j][k] += w * phi[j] * phi[k];
                        }
                    }
                }
            }
            for j in 0..=n {
                for k in 0..=n {
                    let e = if j == k { 1.0 } else { 0.0 };
                    assert!((gram[j][k] - e).abs() < 1e-12, "alpha={alpha} ({j},{k}) {}", gram[j][k]);
                }
            }
        }
    }

    #[test]
    fn laguerre_functions_match_definition() {
        let alpha = 2u32;
        let t = 3.7;
        let phi = laguerre_functions(10, alpha, t);
        for (j, &v) in phi.iter().enumerate() {
            let norm = (ln_factorial(j) - ln_factorial(j + alpha as usize)).exp().sqrt();
            let direct = norm * t.powf(alpha as f64 / 2.0) * (-t / 2.0).exp() * laguerre(j, alpha, t);
            assert_relative_eq!(v, direct, max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    /// Maximum of |L_n(t) - e^{t/2} J_0(sqrt((4n+2)t))| over a grid on [0, 4].
    fn bessel_error(n: usize) -> f64 {
        (0..=400)
            .map(|i| {
                let t = 4.0 * i as f64 / 400.0;
                let approx = (t / 2.0).exp() * crate::specfun::bessel::bessel_j(0, ((4 * n + 2) as f64 * t).sqrt());
                (laguerre(n, 0, t) - approx).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn laguerre_bessel_asymptotics_rate() {
        for n in [16usize, 32, 64] {
            let ratio = bessel_error(4 * n) / bessel_error(n);
            assert!((0.2..=0.6).contains(&ratio), "n = {n}: ratio {ratio}");
        }
    }

    proptest! {
        #[test]
        fn recurrence_residual(alpha in 0u32..8, t in 0.0f64..50.0) {
            let seq = laguerre_sequence(201, alpha, t);
            let a = alpha as f64;
            for n in 1..=200usize {
                let nf = n as f64;
                let lhs = (nf + 1.0) * seq[n + 1];
                let rhs = (2.0 * nf + 1.0 + a - t) * seq[n] - (nf + a) * seq[n - 1];
                let scale = lhs.abs().max(rhs.abs()).max((nf + a) * seq[n - 1].abs()).max(1e-300);
                prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
            }
        }
    }
}
