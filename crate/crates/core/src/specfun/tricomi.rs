//! Tricomi's expansion of `M(a, 1; ζ)` in Bessel functions, for large negative `a`:
//!
//! `M(a,1;ζ) = e^{ζ/2} Σ_m A_m(a) (ζ/(2-4a))^{m/2} J_m(sqrt((2-4a)ζ))`,
//!
//! with `A_m` the Taylor coefficients of
//! `f(z) = (e^z/(1+z)) (e^{2z}(1-z)/(1+z))^{-a}`.
//!
//! The same expansion, differentiated in `a` and `b`, gives the regular part
//! `M̃ = -2∂_bM - ∂_aM - (2γ + ψ(1-a) + ln ζ) M` of `Γ(a)U(a,1;ζ)`:
//!
//! `M̃ = (ln(1/2-a) - ψ(1-a)) S_J - 2 S_J̇ - S_B`,
//!
//! where `S_J` is the sum above, `S_J̇` replaces `J_m` by `∂J_ν/∂ν|_{ν=m}` and `S_B`
//! replaces `A_m` by the coefficients `B_m` of `-f(z) ln(1-z²)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::bessel::{bessel_j_seq, bessel_jdot_seq};
use super::gamma::digamma;
use crate::{Error, Result};

type C = Complex64;

/// Highest coefficient index kept in the polynomial cache.
pub const MAX_TERMS: usize = 240;

/// `A_m(a)` (at `b = 1`) as polynomials in `a`, lowest degree first.
///
/// From `ln f = Σ c_k z^k` with `k c_k = (-1)^k` (`k ≥ 2`) plus `2a` for odd
/// `k ≥ 3`, and `m A_m = Σ_k k c_k A_{m-k}`.
fn coefficient_polys() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
        for m in 1..MAX_TERMS {
            let mut acc = vec![0.0; m / 3 + 2];
            for k in 2..=m {
                let prev = &polys[m - k];
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                for (d, &c) in prev.iter().enumerate() {
                    acc[d] += sign * c;
                }
                if k % 2 == 1 {
                    for (d, &c) in prev.iter().enumerate() {
                        acc[d + 1] += 2.0 * c;
                    }
                }
            }
            while acc.len() > 1 && *acc.last().unwrap() == 0.0 {
                acc.pop();
            }
            for c in acc.iter_mut() {
                *c /= m as f64;
            }
            polys.push(acc);
        }
        polys
    })
}

/// `[A_0(a), …, A_{n-1}(a)]`.
pub fn tricomi_coefficients(a: C, n: usize) -> Result<Vec<C>> {
    if n > MAX_TERMS {
        return Err(Error::Range(format!("at most {MAX_TERMS} Tricomi coefficients, asked for {n}")));
    }
    Ok(coefficient_polys()[..n]
        .iter()
        .map(|p| p.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * a + c))
        .collect())
}

fn derived_coefficients(coef: &[C]) -> Vec<C> {
    (0..coef.len())
        .map(|m| {
            (1..=m / 2)
                .map(|j| coef[m - 2 * j] / j as f64)
                .sum::<C>()
        })
        .collect()
}

fn check_range(a: C, zeta: f64) -> Result<()> {
    if !(a.re <= -1.0 && a.im.abs() <= 1.0) {
        return Err(Error::Range(format!(
            "Tricomi expansion needs Re a <= -1 and |Im a| <= 1, got a = {a}"
        )));
    }
    if !(zeta > 0.0) || !zeta.is_finite() {
        return Err(Error::Range(format!("zeta must be positive and finite, got {zeta}")));
    }
    Ok(())
}

/// `f(z)` for the coefficient generating function (`b = 1`).
fn generating_fn(a: C, z: C) -> C {
    let one = C::new(1.0, 0.0);
    let lf = z - (one + z).ln() - a * (2.0 * z + (one - z).ln() - (one + z).ln());
    lf.exp()
}

/// Cauchy-estimate tail bound for the partial sum with `n` terms.
///
/// `|A_m| ≤ max_{|z|=r}|f| r^{-m}` with `r = |a|^{-5/12}` and `|J_m(w)| ≤ e^{|Im w|}`,
/// so the tail is dominated by a geometric series with ratio
/// `|ζ/(2-4a)|^{1/2} / r ∝ |a|^{-1/12}`.
fn remainder_bound(a: C, zeta: f64, w: C, n: usize) -> f64 {
    let r = a.norm().powf(-5.0 / 12.0);
    let fmax = (0..256)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / 256.0;
            generating_fn(a, C::from_polar(r, th)).norm()
        })
        .fold(0.0, f64::max);
    let s = (zeta / (2.0 - 4.0 * a).norm()).sqrt();
    let q = s / r;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    (0.5 * zeta + w.im.abs()).exp() * fmax * q.powi(n as i32) / (1.0 - q)
}

/// Partial sum of the first `n` terms of the expansion, with a tail bound.
pub fn tricomi_m(a: C, zeta: f64, n: usize) -> Result<(C, f64)> {
    check_range(a, zeta)?;
    if n == 0 {
        return Err(Error::Invalid("Tricomi partial sum needs N >= 1".into()));
    }
    let x = 2.0 - 4.0 * a;
    let w = (x * zeta).sqrt();
    let s = (zeta / x).sqrt();
    let coef = tricomi_coefficients(a, n)?;
    let j = bessel_j_seq(w, n - 1);
    let mut pow = C::new(1.0, 0.0);
    let mut sum = C::new(0.0, 0.0);
    for m in 0..n {
        sum += coef[m] * pow * j[m];
        pow *= s;
    }
    let value = (0.5 * zeta).exp() * sum;
    Ok((value, remainder_bound(a, zeta, w, n)))
}

/// `(M̃(a,ζ), M(a,1;ζ))` from the expansion, summing until the terms are negligible.
pub fn tricomi_split(a: C, zeta: f64) -> Result<(C, C)> {
    check_range(a, zeta)?;
    let x = 2.0 - 4.0 * a;
    let w = (x * zeta).sqrt();
    let s = (zeta / x).sqrt();
    let n = ((w.norm() as usize) + 60).min(MAX_TERMS);
    let coef = tricomi_coefficients(a, n)?;
    let bcoef = derived_coefficients(&coef);
    let j = bessel_j_seq(w, n - 1);
    let jdot = bessel_jdot_seq(w, n - 1);
    let mut pow = C::new(1.0, 0.0);
    let (mut sj, mut sjd, mut sb) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
    let mut quiet = 0;
    let mut converged = false;
    for m in 0..n {
        let tj = coef[m] * pow * j[m];
        let tjd = coef[m] * pow * jdot[m];
        let tb = bcoef[m] * pow * j[m];
        sj += tj;
        sjd += tjd;
        sb += tb;
        pow *= s;
        let scale = sj.norm() + sjd.norm() + sb.norm();
        if m as f64 > w.norm() && tj.norm() + tjd.norm() + tb.norm() <= 1e-17 * scale {
            quiet += 1;
            if quiet >= 3 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            terms: n,
            context: format!("Tricomi expansion at a = {a}, zeta = {zeta}"),
        });
    }
    let e = (0.5 * zeta).exp();
    let log_term = (0.5 - a).ln() - digamma(1.0 - a)?;
    let regular = e * (log_term * sj - 2.0 * sjd - sb);
    Ok((regular, e * sj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::kummer::{kummer_m, TruncationBudget};

    /// Recurrence for the same coefficients:
    /// `(n+1)A_{n+1} = (n+b-1)A_{n-1} + (2a-b)A_{n-2}`, `A_0 = 1, A_1 = 0, A_2 = b/2`.
    fn recurrence_coefficients(a: C, n: usize) -> Vec<C> {
        let b = 1.0;
        let mut v = vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(b / 2.0, 0.0)];
        for k in 2..n {
            let next = ((k as f64 + b - 1.0) * v[k - 1] + (2.0 * a - b) * v[k - 2]) / (k as f64 + 1.0);
            v.push(next);
        }
        v.truncate(n);
        v
    }

    #[test]
    fn leading_coefficient() {
        for a in [C::new(-3.0, 0.0), C::new(-50.5, 0.7)] {
            assert_eq!(tricomi_coefficients(a, 1).unwrap()[0], C::new(1.0, 0.0));
        }
    }

    #[test]
    fn polynomial_cache_matches_recurrence() {
        for a in [C::new(-1.0, 0.0), C::new(-10.0, 0.3), C::new(-100.0, -1.0), C::new(-300.0, 0.0)] {
            let poly = tricomi_coefficients(a, 120).unwrap();
            let rec = recurrence_coefficients(a, 120);
            for m in 0..120 {
                let err = (poly[m] - rec[m]).norm();
                assert!(err <= 1e-12 * rec[m].norm().max(1e-300) + 1e-300, "a={a} m={m}: {} vs {}", poly[m], rec[m]);
            }
        }
    }

    #[test]
    fn agrees_with_taylor_series() {
        let (v, _) = tricomi_m(C::new(-10.0, 0.0), 1.0, 20).unwrap();
        let k = kummer_m(C::new(-10.0, 0.0), C::new(1.0, 0.0), 1.0, &TruncationBudget::default(), false).unwrap();
        assert!((v - k.value).norm() < 1e-8, "{v} vs {}", k.value);
    }

    #[test]
    fn remainder_bound_decreases_with_a() {
        let (_, b25) = tricomi_m(C::new(-25.0, 0.0), 1.0, 24).unwrap();
        let (_, b100) = tricomi_m(C::new(-100.0, 0.0), 1.0, 24).unwrap();
        assert!(b100 < b25, "{b100} vs {b25}");
        assert!(b25.is_finite());
    }

    #[test]
    fn range_enforced() {
        assert!(matches!(tricomi_m(C::new(-0.5, 0.0), 1.0, 5), Err(Error::Range(_))));
        assert!(matches!(tricomi_m(C::new(-5.0, 2.0), 1.0, 5), Err(Error::Range(_))));
    }

    #[test]
    fn split_matches_taylor_route() {
        let budget = TruncationBudget::default();
        for a in [C::new(-31.3, 0.0), C::new(-45.0, 0.6), C::new(-80.5, -0.2), C::new(-12.25, 0.0)] {
            for zeta in [0.3, 1.0, 2.0, 3.7] {
                let (reg, m) = tricomi_split(a, zeta).unwrap();
                let ev = kummer_m(a, C::new(1.0, 0.0), zeta, &budget, true).unwrap();
                let psi = digamma(1.0 - a).unwrap();
                let reg_taylor = -2.0 * ev.d_b - ev.d_a
                    - (2.0 * crate::specfun::gamma::EULER_GAMMA + psi + zeta.ln()) * ev.value;
                let scale = (0.5 * zeta).exp();
                assert!((m - ev.value).norm() < 1e-11 * scale, "M a={a} z={zeta}: {m} vs {}", ev.value);
                assert!(
                    (reg - reg_taylor).norm() < 1e-10 * scale * (1.0 + psi.norm()),
                    "reg a={a} z={zeta}: {reg} vs {reg_taylor}"
                );
            }
        }
    }
}
