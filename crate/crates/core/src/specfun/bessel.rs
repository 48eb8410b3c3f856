//! Bessel functions `J_m`, `Y_m` and the order derivative `∂J_ν/∂ν |_{ν=m}` for
//! integer order and complex argument in the right half plane.
//!
//! * `|w| ≤ 2`: power / logarithmic series.
//! * otherwise `J` by Miller's backward recurrence normalised with
//!   `J_0 + 2 Σ J_{2k} = 1`, `Y_0`, `Y_1` from the Neumann series, `Y_m` upward;
//! * `|w| > 25`: Hankel's asymptotic expansion for orders 0 and 1.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{digamma_real, ln_factorial, EULER_GAMMA};
use crate::{Error, Result};

type C = Complex64;

const SMALL: f64 = 2.0;
const LARGE: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    Jdot,
}

fn c0() -> C {
    C::new(0.0, 0.0)
}

/// Power series of `J_m(w)`.
fn j_series(m: usize, w: C) -> C {
    let h = w / 2.0;
    let q = -(h * h);
    let lead = if m == 0 {
        C::new(1.0, 0.0)
    } else {
        (h.ln() * m as f64 - ln_factorial(m)).exp()
    };
    let mut term = C::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= q / ((k * (k + m)) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    lead * sum
}

/// Miller backward recurrence: `J_0..=J_len` (len at least `nmax`).
fn j_miller(w: C, nmax: usize) -> Vec<C> {
    let n = (nmax as f64).max(w.norm());
    let mut start = (n + (160.0 * n).sqrt()) as usize + 30;
    if start % 2 == 1 {
        start += 1;
    }
    let mut f = vec![c0(); start + 2];
    f[start] = C::new(1e-30, 0.0);
    let winv = w.inv();
    for k in (1..=start).rev() {
        f[k - 1] = f[k] * (2.0 * k as f64) * winv - f[k + 1];
        if f[k - 1].norm() > 1e150 {
            for v in f.iter_mut().skip(k - 1) {
                *v *= 1e-150;
            }
        }
    }
    let mut norm = f[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * f[k];
    }
    // scale before inverting: |norm|² may overflow
    let mag = norm.norm();
    let inv = (norm / mag).inv() / mag;
    f.truncate(start + 1);
    for v in f.iter_mut() {
        *v *= inv;
    }
    f
}

/// Hankel expansion `(P, Q)` for order `nu`.
fn hankel_pq(nu: f64, w: C) -> (C, C) {
    let mu = 4.0 * nu * nu;
    let inv8w = (8.0 * w).inv();
    let mut p = C::new(1.0, 0.0);
    let mut q = c0();
    let mut term = C::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8w / k as f64;
        let mag = term.norm();
        if mag > last {
            break;
        }
        last = mag;
        // a_k / w^k with alternating sign every two terms
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel_jy(nu: f64, w: C) -> (C, C) {
    let (p, q) = hankel_pq(nu, w);
    let chi = w - (0.5 * nu + 0.25) * PI;
    let pre = (2.0 / (PI * w)).sqrt();
    let (s, c) = (chi.sin(), chi.cos());
    (pre * (p * c - q * s), pre * (p * s + q * c))
}

/// `[J_0(w), …, J_nmax(w)]`.
pub fn bessel_j_seq(w: C, nmax: usize) -> Vec<C> {
    if w.norm() == 0.0 {
        let mut v = vec![c0(); nmax + 1];
        v[0] = C::new(1.0, 0.0);
        return v;
    }
    let r = w.norm();
    if r <= SMALL {
        return (0..=nmax).map(|m| j_series(m, w)).collect();
    }
    if r > LARGE && (nmax as f64) < r {
        let (j0, _) = hankel_jy(0.0, w);
        let (j1, _) = hankel_jy(1.0, w);
        let mut v = vec![j0];
        if nmax >= 1 {
            v.push(j1);
        }
        for k in 1..nmax {
            let next = v[k] * (2.0 * k as f64) / w - v[k - 1];
            v.push(next);
        }
        return v;
    }
    let mut v = j_miller(w, nmax);
    v.truncate(nmax + 1);
    v
}

fn y01(w: C) -> (C, C) {
    let r = w.norm();
    if r > LARGE {
        return (hankel_jy(0.0, w).1, hankel_jy(1.0, w).1);
    }
    let lg = (w / 2.0).ln() + EULER_GAMMA;
    if r <= SMALL {
        // Y_0 = (2/π)(ln(w/2)+γ)J_0 + (2/π) Σ (-1)^{k+1} H_k (w²/4)^k/(k!)²
        let q = w * w / 4.0;
        let mut t = C::new(1.0, 0.0);
        let mut h = 0.0;
        let mut s0 = c0();
        let mut j0 = C::new(1.0, 0.0);
        for k in 1..60 {
            let kf = k as f64;
            t *= -q / (kf * kf);
            h += 1.0 / kf;
            j0 += t;
            s0 -= t * h;
            if t.norm() < 1e-18 {
                break;
            }
        }
        let y0 = (2.0 / PI) * (lg * j0 + s0);
        // Y_1 from DLMF 10.8.1 with n = 1
        let mut t = w / 2.0;
        let mut j1 = t;
        let mut s1 = t * (digamma_real(1.0) + digamma_real(2.0));
        for k in 1..60 {
            let kf = k as f64;
            t *= -q / (kf * (kf + 1.0));
            j1 += t;
            s1 += t * (digamma_real(kf + 1.0) + digamma_real(kf + 2.0));
            if t.norm() < 1e-18 {
                break;
            }
        }
        let y1 = -(2.0 / w) / PI + (2.0 / PI) * (w / 2.0).ln() * j1 - s1 / PI;
        return (y0, y1);
    }
    let j = j_miller(w, 1);
    let mut s0 = c0();
    let mut s1 = c0();
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = (2.0 / PI) * lg * j[0] - (4.0 / PI) * s0;
    let y1 = (2.0 / PI) * (lg * j[1] - j[0] / w) + (2.0 / PI) * s1;
    (y0, y1)
}

/// `[Y_0(w), …, Y_nmax(w)]`; `w ≠ 0`.
pub fn bessel_y_seq(w: C, nmax: usize) -> Vec<C> {
    let (y0, y1) = y01(w);
    let mut v = vec![y0];
    if nmax >= 1 {
        v.push(y1);
    }
    for k in 1..nmax {
        let next = v[k] * (2.0 * k as f64) / w - v[k - 1];
        v.push(next);
    }
    v
}

/// `∂J_ν(w)/∂ν` at `ν = m` from its power series.
fn jdot_series(m: usize, w: C) -> C {
    let h = w / 2.0;
    let q = -(h * h);
    let lead = if m == 0 {
        C::new(1.0, 0.0)
    } else {
        (h.ln() * m as f64 - ln_factorial(m)).exp()
    };
    let mut term = C::new(1.0, 0.0);
    let mut jsum = term;
    let mut psum = term * digamma_real(m as f64 + 1.0);
    for k in 1..300 {
        term *= q / ((k * (k + m)) as f64);
        jsum += term;
        let add = term * digamma_real((k + m) as f64 + 1.0);
        psum += add;
        if add.norm() < 1e-18 * psum.norm() && term.norm() < 1e-18 * jsum.norm() {
            break;
        }
    }
    lead * (h.ln() * jsum - psum)
}

/// `[J̇_0(w), …, J̇_nmax(w)]` with `J̇_m = ∂J_ν/∂ν |_{ν=m}`; `w ≠ 0`.
///
/// Uses `J̇_m = (π/2) Y_m + (m!/2)(w/2)^{-m} Σ_{k<m} (w/2)^k J_k / (k! (m-k))`
/// for `m ≤ |w|`, where the two parts do not cancel, and the power series
/// otherwise.
pub fn bessel_jdot_seq(w: C, nmax: usize) -> Vec<C> {
    let r = w.norm();
    let j = bessel_j_seq(w, nmax);
    let y = bessel_y_seq(w, nmax);
    let lh = (w / 2.0).ln();
    (0..=nmax)
        .map(|m| {
            if m == 0 {
                return 0.5 * PI * y[0];
            }
            if r <= SMALL || m as f64 > r {
                return jdot_series(m, w);
            }
            let lm = ln_factorial(m);
            let mut s = c0();
            for (k, jk) in j.iter().enumerate().take(m) {
                let coef = (lh * (k as f64 - m as f64) + (lm - ln_factorial(k))).exp();
                s += coef * *jk / (2.0 * (m - k) as f64);
            }
            0.5 * PI * y[m] + s
        })
        .collect()
}

/// `J_m(x)` for real `x ≥ 0`.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    bessel_j_seq(C::new(x, 0.0), m)[m].re
}

/// Real-argument evaluation of `J_m`, `Y_m` or `J̇_m`.
pub fn bessel(kind: BesselKind, m: usize, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {x}")));
    }
    let w = C::new(x, 0.0);
    match kind {
        BesselKind::J => Ok(bessel_j(m, x)),
        BesselKind::Y | BesselKind::Jdot if x == 0.0 => Err(Error::Domain(format!(
            "{kind:?}_{m} is singular at x = 0"
        ))),
        BesselKind::Y => Ok(bessel_y_seq(w, m)[m].re),
        BesselKind::Jdot => Ok(bessel_jdot_seq(w, m)[m].re),
    }
}
