//! Log-gamma and digamma for complex arguments, plus the `π cot(πz)` helper
//! used near the poles of Γ.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Which function `gamma_digamma` should return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaWant {
    LnGamma,
    Psi,
}

const SHIFT_TO: f64 = 10.0;

// Bernoulli numbers B_{2k}, k = 1..=10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

fn nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn stirling_ln_gamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2.0 * (k + 1) as f64;
        series += pow * (b / (k2 * (k2 - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

fn asymptotic_digamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2.0 * (k + 1) as f64;
        series += pow * (b / k2);
        pow *= inv2;
    }
    z.ln() - 0.5 * inv - series
}

/// `ln Γ(z)`, continued from the right half plane by the ascending recurrence,
/// so that it is analytic off the negative real axis.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if nonpositive_integer(z) {
        return Err(Error::Pole {
            what: "ln Gamma",
            at: format!("{z}"),
        });
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling_ln_gamma(w) - shift)
}

/// `ψ(z) = Γ'(z)/Γ(z)`, with the reflection formula for `Re z < 1/2`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if nonpositive_integer(z) {
        return Err(Error::Pole {
            what: "digamma",
            at: format!("{z}"),
        });
    }
    if z.re < 0.5 {
        return Ok(digamma(1.0 - z)? - pi_cot_pi(z));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift += w.inv();
        w += 1.0;
    }
    Ok(asymptotic_digamma(w) - shift)
}

pub fn gamma_digamma(z: Complex64, want: GammaWant) -> Result<Complex64> {
    match want {
        GammaWant::LnGamma => ln_gamma(z),
        GammaWant::Psi => digamma(z),
    }
}

/// Real digamma for `x` not a non-positive integer.
pub fn digamma_real(x: f64) -> f64 {
    digamma(Complex64::new(x, 0.0)).map(|c| c.re).unwrap_or(f64::NAN)
}

/// `π cot(πz)` evaluated after reducing `z` to the strip `|Re z| ≤ 1/2`, so
/// the result is accurate right next to the integers.
pub fn pi_cot_pi(z: Complex64) -> Complex64 {
    let shifted = z - z.re.round();
    let v = 2.0 * PI * shifted.im;
    if v.abs() > 40.0 {
        return Complex64::new(0.0, -PI * v.signum());
    }
    if shifted.norm() < 1e-8 {
        // Laurent expansion, avoids 0/0 at an exact integer.
        let w = PI * shifted;
        return PI * (w.inv() - w / 3.0);
    }
    let w = PI * shifted;
    PI * w.cos() / w.sin()
}

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(4096);
        t.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..4096 {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    let t = factorial_table();
    if n < t.len() {
        t[n]
    } else {
        stirling_ln_gamma(Complex64::new(n as f64 + 1.0, 0.0)).re
    }
}
