//! Kummer's function `M(a, b; ζ)` by its Taylor series (with exact parameter
//! derivatives), and `Γ(a)U(a, 1; ζ)` assembled from it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ddouble::{CDD, DD};
use super::gamma::{digamma, pi_cot_pi, EULER_GAMMA};
use super::quadrature::integrate_adaptive;
use super::tricomi::tricomi_split;
use crate::{Error, Result};

type C = Complex64;

/// Term budget and stopping tolerances of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBudget {
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for TruncationBudget {
    fn default() -> Self {
        TruncationBudget {
            max_terms: 1000,
            abs_tol: 0.0,
            rel_tol: 1e-17,
        }
    }
}

impl TruncationBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::Invalid("max_terms must be >= 1".into()));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(Error::Invalid(
                "tolerances must be non-negative with at least one positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerEval {
    pub value: C,
    /// `∂M/∂a`
    pub d_a: C,
    /// `∂M/∂b`
    pub d_b: C,
    pub terms_used: usize,
}

/// Taylor series of `M(a, b; ζ)` for `|b - 1| < 1/2`, `ζ ≥ 0`.
///
/// Terms are accumulated in double-double arithmetic, so the heavy cancellation
/// of the alternating series at large negative `a` costs nothing visible for
/// `|a| ζ` up to a few hundred. The derivative series use
/// `t_{k+1} = t_k r_k` with `r_k = (a+k)ζ/((b+k)(k+1))`:
/// `u_{k+1} = u_k r_k + t_k ζ/((b+k)(k+1))` and `w_{k+1} = (w_k - t_k/(b+k)) r_k`,
/// which stay exact when `a` is a non-positive integer.
pub fn kummer_m(a: C, b: C, zeta: f64, budget: &TruncationBudget, with_derivs: bool) -> Result<KummerEval> {
    budget.validate()?;
    if (b - 1.0).norm() >= 0.5 {
        return Err(Error::Range(format!("|b - 1| must be < 1/2, got b = {b}")));
    }
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::Domain(format!("zeta must be finite and >= 0, got {zeta}")));
    }
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::Domain(format!("a must be finite, got {a}")));
    }
    let one = CDD::from_c64(C::new(1.0, 0.0));
    let z = CDD::from_c64(C::new(zeta, 0.0));
    let mut t = one;
    let mut u = CDD::ZERO;
    let mut w = CDD::ZERO;
    let mut s = one;
    let mut sa = CDD::ZERO;
    let mut sb = CDD::ZERO;
    if zeta == 0.0 {
        return Ok(KummerEval {
            value: s.to_c64(),
            d_a: C::new(0.0, 0.0),
            d_b: C::new(0.0, 0.0),
            terms_used: 1,
        });
    }
    for k in 0..budget.max_terms {
        let kf = k as f64;
        let ak = CDD::from_parts(DD::sum(a.re, kf), DD::new(a.im));
        let bk = CDD::from_parts(DD::sum(b.re, kf), DD::new(b.im));
        let rho = (z / bk).div_f64(kf + 1.0);
        let r = ak * rho;
        if with_derivs {
            w = (w - t / bk) * r;
            u = u * r + t * rho;
            sa = sa + u;
            sb = sb + w;
        }
        t = t * r;
        s = s + t;
        let ratio = (a + kf).norm() * zeta / ((b + kf).norm() * (kf + 1.0));
        let mag = t.l1() + u.l1() + w.l1();
        let scale = s.l1() + sa.l1() + sb.l1();
        if ratio < 0.5 && mag <= budget.abs_tol.max(budget.rel_tol * scale) {
            return Ok(KummerEval {
                value: s.to_c64(),
                d_a: sa.to_c64(),
                d_b: sb.to_c64(),
                terms_used: k + 2,
            });
        }
        if !mag.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        terms: budget.max_terms,
        context: format!("Kummer series at a = {a}, b = {b}, zeta = {zeta}"),
    })
}

/// Regular and Kummer parts of `Γ(a)U(a,1;ζ) = regular + π cot(πa) · kummer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaUSplit {
    /// `M̃(a, ζ) = -2∂_bM - ∂_aM - (2γ + ψ(1-a) + ln ζ) M`, analytic at `a = 0, -1, -2, …`
    pub regular: C,
    /// `M(a, 1; ζ)`
    pub kummer: C,
}

impl GammaUSplit {
    /// `M̃ + π cot(πa) M`; infinite at the poles.
    pub fn combine(&self, a: C) -> C {
        self.regular + pi_cot_pi(a) * self.kummer
    }
}

/// Real parts below which the Tricomi expansion replaces the Taylor series.
pub const TRICOMI_SWITCH: f64 = -30.0;

fn is_integer(a: C) -> bool {
    a.im == 0.0 && a.re == a.re.round()
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta > 0.0) || !zeta.is_finite() {
        return Err(Error::Domain(format!("zeta must be positive and finite, got {zeta}")));
    }
    Ok(())
}

/// Split form of `Γ(a)U(a,1;ζ)`; valid at the poles `a = 0, -1, -2, …`.
pub fn gamma_u_split(a: C, zeta: f64, budget: &TruncationBudget) -> Result<GammaUSplit> {
    check_zeta(zeta)?;
    if is_integer(a) && a.re >= 1.0 {
        return Err(Error::Pole {
            what: "regular part of Gamma(a)U(a,1;zeta)",
            at: format!("{a}"),
        });
    }
    if a.re < TRICOMI_SWITCH && a.im.abs() <= 1.0 {
        let (regular, kummer) = tricomi_split(a, zeta)?;
        return Ok(GammaUSplit { regular, kummer });
    }
    let ev = kummer_m(a, C::new(1.0, 0.0), zeta, budget, true)?;
    let psi = digamma(1.0 - a)?;
    let regular = -2.0 * ev.d_b - ev.d_a - (2.0 * EULER_GAMMA + psi + zeta.ln()) * ev.value;
    Ok(GammaUSplit {
        regular,
        kummer: ev.value,
    })
}

/// `Γ(a)U(a,1;ζ)` from `∫_0^∞ e^{-ζτ} τ^{a-1} (1+τ)^{-a} dτ` (needs `Re a > 0`),
/// integrated in `s = ln τ`.
fn gamma_u_integral(a: C, zeta: f64) -> Result<C> {
    let lo = -60.0 / a.re;
    let hi = (60.0 / zeta).ln().max(lo + 1.0);
    let f = |s: f64| {
        let tau = s.exp();
        let soft = if s > 0.0 { s + (-s).exp().ln_1p() } else { s.exp().ln_1p() };
        (a * (s - soft) - zeta * tau).exp()
    };
    let re = integrate_adaptive(|s| f(s).re, lo, hi, 1e-14, 1e-300)?;
    let im = if a.im == 0.0 {
        0.0
    } else {
        integrate_adaptive(|s| f(s).im, lo, hi, 1e-14, 1e-300)?
    };
    Ok(C::new(re, im))
}

/// `Γ(a)U(a,1;ζ)`; pole error at `a = 0, -1, -2, …`.
pub fn gamma_u(a: C, zeta: f64, budget: &TruncationBudget) -> Result<C> {
    check_zeta(zeta)?;
    if is_integer(a) && a.re <= 0.0 {
        return Err(Error::Pole {
            what: "Gamma(a)U(a,1;zeta)",
            at: format!("{a}"),
        });
    }
    if a.re >= 0.5 {
        // M grows like e^ζ while Γ(a)U decays: beyond moderate a, ζ the
        // combination of Kummer terms cancels, use the integral instead.
        if a.re > 8.0 || zeta > 4.0 {
            return gamma_u_integral(a, zeta);
        }
        let ev = kummer_m(a, C::new(1.0, 0.0), zeta, budget, true)?;
        let psi = digamma(a)?;
        return Ok(-2.0 * ev.d_b - ev.d_a - (2.0 * EULER_GAMMA + psi + zeta.ln()) * ev.value);
    }
    Ok(gamma_u_split(a, zeta, budget)?.combine(a))
}
