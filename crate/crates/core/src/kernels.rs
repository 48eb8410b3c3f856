//! Point values of the spectral projection, heat and resolvent kernels of the
//! Landau Hamiltonian `H` (symmetric gauge, field `B > 0`, levels `Λ_n = B(2n+1)`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::specfun::gamma::{digamma, EULER_GAMMA};
use crate::specfun::kummer::{gamma_u, TruncationBudget};
use crate::specfun::laguerre::{laguerre, laguerre_sequence};
use crate::{Error, Point, Result};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub value: C,
    /// `[x, y] = x₁y₂ - x₂y₁`
    pub phase_arg: f64,
    /// `B|x - y|²/2`
    pub zeta: f64,
    /// Terms of the eigen-sum, when that mode was used.
    pub truncation: Option<usize>,
    /// Set when the heat kernel was flushed to zero to avoid overflow.
    pub underflow: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventMode {
    ClosedForm,
    EigenSum(usize),
    /// Eigen-sum with Fejér weights `1 - n/(N+1)`.
    EigenSumDamped(usize),
}

pub const DEFAULT_EIGEN_SUM_TERMS: usize = 500;

/// `Λ_n = B(2n+1)`.
pub fn landau_level(n: usize, b: f64) -> f64 {
    b * (2 * n + 1) as f64
}

pub fn symplectic(x: Point, y: Point) -> f64 {
    x[0] * y[1] - x[1] * y[0]
}

fn geometry(x: Point, y: Point, b: f64) -> (f64, f64) {
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    (0.5 * b * d2, symplectic(x, y))
}

fn check_field(b: f64) -> Result<()> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Invalid(format!("field strength must be positive, got {b}")));
    }
    Ok(())
}

fn phase(b: f64, phase_arg: f64) -> C {
    C::from_polar(1.0, 0.5 * b * phase_arg)
}

/// `P_n(x, y) = (B/2π) L_n(ζ) exp(-ζ/2 + i(B/2)[x, y])`.
pub fn projection_kernel(n: usize, x: Point, y: Point, b: f64) -> Result<KernelSample> {
    check_field(b)?;
    let (zeta, sym) = geometry(x, y, b);
    let value = b / (2.0 * PI) * laguerre(n, 0, zeta) * (-0.5 * zeta).exp() * phase(b, sym);
    Ok(KernelSample {
        value,
        phase_arg: sym,
        zeta,
        truncation: None,
        underflow: false,
    })
}

/// `e^{-tH}(x, y) = (B/(4π sinh Bt)) exp(-(B/4)|x-y|² coth(Bt) + i(B/2)[x, y])`.
pub fn heat_kernel(t: f64, x: Point, y: Point, b: f64) -> Result<KernelSample> {
    check_field(b)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Invalid(format!("heat kernel needs t > 0, got {t}")));
    }
    let (zeta, sym) = geometry(x, y, b);
    let bt = b * t;
    if bt > 700.0 {
        return Ok(KernelSample {
            value: C::new(0.0, 0.0),
            phase_arg: sym,
            zeta,
            truncation: None,
            underflow: true,
        });
    }
    let coth = 1.0 / bt.tanh();
    let value = b / (4.0 * PI * bt.sinh()) * (-0.5 * zeta * coth).exp() * phase(b, sym);
    Ok(KernelSample {
        value,
        phase_arg: sym,
        zeta,
        truncation: None,
        underflow: false,
    })
}

/// Index of the Landau level closest to `z`.
pub fn nearest_level(z: C, b: f64) -> usize {
    ((z.re / b - 1.0) / 2.0).round().max(0.0) as usize
}

/// Error unless `z` is at least `tol` away from every Landau level.
pub fn check_off_spectrum(z: C, b: f64, tol: f64) -> Result<()> {
    let n = nearest_level(z, b);
    let level = landau_level(n, b);
    if (z - level).norm() <= tol {
        return Err(Error::Spectrum {
            z: format!("{z}"),
            level,
            tol,
        });
    }
    Ok(())
}

/// Parameter `a = 1/2 - z/(2B)` of the closed-form resolvent.
pub fn resolvent_parameter(z: C, b: f64) -> C {
    0.5 - z / (2.0 * b)
}

/// `(H - z)^{-1}(x, y)` for `x ≠ y`.
///
/// Closed form: `(1/4π) Γ(a)U(a,1;ζ) exp(-ζ/2 + i(B/2)[x,y])`; eigen-sum:
/// `Σ_{n≤N} P_n(x,y)/(Λ_n - z)`.
pub fn resolvent_kernel(z: C, x: Point, y: Point, b: f64, mode: ResolventMode) -> Result<KernelSample> {
    check_field(b)?;
    if x == y {
        return Err(Error::Coincidence(format!(
            "resolvent kernel is singular on the diagonal ({}, {})",
            x[0], x[1]
        )));
    }
    check_off_spectrum(z, b, 1e-9 * b)?;
    let (zeta, sym) = geometry(x, y, b);
    let ph = phase(b, sym);
    match mode {
        ResolventMode::ClosedForm => {
            let a = resolvent_parameter(z, b);
            let g = gamma_u(a, zeta, &TruncationBudget::default())?;
            Ok(KernelSample {
                value: g * (-0.5 * zeta).exp() * ph / (4.0 * PI),
                phase_arg: sym,
                zeta,
                truncation: None,
                underflow: false,
            })
        }
        ResolventMode::EigenSum(terms) | ResolventMode::EigenSumDamped(terms) => {
            let damped = matches!(mode, ResolventMode::EigenSumDamped(_));
            let l = laguerre_sequence(terms, 0, zeta);
            let mut sum = C::new(0.0, 0.0);
            for (n, ln) in l.iter().enumerate() {
                let w = if damped { 1.0 - n as f64 / (terms + 1) as f64 } else { 1.0 };
                sum += w * *ln / (landau_level(n, b) - z);
            }
            Ok(KernelSample {
                value: sum * b / (2.0 * PI) * (-0.5 * zeta).exp() * ph,
                phase_arg: sym,
                zeta,
                truncation: Some(terms),
                underflow: false,
            })
        }
    }
}

/// `lim_{y→x} [(H - z)^{-1}(x, y) + (1/2π) ln|x - y|] = -(1/4π)(ln(B/2) + ψ(a) + 2γ)`.
pub fn resolvent_diagonal_regular(z: C, b: f64) -> Result<C> {
    check_field(b)?;
    check_off_spectrum(z, b, 1e-9 * b)?;
    let a = resolvent_parameter(z, b);
    Ok(-((0.5 * b).ln() + digamma(a)? + 2.0 * EULER_GAMMA) / (4.0 * PI))
}
