//! Closed-form coefficients of the large-`n` moment expansion, least-squares
//! fits of computed moments, and the trace-formula and heat-trace checks.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::kernels::landau_level;
use crate::operators::first_level;
use crate::potentials::Potential;
use crate::spectra::{ClusterResult, SectorSpectra, Truncation};
use crate::{Error, Result};

/// Maximal relative disagreement of the two routes to `α₀^{(1)}`.
pub const IDENTITY_TOL: f64 = 1e-3;
pub const MAX_CONDITION: f64 = 1e10;
pub const DEFAULT_FIT_WINDOW: (usize, usize) = (15, 60);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// `(B/2π) ∫V`
    pub alpha0: f64,
    /// `-(√B/(16√2 π³)) N[V]`, `N[V] = ∫∫ V(x)V(y)/|x-y|`
    pub alpha3: f64,
    /// `(B/(4π³)) ∫_0^∞ h(t) dt` from the autocorrelation profile
    pub alpha0_1: f64,
    pub b: f64,
    pub newton_energy: f64,
    pub profile_integral: f64,
}

impl CoefficientSet {
    /// `|α₀^{(1)} + 4Bα₃| / |α₀^{(1)}|`.
    pub fn identity_gap(&self) -> f64 {
        if self.alpha0_1 == 0.0 {
            return (4.0 * self.b * self.alpha3).abs();
        }
        ((self.alpha0_1 + 4.0 * self.b * self.alpha3) / self.alpha0_1).abs()
    }
}

pub fn coefficients(v: &Potential, b: f64) -> Result<CoefficientSet> {
    if !(b > 0.0) {
        return Err(Error::Invalid(format!("field strength must be positive, got {b}")));
    }
    let newton = v.newton_energy()?;
    let profile = v.profile_integral(b);
    let c = CoefficientSet {
        alpha0: b / (2.0 * PI) * v.integral_v(),
        alpha3: -b.sqrt() / (16.0 * 2f64.sqrt() * PI.powi(3)) * newton,
        alpha0_1: b / (4.0 * PI.powi(3)) * profile,
        b,
        newton_energy: newton,
        profile_integral: profile,
    };
    let gap = c.identity_gap();
    if gap > IDENTITY_TOL {
        return Err(Error::IdentityViolation(format!(
            "α₀⁽¹⁾ = {:.6e} but -4Bα₃ = {:.6e} (relative gap {gap:.2e})",
            c.alpha0_1,
            -4.0 * b * c.alpha3
        )));
    }
    Ok(c)
}

/// Leading part `Tr(VP_n)²` of the first moment.
pub fn first_moment_leading(v: &Potential, b: f64, n: usize) -> f64 {
    v.trace_vpn_squared(n, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// Term `c_j n^{-p_j}` per exponent `p_j`.
    pub powers: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub residual_norm: f64,
    pub condition: f64,
    pub n_window: (usize, usize),
}

impl AsymptoticFit {
    pub fn coeff(&self, power: f64) -> Option<f64> {
        self.powers.iter().position(|p| *p == power).map(|i| self.coeffs[i])
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.powers.iter().zip(&self.coeffs).map(|(p, c)| c * n.powf(-p)).sum()
    }
}

/// Least squares `value ≈ Σ_j c_j n^{-p_j}` over the points with `n` in `window`.
pub fn fit_expansion(series: &[(usize, f64)], powers: &[f64], window: RangeInclusive<usize>) -> Result<AsymptoticFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(n, _)| window.contains(n) && *n > 0)
        .map(|&(n, y)| (n as f64, y))
        .collect();
    if powers.is_empty() || pts.len() < powers.len() + 2 {
        return Err(Error::Invalid(format!(
            "{} points in window {window:?} for {} powers",
            pts.len(),
            powers.len()
        )));
    }
    let a = DMatrix::from_fn(pts.len(), powers.len(), |i, j| pts[i].0.powf(-powers[j]));
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let coeffs = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Invalid(format!("least squares failed: {e}")))?;
    let residual_norm = (&a * &coeffs - &y).norm();
    Ok(AsymptoticFit {
        powers: powers.to_vec(),
        coeffs: coeffs.iter().copied().collect(),
        residual_norm,
        condition,
        n_window: (*window.start(), *window.end()),
    })
}

/// `(n, μ_n^{(k)})` pairs.
pub fn moment_series(clusters: &[ClusterResult], k: usize) -> Vec<(usize, f64)> {
    clusters.iter().map(|c| (c.n, c.moments[k])).collect()
}

/// `α₃` fitted from `μ_n - α₀ ≈ α₃ n^{-3/2} + c n^{-2}` over `window`.
pub fn fitted_alpha3(clusters: &[ClusterResult], alpha0: f64, window: RangeInclusive<usize>) -> Result<AsymptoticFit> {
    let series: Vec<(usize, f64)> = clusters.iter().map(|c| (c.n, c.moments[0] - alpha0)).collect();
    fit_expansion(&series, &[1.5, 2.0], window)
}

/// `Σ_{n>N} n^{-3/2}`: explicit terms to 10⁶, then the midpoint integral.
pub fn zeta_tail_three_halves(n: usize) -> f64 {
    const CUT: usize = 1_000_000;
    let mut s = 0.0;
    for m in ((n + 1)..=CUT.max(n)).rev() {
        s += (m as f64).powf(-1.5);
    }
    s + 2.0 / (CUT.max(n) as f64 + 0.5).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceFormulaReport {
    pub n_top: usize,
    /// `Σ_{n≤N} (μ_n - α₀)`
    pub partial_sum: f64,
    /// Partial sum plus the fitted `α₃` tail.
    pub lhs_estimate: f64,
    /// Partial sum plus the closed-form `α₃` tail.
    pub lhs_closed_form_tail: f64,
    /// `-(1/8π) ∫V²`
    pub rhs: f64,
    pub gap: f64,
    pub gap_closed_form_tail: f64,
    pub fitted_alpha3: f64,
}

/// Compares the tail-corrected `Σ_n (μ_n - α₀)` with `-(1/8π)∫V²`.
///
/// `clusters` must start at `n = 0`; the tail uses `α₃` fitted on `window`.
pub fn trace_formula_check(
    v: &Potential,
    clusters: &[ClusterResult],
    coeffs: &CoefficientSet,
    window: RangeInclusive<usize>,
) -> Result<TraceFormulaReport> {
    for (i, c) in clusters.iter().enumerate() {
        if c.n != i {
            return Err(Error::Invalid("clusters must cover n = 0, 1, …, N".into()));
        }
    }
    let n_top = clusters.len().saturating_sub(1);
    let partial_sum: f64 = clusters.iter().map(|c| c.moments[0] - coeffs.alpha0).sum();
    let rhs = -v.integral_v2() / (8.0 * PI);
    let fitted = if v.is_zero() {
        0.0
    } else {
        fitted_alpha3(clusters, coeffs.alpha0, window)?.coeffs[0]
    };
    let tail = zeta_tail_three_halves(n_top);
    let lhs_estimate = partial_sum + fitted * tail;
    let lhs_closed_form_tail = partial_sum + coeffs.alpha3 * tail;
    let gap_of = |lhs: f64| if rhs == 0.0 { lhs.abs() } else { ((lhs - rhs) / rhs).abs() };
    Ok(TraceFormulaReport {
        n_top,
        partial_sum,
        lhs_estimate,
        lhs_closed_form_tail,
        rhs,
        gap: gap_of(lhs_estimate),
        gap_closed_form_tail: gap_of(lhs_closed_form_tail),
        fitted_alpha3: fitted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceRow {
    pub t: f64,
    pub lhs: f64,
    pub model: f64,
    pub residual: f64,
}

/// Level cutoff making the spectral tail `e^{-tΛ_N}` negligible (< 1e-13).
pub fn heat_level_cutoff(t: f64, b: f64) -> usize {
    (30.0 / (t * b)).ceil() as usize
}

/// `Tr(e^{-tH} - e^{-t(H+V)})` against `(1/4π)∫V - (t/8π)∫V²`.
pub fn heat_trace_check(v: &Potential, b: f64, t_list: &[f64], truncation: Truncation) -> Result<Vec<HeatTraceRow>> {
    for &t in t_list {
        if !(t > 0.0) {
            return Err(Error::Invalid(format!("heat trace needs t > 0, got {t}")));
        }
        let need = heat_level_cutoff(t, b);
        if truncation.n_max < need {
            return Err(Error::TruncationInsufficient(format!(
                "t = {t} needs N_max ≥ {need}, got {}",
                truncation.n_max
            )));
        }
    }
    let spectra = SectorSpectra::compute(v, b, truncation)?;
    Ok(heat_trace_rows(v, &spectra, t_list))
}

pub fn heat_trace_rows(v: &Potential, spectra: &SectorSpectra, t_list: &[f64]) -> Vec<HeatTraceRow> {
    let b = spectra.b;
    t_list
        .iter()
        .map(|&t| {
            let mut lhs = 0.0;
            for (k, ev) in &spectra.sectors {
                let lo = first_level(*k);
                for (i, &e) in ev.iter().enumerate() {
                    lhs += (-t * landau_level(lo + i, b)).exp() - (-t * e).exp();
                }
            }
            let model = v.integral_v() / (4.0 * PI) - t * v.integral_v2() / (8.0 * PI);
            HeatTraceRow {
                t,
                lhs,
                model,
                residual: lhs - model,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_potential_coefficients() {
        let c = coefficients(&Potential::zero(), 1.0).unwrap();
        assert_eq!((c.alpha0, c.alpha3, c.alpha0_1), (0.0, 0.0, 0.0));
        assert_eq!(first_moment_leading(&Potential::zero(), 1.0, 5), 0.0);
    }

    #[test]
    fn sign_flip_of_coefficients() {
        let v = Potential::bump(0.2, 1.0).unwrap();
        let w = v.scaled(-1.0).unwrap();
        let (a, c) = (coefficients(&v, 1.0).unwrap(), coefficients(&w, 1.0).unwrap());
        assert_relative_eq!(a.alpha0, -c.alpha0, max_relative = 1e-14);
        assert_relative_eq!(a.alpha3, c.alpha3, max_relative = 1e-12);
        assert_relative_eq!(a.alpha0_1, c.alpha0_1, max_relative = 1e-12);
        assert!(a.identity_gap() < 1e-4);
    }

    #[test]
    fn fit_exact_models() {
        let series: Vec<(usize, f64)> = (5..=60).map(|n| (n, 3.0 + 5.0 * (n as f64).powf(-1.5))).collect();
        let f = fit_expansion(&series, &[0.0, 1.5], 5..=60).unwrap();
        assert_relative_eq!(f.coeffs[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.coeffs[1], 5.0, epsilon = 1e-10);
        assert!(f.residual_norm < 1e-12);
        assert_eq!(f.coeff(1.5), Some(f.coeffs[1]));
        let flat: Vec<(usize, f64)> = (10..=40).map(|n| (n, 0.7)).collect();
        let f = fit_expansion(&flat, &[0.0, 0.5, 1.0, 1.5], 10..=40).unwrap();
        assert_relative_eq!(f.coeffs[0], 0.7, epsilon = 1e-8);
        assert!(f.coeffs[1..].iter().all(|c| c.abs() < 1e-6));
        assert!(f.condition < MAX_CONDITION);
    }

    #[test]
    fn fit_errors() {
        let series: Vec<(usize, f64)> = (10..=14).map(|n| (n, 1.0)).collect();
        assert!(fit_expansion(&series, &[0.0, 0.5, 1.0, 1.5], 10..=14).is_err());
        let series: Vec<(usize, f64)> = (10..=40).map(|n| (n, 1.0)).collect();
        assert!(matches!(
            fit_expansion(&series, &[0.0, 1e-13], 10..=40),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn zeta_tail() {
        // Σ_{n≥1} n^{-3/2} = ζ(3/2)
        assert_relative_eq!(1.0 + zeta_tail_three_halves(1), 2.612_375_348_685_488, epsilon = 1e-9);
        assert_relative_eq!(zeta_tail_three_halves(2_000_000), 2.0 / 2_000_000.5f64.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn heat_trace_needs_levels() {
        let v = Potential::bump(0.2, 1.0).unwrap();
        let t = Truncation { n_max: 100, k_max: 25 };
        assert!(matches!(heat_trace_check(&v, 1.0, &[0.1], t), Err(Error::TruncationInsufficient(_))));
        let rows = heat_trace_check(&Potential::zero(), 1.0, &[0.4], Truncation { n_max: 80, k_max: 5 }).unwrap();
        assert_eq!((rows[0].lhs, rows[0].model), (0.0, 0.0));
    }

    #[test]
    fn first_moment_leading_matches_radial_eigenvalues() {
        let v = Potential::bump(0.2, 1.0).unwrap();
        for n in [3usize, 20] {
            let sq: f64 = crate::operators::radial_projection_eigenvalues(n, -(n as i64)..=60, &v, 1.0)
                .unwrap()
                .iter()
                .map(|(_, e)| e * e)
                .sum();
            assert_relative_eq!(first_moment_leading(&v, 1.0, n), sq, max_relative = 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn fit_recovers_random_models(c0 in -1.0f64..1.0, c3 in -10.0f64..10.0, c4 in -10.0f64..10.0) {
            let series: Vec<(usize, f64)> = (15..=60)
                .map(|n| { let x = n as f64; (n, c0 + c3 * x.powf(-1.5) + c4 * x.powi(-2)) })
                .collect();
            let f = fit_expansion(&series, &[0.0, 1.5, 2.0], 15..=60).unwrap();
            prop_assert!((f.coeffs[0] - c0).abs() < 1e-9);
            prop_assert!((f.coeffs[1] - c3).abs() < 1e-6);
        }
    }
}
