//! The verification suite behind `landau-lab verify`: every check computes a
//! measured value, compares it against a fixed target and reports pass/fail.

use std::fmt;
use std::time::Instant;

use anyhow::Context;
use landau_core::asymptotics::{coefficients, first_moment_leading, heat_level_cutoff, heat_trace_rows, trace_formula_check, CoefficientSet};
use landau_core::kernels::{landau_level, resolvent_kernel, ResolventMode, DEFAULT_EIGEN_SUM_TERMS};
use landau_core::operators::{
    default_k_max, first_level, nystrom_sandwich, radial_projection_eigenvalues, sector_hamiltonian, NystromGrid, SandwichKernel,
};
use landau_core::potentials::Potential;
use landau_core::specfun::kummer::{gamma_u, kummer_m, TruncationBudget};
use landau_core::specfun::laguerre::laguerre;
use landau_core::specfun::tricomi::tricomi_m;
use landau_core::specfun::bessel_j;
use landau_core::spectra::{clusters_from, support_confinement_onset, ssf_cluster_integral, ClusterResult, SectorSpectra, Truncation, CONTOUR_POINTS};
use landau_core::Error;
use num_complex::Complex64 as C;
use serde::Serialize;

use crate::config::RunConfig;

/// Level cutoff of the extended run behind the `α₃` check (converged to
/// well below the tolerance for `n ≤ 60`).
pub const EXTENDED_N_MAX: usize = 320;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub measured: String,
    pub target: String,
    pub pass: bool,
    pub note: Option<String>,
    pub seconds: f64,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {}: {} (target {}) [{:.1}s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.target,
            self.seconds
        )?;
        if let Some(n) = &self.note {
            write!(f, "\n         {n}")?;
        }
        Ok(())
    }
}

struct Context_ {
    v: Potential,
    b: f64,
    coeffs: CoefficientSet,
    spectra: SectorSpectra,
    clusters: Vec<ClusterResult>,
    cfg: RunConfig,
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        ((a - b) / b).abs()
    }
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::MIN, f64::max);
    let min = xs.iter().cloned().fold(f64::MAX, f64::min);
    if max == 0.0 && min == 0.0 { 1.0 } else { max / min }
}

/// Runs all checks in order; `progress` sees each result as it completes.
pub fn run(cfg: &RunConfig, mut progress: impl FnMut(&Criterion)) -> anyhow::Result<Vec<Criterion>> {
    let v = cfg.potential()?;
    let b = cfg.b;
    let coeffs = coefficients(&v, b).context("coefficients")?;
    let clusters_top = cfg.n_range[1].max(60);
    // the suite resolves μ_n - α₀ ~ n^{-3/2}, far below the drift-check scale,
    // so every cluster criterion shares the converged extended run
    let mut truncation = cfg.truncation(&v);
    truncation.n_max = truncation.n_max.max(EXTENDED_N_MAX);
    let spectra = SectorSpectra::compute(&v, b, truncation)?;
    let clusters = clusters_from(&spectra, 0..=clusters_top);
    let ctx = Context_ {
        v,
        b,
        coeffs,
        spectra,
        clusters,
        cfg: cfg.clone(),
    };
    let checks: [fn(&Context_) -> anyhow::Result<Criterion>; 11] = [
        coefficient_identity,
        zeroth_moment_limit,
        alpha3_scaling,
        first_moment,
        trace_formula,
        heat_trace,
        cluster_width,
        norm_scalings,
        special_functions,
        oracle_equivalences,
        ssf_properties,
    ];
    let mut out = Vec::new();
    for check in checks {
        let t0 = Instant::now();
        let mut c = check(&ctx)?;
        c.seconds = t0.elapsed().as_secs_f64();
        progress(&c);
        out.push(c);
    }
    Ok(out)
}

fn criterion(id: u8, title: &'static str, measured: String, target: String, pass: bool, note: Option<String>) -> Criterion {
    Criterion {
        id,
        title,
        measured,
        target,
        pass,
        note,
        seconds: 0.0,
    }
}

fn coefficient_identity(ctx: &Context_) -> anyhow::Result<Criterion> {
    let c = &ctx.coeffs;
    let gap = c.identity_gap();
    Ok(criterion(
        1,
        "coefficient identity α₀⁽¹⁾ = -4Bα₃",
        format!("α₀⁽¹⁾ = {:.9e}, -4Bα₃ = {:.9e}, gap {gap:.2e}", c.alpha0_1, -4.0 * c.b * c.alpha3),
        "gap ≤ 1e-3".into(),
        gap <= 1e-3,
        None,
    ))
}

fn regime_note(ctx: &Context_) -> Option<String> {
    (ctx.v.sup_norm() >= ctx.b).then(|| {
        format!(
            "sup|V| = {} ≥ B: small-n cluster assignments are outside the validated regime",
            ctx.v.sup_norm()
        )
    })
}

fn zeroth_moment_limit(ctx: &Context_) -> anyhow::Result<Criterion> {
    let a0 = ctx.coeffs.alpha0;
    let dev: Vec<f64> = (20..=40).map(|n| (ctx.clusters[n].moments[0] - a0).abs()).collect();
    let at40 = dev[20];
    let decreasing = dev.windows(2).all(|w| w[1] <= w[0]);
    let pass = at40 <= 0.02 * a0.abs() && decreasing;
    Ok(criterion(
        2,
        "zeroth moment μ_n → α₀",
        format!(
            "|μ₄₀ - α₀| = {at40:.3e} = {:.2e}·|α₀|, decreasing over [20, 40]: {decreasing}",
            if a0 == 0.0 { 0.0 } else { at40 / a0.abs() }
        ),
        "≤ 0.02·|α₀|, monotone".into(),
        pass,
        regime_note(ctx),
    ))
}

fn alpha3_scaling(ctx: &Context_) -> anyhow::Result<Criterion> {
    let truncation = ctx.spectra.truncation;
    let a0 = ctx.coeffs.alpha0;
    let a3 = ctx.coeffs.alpha3;
    let ratios: Vec<(usize, f64)> = (30..=60)
        .map(|n| {
            let d = ctx.clusters[n].moments[0] - a0;
            let r = if a3 == 0.0 { if d == 0.0 { 1.0 } else { f64::INFINITY } } else { (n as f64).powf(1.5) * d / a3 };
            (n, r)
        })
        .collect();
    let worst = ratios.iter().map(|(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    let show: Vec<String> = ratios
        .iter()
        .filter(|(n, _)| n % 10 == 0)
        .map(|(n, r)| format!("n={n}: {r:.4}"))
        .collect();
    Ok(criterion(
        3,
        "α₃ scaling n^{3/2}(μ_n - α₀)/α₃",
        format!("{} (max deviation {worst:.3})", show.join(", ")),
        "within 15% of 1 for n ∈ [30, 60]".into(),
        worst <= 0.15,
        Some(format!("extended run N_max = {EXTENDED_N_MAX}, K_max = {}", truncation.k_max)),
    ))
}

fn first_moment(ctx: &Context_) -> anyhow::Result<Criterion> {
    let a01 = ctx.coeffs.alpha0_1;
    let mu1: Vec<(usize, f64)> = [30usize, 40]
        .iter()
        .map(|&n| (n, rel((n as f64).sqrt() * ctx.clusters[n].moments[1], a01)))
        .collect();
    let tr: Vec<(usize, f64)> = [64usize, 128]
        .iter()
        .map(|&n| (n, rel((n as f64).sqrt() * first_moment_leading(&ctx.v, ctx.b, n), a01)))
        .collect();
    let worst = mu1.iter().chain(&tr).map(|(_, r)| *r).fold(0.0, f64::max);
    let fmt = |xs: &[(usize, f64)]| xs.iter().map(|(n, r)| format!("n={n}: {r:.2e}")).collect::<Vec<_>>().join(", ");
    Ok(criterion(
        4,
        "first moment √n·μ_n⁽¹⁾ and √n·Tr(VP_n)² → α₀⁽¹⁾",
        format!("relative errors μ⁽¹⁾ [{}], Tr(VP_n)² [{}]", fmt(&mu1), fmt(&tr)),
        "≤ 0.10".into(),
        worst <= 0.10,
        None,
    ))
}

fn trace_formula(ctx: &Context_) -> anyhow::Result<Criterion> {
    let report = trace_formula_check(&ctx.v, &ctx.clusters[..=40], &ctx.coeffs, ctx.cfg.fit_window())?;
    Ok(criterion(
        5,
        "trace formula Σ(μ_n - α₀) = -(1/8π)∫V²",
        format!(
            "lhs {:.6e} vs rhs {:.6e}, gap {:.2e}",
            report.lhs_estimate, report.rhs, report.gap
        ),
        "gap ≤ 0.05".into(),
        report.gap <= 0.05,
        Some(format!(
            "fitted α₃ = {:.4e} (closed form {:.4e}); with the closed-form tail the gap is {:.2e}",
            report.fitted_alpha3, ctx.coeffs.alpha3, report.gap_closed_form_tail
        )),
    ))
}

fn heat_trace(ctx: &Context_) -> anyhow::Result<Criterion> {
    let t_list = [0.4, 0.2, 0.1];
    let truncation = Truncation {
        n_max: heat_level_cutoff(0.1, ctx.b),
        k_max: default_k_max(&ctx.v, ctx.b),
    };
    let spectra = SectorSpectra::compute(&ctx.v, ctx.b, truncation)?;
    let rows = heat_trace_rows(&ctx.v, &spectra, &t_list);
    let ratios = [rows[0].residual / rows[1].residual, rows[1].residual / rows[2].residual];
    let last = &rows[2];
    let zero = rows.iter().all(|r| r.residual == 0.0 && r.model == 0.0);
    let pass = zero || (ratios.iter().all(|r| (3.0..=5.0).contains(r)) && last.residual.abs() <= 0.05 * last.model.abs());
    Ok(criterion(
        6,
        "heat-trace expansion residual O(t²)",
        format!(
            "ratios {:.3}, {:.3}; residual(0.1) = {:.3e} = {:.2e}·|model|",
            ratios[0],
            ratios[1],
            last.residual,
            if last.model == 0.0 { 0.0 } else { (last.residual / last.model).abs() }
        ),
        "ratios ∈ [3, 5], |residual(0.1)| ≤ 0.05·|model|".into(),
        pass,
        None,
    ))
}

fn cluster_width(ctx: &Context_) -> anyhow::Result<Criterion> {
    let scaled: Vec<f64> = (10..=40).map(|n| ctx.clusters[n].width * (n as f64).sqrt()).collect();
    let c = scaled.iter().cloned().fold(f64::MAX, f64::min);
    let cc = scaled.iter().cloned().fold(0.0, f64::max);
    let definite = ctx.v.sign_definite().is_some();
    let pass = if ctx.v.is_zero() { true } else { definite && c > 0.0 && cc / c <= 2.0 };
    let onset = support_confinement_onset(&ctx.clusters[1..], cc);
    Ok(criterion(
        7,
        "cluster width·√n in a fixed band",
        format!("width·√n ∈ [{c:.5e}, {cc:.5e}] over n ∈ [10, 40]"),
        "0 < c, C/c ≤ 2, sign-definite V".into(),
        pass,
        onset.map(|n| format!("support confinement |λ - Λ_n| ≤ C/√n holds from n = {n} on")),
    ))
}

fn norm_scalings(ctx: &Context_) -> anyhow::Result<Criterion> {
    let mut tops = Vec::new();
    let mut fros = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let op = nystrom_sandwich(SandwichKernel::Projection(n), &ctx.v, ctx.b, NystromGrid::for_level(n))?;
        tops.push(op.operator_norm()? * (n as f64).sqrt());
        fros.push(op.frobenius_norm() * (n as f64).powf(0.25));
    }
    let (s1, s2) = (spread(&tops), spread(&fros));
    Ok(criterion(
        8,
        "norm scalings of V^{1/2}P_nV^{1/2}",
        format!(
            "‖·‖·√n ∈ [{:.4e}, {:.4e}] (×{s1:.3}), ‖·‖₂·n^{{1/4}} ∈ [{:.4e}, {:.4e}] (×{s2:.3})",
            tops.iter().cloned().fold(f64::MAX, f64::min),
            tops.iter().cloned().fold(0.0, f64::max),
            fros.iter().cloned().fold(f64::MAX, f64::min),
            fros.iter().cloned().fold(0.0, f64::max),
        ),
        "each varies < 2× over n ∈ {16, 32, 64, 128}".into(),
        s1 < 2.0 && s2 < 2.0,
        None,
    ))
}

/// Halton radical inverse.
fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn special_functions(_: &Context_) -> anyhow::Result<Criterion> {
    let budget = TruncationBudget::default();
    let one = C::new(1.0, 0.0);
    // ODE ζM'' + (1 - ζ)M' - aM = 0, sixth-order stencils
    let mut ode = 0.0f64;
    for i in 1..=100 {
        let a = C::new(-1.0 - 29.0 * halton(i, 2), -1.0 + 2.0 * halton(i, 3));
        let zeta = 0.05 + 3.95 * halton(i, 5);
        let h = (0.02 * (zeta / a.norm()).sqrt()).min(zeta / 4.0);
        let f: Vec<C> = (-3..=3)
            .map(|j| kummer_m(a, one, zeta + j as f64 * h, &budget, false).map(|e| e.value))
            .collect::<Result<_, _>>()?;
        let d1 = (-f[0] + 9.0 * f[1] - 45.0 * f[2] + 45.0 * f[4] - 9.0 * f[5] + f[6]) / (60.0 * h);
        let d2 = (2.0 * f[0] - 27.0 * f[1] + 270.0 * f[2] - 490.0 * f[3] + 270.0 * f[4] - 27.0 * f[5] + 2.0 * f[6])
            / (180.0 * h * h);
        let res = (zeta * d2 + (one - zeta) * d1 - a * f[3]).norm() / (1.0 + f[3].norm());
        ode = ode.max(res);
    }
    // Bessel-series (Tricomi) route against the Taylor route
    let mut tricomi_ok = true;
    let mut tricomi_worst = 0.0f64;
    for i in 1..=100 {
        let a = C::new(-1.0 - 99.0 * halton(i, 2), 0.0);
        let zeta = 0.01 + 3.99 * halton(i, 3);
        let (t, bound) = tricomi_m(a, zeta, 40)?;
        let k = kummer_m(a, one, zeta, &budget, false)?.value;
        let r = (t - k).norm() / k.norm().max(1.0);
        tricomi_ok &= r <= bound.max(1e-6);
        tricomi_worst = tricomi_worst.max(r / bound.max(1e-6));
    }
    // residues of Γ(a)U at a = -n
    let mut residue = 0.0f64;
    for n in 0..=20usize {
        for zeta in [0.5, 1.0, 3.0] {
            for side in [-1.0, 1.0] {
                let a = C::new(-(n as f64) + side * 1e-4, 0.0);
                let g = gamma_u(a, zeta, &budget)?;
                residue = residue.max(((a + n as f64) * g - laguerre(n, 0, zeta)).norm());
            }
        }
    }
    // Laguerre-Bessel approximation error E(4n)/E(n)
    let err = |n: usize| {
        (0..=400)
            .map(|i| {
                let t = 4.0 * i as f64 / 400.0;
                let approx = (t / 2.0).exp() * bessel_j(0, ((4 * n + 2) as f64 * t).sqrt());
                (laguerre(n, 0, t) - approx).abs()
            })
            .fold(0.0, f64::max)
    };
    let ratios: Vec<f64> = [16usize, 32, 64].iter().map(|&n| err(4 * n) / err(n)).collect();
    let ratio_ok = ratios.iter().all(|r| (0.2..=0.6).contains(r));
    let pass = ode < 1e-8 && tricomi_ok && residue < 1e-3 && ratio_ok;
    Ok(criterion(
        9,
        "special-function suite",
        format!(
            "ODE residual {ode:.2e}, Tricomi/Taylor ≤ {tricomi_worst:.2e}×tolerance, residue error {residue:.2e}, E(4n)/E(n) = {}",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
        ),
        "< 1e-8; ≤ max(1e-6, bound); < 1e-3; ∈ [0.2, 0.6]".into(),
        pass,
        None,
    ))
}

fn oracle_equivalences(ctx: &Context_) -> anyhow::Result<Criterion> {
    let b = ctx.b;
    // closed-form resolvent against the plain eigen-sum at gap centres
    let mut resolvent = 0.0f64;
    for n in [0usize, 1] {
        let z = C::new(landau_level(n, b) + b, 0.0);
        for (x, y) in [([0.0, 0.0], [1.0, 0.0]), ([0.3, 0.2], [-0.4, 0.9])] {
            let cf = resolvent_kernel(z, x, y, b, ResolventMode::ClosedForm)?.value;
            let es = resolvent_kernel(z, x, y, b, ResolventMode::EigenSum(DEFAULT_EIGEN_SUM_TERMS))?.value;
            resolvent = resolvent.max((cf - es).norm() / cf.norm());
        }
    }
    // power sums against contour integrals of W
    let mut contour = 0.0f64;
    for n in [10usize, 20, 30] {
        let c = &ctx.clusters[n];
        for k in 0..3u32 {
            let m = ctx.spectra.contour_moment(n, k, CONTOUR_POINTS)?;
            contour = contour.max(rel(m, c.moments[k as usize]));
        }
    }
    // radial eigenvalue formula against the Galerkin diagonal
    let mut diag = 0.0f64;
    for k in [-20i64, -5, 0, 3, 15] {
        let s = sector_hamiltonian(k, 80, &ctx.v, b)?;
        for n in [first_level(k), 20, 40, 80] {
            let d = s.v_block[(n - s.first_level(), n - s.first_level())];
            let r = radial_projection_eigenvalues(n, k..=k, &ctx.v, b)?[0].1;
            diag = diag.max((d - r).abs());
        }
    }
    let pass = resolvent <= 1e-3 && contour <= 1e-6 && diag <= 1e-10;
    Ok(criterion(
        10,
        "oracle equivalences",
        format!("resolvent vs eigen-sum(N = 500) {resolvent:.2e}; contour vs power sums {contour:.2e}; radial vs Galerkin diagonal {diag:.2e}"),
        "≤ 1e-3; ≤ 1e-6; ≤ 1e-10".into(),
        pass,
        None,
    ))
}

/// `ξ(λ)`, nudging `λ` off a computed eigenvalue if it lands on one.
fn xi(s: &SectorSpectra, lambda: f64) -> anyhow::Result<i64> {
    let mut l = lambda;
    for _ in 0..8 {
        match s.ssf(l) {
            Ok(x) => return Ok(x.xi),
            Err(Error::OnEigenvalue { .. }) => l += 3e-10,
            Err(e) => return Err(e.into()),
        }
    }
    anyhow::bail!("could not place a sample near λ = {lambda}")
}

fn ssf_properties(ctx: &Context_) -> anyhow::Result<Criterion> {
    let b = ctx.b;
    let n = 20;
    let truncation = ctx.spectra.truncation;
    let half = SectorSpectra::compute(&ctx.v.scaled(0.5)?, b, truncation)?;
    let flipped = SectorSpectra::compute(&ctx.v.scaled(-1.0)?, b, truncation)?;
    let level = landau_level(n, b);
    let w = ctx.clusters[n].width.max(1e-3 * b);
    let samples: Vec<f64> = (0..50).map(|i| level - 2.0 * w + 4.0 * w * (i as f64 + 0.5) / 50.0).collect();
    let (mut mono_bad, mut flip_bad, mut mirror_bad) = (0, 0, 0);
    for &l in &samples {
        let full = xi(&ctx.spectra, l)?;
        let weaker = xi(&half, l)?;
        let sign_definite = ctx.v.sign_definite();
        // V ≥ 0: V/2 ≤ V; V ≤ 0: V ≤ V/2
        let ordered = match sign_definite {
            Some(s) if s < 0 => full <= weaker,
            _ => weaker <= full,
        };
        if !ordered {
            mono_bad += 1;
        }
        if xi(&flipped, l)? != -full {
            flip_bad += 1;
        }
        if xi(&flipped, 2.0 * level - l)? != -full {
            mirror_bad += 1;
        }
    }
    let integral = ssf_cluster_integral(&ctx.spectra, n, 400_000)?;
    let mu = ctx.clusters[n].moments[0];
    let int_err = (integral - mu).abs();
    let pass = mono_bad == 0 && flip_bad == 0 && int_err <= 1e-4;
    Ok(criterion(
        11,
        "spectral shift function properties",
        format!(
            "monotonicity violations {mono_bad}/50, ξ(λ;-V) ≠ -ξ(λ;V) at {flip_bad}/50, |∫ξ - μ₂₀| = {int_err:.2e}"
        ),
        "0/50; 0/50; ≤ 1e-4".into(),
        pass,
        Some(format!(
            "samples span Λ₂₀ ± 2·width; mirrored form ξ(2Λ_n - λ; -V) = -ξ(λ; V) fails at {mirror_bad}/50"
        )),
    ))
}
