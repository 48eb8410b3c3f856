//! Quadrature rules: Gauss–Legendre (fixed and adaptive) and tanh–sinh for
//! integrands with endpoint singularities.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{Error, Result};

/// Nodes and weights of a quadrature rule on a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_standard_rule(n: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi's initial guess for the i-th largest root.
        let theta = PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let nf = n as f64;
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

/// Cached `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn standard_gauss_legendre(n: usize) -> Arc<QuadratureRule> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut cache = rule_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_standard_rule(n)))
        .clone()
}

/// `n`-point Gauss–Legendre rule mapped to `(a, b)`.
///
/// Exact for polynomials of degree `2n - 1`; the weights are positive and sum to `b - a`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Invalid("Gauss-Legendre rule needs n >= 1".into()));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Invalid(format!("invalid interval ({a}, {b})")));
    }
    let base = standard_gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Ok(QuadratureRule {
        nodes: base.nodes.iter().map(|&x| mid + half * x).collect(),
        weights: base.weights.iter().map(|&w| half * w).collect(),
    })
}

/// Fixed-order Gauss–Legendre integral of `f` over `(a, b)`.
pub fn integrate_gl<F: FnMut(f64) -> f64>(n: usize, a: f64, b: f64, mut f: F) -> f64 {
    let base = standard_gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    half * base
        .nodes
        .iter()
        .zip(&base.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
}

const ADAPTIVE_ORDER: usize = 20;

/// Adaptive Gauss–Legendre integration by interval bisection.
///
/// A panel is accepted when its 20-point value agrees with the sum over its two
/// halves to within the tolerance share of the panel.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    const MAX_DEPTH: u32 = 40;
    const MAX_PANELS: usize = 20_000;
    let whole = integrate_gl(ADAPTIVE_ORDER, a, b, &mut f);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = 0.0;
    let mut scale = whole.abs();
    let mut panels = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "adaptive rule exceeded {MAX_PANELS} panels on ({a}, {b})"
            )));
        }
        let mid = 0.5 * (lo + hi);
        let left = integrate_gl(ADAPTIVE_ORDER, lo, mid, &mut f);
        let right = integrate_gl(ADAPTIVE_ORDER, mid, hi, &mut f);
        let fine = left + right;
        scale = scale.max(fine.abs());
        let share = (hi - lo) / (b - a);
        let tol = (rel_tol * scale).max(abs_tol) * share.max(1e-3);
        if (fine - coarse).abs() <= tol || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && (fine - coarse).abs() > tol {
                return Err(Error::Quadrature(format!(
                    "no convergence near x = {mid} (difference {:e})",
                    (fine - coarse).abs()
                )));
            }
            total += fine;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

/// Tanh–sinh nodes on `[-1, 1]` at step `2^-level`.
///
/// Each node is returned as `(x, 1 + x, 1 - x, w)`; the distances to the end
/// points are computed without cancellation so that integrands with endpoint
/// singularities can be evaluated right up to the boundary.
pub fn tanh_sinh_nodes(level: u32) -> Vec<(f64, f64, f64, f64)> {
    let h = 0.5f64.powi(level as i32);
    let mut out = Vec::new();
    let mut k: i64 = 0;
    loop {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        // 1 - tanh(u) = 2 / (1 + e^{2u}) without cancellation.
        let e2u = (2.0 * u).exp();
        let one_minus = 2.0 / (1.0 + e2u);
        let x = u.tanh();
        let w = h * 0.5 * PI * t.cosh() / (cu * cu);
        if one_minus < 1e-300 || w < 1e-300 {
            break;
        }
        if k == 0 {
            out.push((0.0, 1.0, 1.0, w));
        } else {
            out.push((x, 2.0 - one_minus, one_minus, w));
            out.push((-x, one_minus, 2.0 - one_minus, w));
        }
        k += 1;
    }
    out
}

/// Tanh–sinh integral of `f` over `(a, b)`.
///
/// `f` receives `(x, x - a, b - x)` with the two distances accurate near the
/// end points.
pub fn integrate_tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(
    level: u32,
    a: f64,
    b: f64,
    mut f: F,
) -> f64 {
    let half = 0.5 * (b - a);
    tanh_sinh_nodes(level)
        .into_iter()
        .map(|(x, dl, dr, w)| {
            let da = half * dl;
            let db = half * dr;
            let xx = if dl < dr { a + da } else { b - db };
            let _ = x;
            w * f(xx, da, db)
        })
        .sum::<f64>()
        * half
}
