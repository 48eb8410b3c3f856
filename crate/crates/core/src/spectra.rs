//! Eigenvalue clusters of `H + V` around the Landau levels, their moments,
//! the counting spectral shift function and `W(z) = Tr((H+V-z)^{-1} - (H-z)^{-1})`,
//! all from one consistent sector/level truncation.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernels::landau_level;
use crate::operators::{default_k_max, default_n_max, first_level, sector_hamiltonian};
use crate::potentials::Potential;
use crate::{Error, Result};

type C = Complex64;

/// Deviations below `DEVIATION_FLOOR · B` count as unperturbed.
pub const DEVIATION_FLOOR: f64 = 1e-13;
/// Allowed drift of the top cluster when `N_max` is raised by 10.
pub const TRUNCATION_DRIFT: f64 = 1e-8;
pub const CONTOUR_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: usize,
    pub k_max: i64,
}

impl Truncation {
    /// Cutoffs for studying clusters up to level `n_top`.
    pub fn for_clusters(v: &Potential, b: f64, n_top: usize) -> Self {
        Truncation {
            n_max: default_n_max(n_top),
            k_max: default_k_max(v, b),
        }
    }

    pub fn sectors(&self) -> RangeInclusive<i64> {
        -self.k_max.min(self.n_max as i64)..=self.k_max
    }
}

/// Spectra of all sector matrices of one truncation.
#[derive(Debug, Clone)]
pub struct SectorSpectra {
    pub b: f64,
    pub truncation: Truncation,
    /// `(k, ascending eigenvalues)`; entry `i` pairs with level `first_level(k) + i`.
    pub sectors: Vec<(i64, Vec<f64>)>,
    perturbed_sorted: Vec<f64>,
    free_sorted: Vec<f64>,
}

impl SectorSpectra {
    pub fn compute(v: &Potential, b: f64, truncation: Truncation) -> Result<Self> {
        let sectors: Vec<(i64, Vec<f64>)> = truncation
            .sectors()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|k| {
                let s = sector_hamiltonian(k, truncation.n_max, v, b)?;
                Ok((k, s.eigenvalues()?))
            })
            .collect::<Result<_>>()?;
        let mut perturbed_sorted: Vec<f64> = sectors.iter().flat_map(|(_, e)| e.iter().copied()).collect();
        perturbed_sorted.sort_by(f64::total_cmp);
        let mut free_sorted: Vec<f64> = sectors
            .iter()
            .flat_map(|(k, _)| (first_level(*k)..=truncation.n_max).map(|n| landau_level(n, b)))
            .collect();
        free_sorted.sort_by(f64::total_cmp);
        Ok(SectorSpectra {
            b,
            truncation,
            sectors,
            perturbed_sorted,
            free_sorted,
        })
    }

    /// Index of the cluster interval `[Λ_n - B, Λ_n + B)` containing `λ`.
    pub fn cluster_index(&self, lambda: f64) -> Option<usize> {
        let n = (lambda / (2.0 * self.b)).floor();
        (n >= 0.0).then_some(n as usize)
    }

    pub fn cluster(&self, n: usize) -> ClusterResult {
        let level = landau_level(n, self.b);
        let mut deviations = Vec::new();
        for (k, ev) in &self.sectors {
            for (i, &e) in ev.iter().enumerate() {
                if self.cluster_index(e) != Some(n) {
                    continue;
                }
                let delta = e - level;
                if delta.abs() > DEVIATION_FLOOR * self.b {
                    deviations.push(Deviation { delta, k: *k, index: i });
                }
            }
        }
        ClusterResult::new(n, deviations)
    }

    /// `#{Λ < λ} - #{λ_j < λ}` over the truncated family.
    pub fn ssf(&self, lambda: f64) -> Result<SsfSample> {
        let i = self.perturbed_sorted.partition_point(|&e| e < lambda);
        for j in [i.wrapping_sub(1), i] {
            if let Some(&e) = self.perturbed_sorted.get(j) {
                if (e - lambda).abs() <= 1e-10 {
                    return Err(Error::OnEigenvalue { lambda, tol: 1e-10 });
                }
            }
        }
        let free = self.free_sorted.partition_point(|&e| e < lambda);
        Ok(SsfSample {
            lambda,
            xi: free as i64 - i as i64,
            n_context: self.cluster_index(lambda).unwrap_or(0),
        })
    }

    /// `Σ_sectors Σ_j (1/(λ_j - z) - 1/(Λ_{n(j)} - z))`.
    pub fn resolvent_trace(&self, z: C) -> Result<C> {
        let tol = 1e-6 * self.b;
        let mut w = C::new(0.0, 0.0);
        for (k, ev) in &self.sectors {
            let lo = first_level(*k);
            for (i, &e) in ev.iter().enumerate() {
                let l = landau_level(lo + i, self.b);
                let (de, dl) = (e - z, l - z);
                if de.norm() <= tol || dl.norm() <= tol {
                    return Err(Error::Spectrum {
                        z: format!("{z}"),
                        level: if de.norm() <= tol { e } else { l },
                        tol,
                    });
                }
                w += (l - e) / (de * dl);
            }
        }
        Ok(w)
    }

    /// `-(1/2πi) ∮_{|z-Λ_n|=B} W(z) (z - Λ_n)^{k+1} dz` by the trapezoid rule.
    pub fn contour_moment(&self, n: usize, k: u32, points: usize) -> Result<f64> {
        let level = landau_level(n, self.b);
        let terms: Vec<C> = (0..points)
            .into_par_iter()
            .map(|p| {
                let th = 2.0 * PI * (p as f64 + 0.5) / points as f64;
                let u = C::from_polar(self.b, th);
                // dz = i u dθ
                Ok(self.resolvent_trace(level + u)? * u.powu(k + 1) * C::i() * u)
            })
            .collect::<Result<_>>()?;
        let sum: C = terms.iter().sum();
        let integral = sum * (2.0 * PI / points as f64);
        Ok((-integral / (2.0 * PI * C::i())).re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub delta: f64,
    pub k: i64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub n: usize,
    /// Ordered by decreasing `|delta|`.
    pub deviations: Vec<Deviation>,
    pub width: f64,
    /// `μ_n^{(k)} = Σ δ^{k+1}`, `k = 0, 1, 2`.
    pub moments: [f64; 3],
}

impl ClusterResult {
    pub fn new(n: usize, mut deviations: Vec<Deviation>) -> Self {
        deviations.sort_by(|a, b| b.delta.abs().total_cmp(&a.delta.abs()).then(a.k.cmp(&b.k)));
        let width = deviations.first().map_or(0.0, |d| d.delta.abs());
        let mut moments = [0.0; 3];
        // smallest first, for a reproducible and accurate sum
        for d in deviations.iter().rev() {
            moments[0] += d.delta;
            moments[1] += d.delta.powi(2);
            moments[2] += d.delta.powi(3);
        }
        ClusterResult {
            n,
            deviations,
            width,
            moments,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsfSample {
    pub lambda: f64,
    pub xi: i64,
    pub n_context: usize,
}

fn check_cluster_range(n_range: &RangeInclusive<usize>, truncation: Truncation) -> Result<()> {
    let need = default_n_max(*n_range.end());
    if truncation.n_max < need {
        return Err(Error::TruncationInsufficient(format!(
            "clusters up to n = {} need N_max ≥ {need}, got {}",
            n_range.end(),
            truncation.n_max
        )));
    }
    Ok(())
}

/// Clusters for `n_range` from an already computed truncation.
pub fn clusters_from(spectra: &SectorSpectra, n_range: RangeInclusive<usize>) -> Vec<ClusterResult> {
    n_range.map(|n| spectra.cluster(n)).collect()
}

/// Errors when the top cluster moves by more than [`TRUNCATION_DRIFT`]
/// once `N_max` is raised by 10.
pub fn check_truncation_drift(v: &Potential, b: f64, spectra: &SectorSpectra, n_top: usize) -> Result<f64> {
    let mut bumped = spectra.truncation;
    bumped.n_max += 10;
    let finer = SectorSpectra::compute(v, b, bumped)?;
    let level = n_top;
    let mut drift = 0.0f64;
    for ((k, a), (_, c)) in spectra.sectors.iter().zip(&finer.sectors) {
        let lo = first_level(*k);
        if level >= lo {
            drift = drift.max((a[level - lo] - c[level - lo]).abs());
        }
    }
    if drift > TRUNCATION_DRIFT {
        return Err(Error::TruncationInsufficient(format!(
            "cluster {n_top} moved by {drift:.3e} when N_max went {} → {}",
            spectra.truncation.n_max, bumped.n_max
        )));
    }
    Ok(drift)
}

/// All clusters in `n_range`, with the `N_max + 10` drift check on the top one.
pub fn compute_clusters(
    v: &Potential,
    b: f64,
    n_range: RangeInclusive<usize>,
    truncation: Truncation,
) -> Result<Vec<ClusterResult>> {
    check_cluster_range(&n_range, truncation)?;
    let spectra = SectorSpectra::compute(v, b, truncation)?;
    check_truncation_drift(v, b, &spectra, *n_range.end())?;
    Ok(clusters_from(&spectra, n_range))
}

/// `(n, width, width·√n)` per cluster.
pub fn width_stats(clusters: &[ClusterResult]) -> Vec<(usize, f64, f64)> {
    clusters
        .iter()
        .map(|c| (c.n, c.width, c.width * (c.n as f64).sqrt()))
        .collect()
}

pub fn ssf_counting(v: &Potential, b: f64, lambda: f64, truncation: Truncation) -> Result<SsfSample> {
    SectorSpectra::compute(v, b, truncation)?.ssf(lambda)
}

pub fn resolvent_trace_w(v: &Potential, b: f64, z: C, truncation: Truncation) -> Result<C> {
    SectorSpectra::compute(v, b, truncation)?.resolvent_trace(z)
}

/// `∫_{Δ_n} ξ dλ` by the trapezoid rule on `samples` equispaced cell centres
/// plus both endpoints.
pub fn ssf_cluster_integral(spectra: &SectorSpectra, n: usize, samples: usize) -> Result<f64> {
    let b = spectra.b;
    let lo = landau_level(n, b) - b;
    let h = 2.0 * b / samples as f64;
    let mut nodes = Vec::with_capacity(samples + 2);
    nodes.push(lo);
    nodes.extend((0..samples).map(|i| lo + (i as f64 + 0.5) * h));
    nodes.push(lo + 2.0 * b);
    let xi: Vec<f64> = nodes
        .iter()
        .map(|&l| spectra.ssf(l).map(|s| s.xi as f64))
        .collect::<Result<_>>()?;
    Ok(nodes
        .windows(2)
        .zip(xi.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum())
}

/// Smallest `n` in `n_range` from which on every `λ ∈ Δ_n` with `ξ(λ) ≠ 0`
/// satisfies `|λ - Λ_n| ≤ c/√n`, with `c` the largest `width·√n` beyond it.
pub fn support_confinement_onset(clusters: &[ClusterResult], c: f64) -> Option<usize> {
    let mut onset = None;
    for cl in clusters.iter().rev() {
        let ok = cl.n > 0 && cl.width <= c / (cl.n as f64).sqrt();
        if ok {
            onset = Some(cl.n);
        } else {
            break;
        }
    }
    onset
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bump(a: f64) -> Potential {
        Potential::bump(a, 1.0).unwrap()
    }

    fn small() -> Truncation {
        Truncation { n_max: 60, k_max: 25 }
    }

    #[test]
    fn zero_potential_is_silent() {
        let s = SectorSpectra::compute(&Potential::zero(), 1.0, small()).unwrap();
        for n in [0usize, 5, 10] {
            let c = s.cluster(n);
            assert!(c.deviations.is_empty() && c.moments == [0.0; 3] && c.width == 0.0);
        }
        assert_eq!(s.ssf(10.5).unwrap().xi, 0);
        assert_eq!(s.resolvent_trace(C::new(4.0, 0.3)).unwrap(), C::new(0.0, 0.0));
    }

    #[test]
    fn moments_are_power_sums() {
        let s = SectorSpectra::compute(&bump(0.2), 1.0, small()).unwrap();
        let c = s.cluster(10);
        let direct: f64 = c.deviations.iter().map(|d| d.delta.powi(2)).sum();
        assert_relative_eq!(c.moments[1], direct, max_relative = 1e-12);
        assert!(c.deviations.iter().all(|d| d.delta.abs() < 1.0 && d.delta > 0.0));
        assert!(c.deviations.windows(2).all(|w| w[0].delta.abs() >= w[1].delta.abs()));
    }

    #[test]
    fn first_order_sum_rule() {
        let b = 1.0;
        for eps in [1e-3, 5e-4] {
            let v = bump(eps);
            let s = SectorSpectra::compute(&v, b, small()).unwrap();
            let want = b / (2.0 * PI) * v.integral_v();
            let mu = s.cluster(8).moments[0];
            assert!(((mu - want) / want).abs() < 20.0 * eps, "eps={eps}: {mu} vs {want}");
        }
    }

    #[test]
    fn contour_matches_power_sums() {
        let s = SectorSpectra::compute(&bump(0.2), 1.0, small()).unwrap();
        for n in [3usize, 10] {
            let c = s.cluster(n);
            for k in 0..3u32 {
                let m = s.contour_moment(n, k, CONTOUR_POINTS).unwrap();
                let m2 = s.contour_moment(n, k, 2 * CONTOUR_POINTS).unwrap();
                assert_relative_eq!(m, c.moments[k as usize], max_relative = 1e-6);
                assert!((m - m2).abs() <= 1e-8 * m.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn w_conjugate_symmetry_and_proximity() {
        let s = SectorSpectra::compute(&bump(0.2), 1.0, small()).unwrap();
        let z = C::new(6.3, 0.7);
        let a = s.resolvent_trace(z).unwrap();
        let b = s.resolvent_trace(z.conj()).unwrap();
        assert!((a - b.conj()).norm() <= 1e-14 * a.norm());
        assert!(s.resolvent_trace(C::new(5.0, 0.0)).is_err());
    }

    #[test]
    fn ssf_integral_matches_first_moment() {
        let s = SectorSpectra::compute(&bump(0.2), 1.0, small()).unwrap();
        let n = 12;
        let mu = s.cluster(n).moments[0];
        let int = ssf_cluster_integral(&s, n, 400_000).unwrap();
        assert!((int - mu).abs() <= 1e-4, "{int} vs {mu}");
    }

    #[test]
    fn ssf_below_level_counts_cluster() {
        let s = SectorSpectra::compute(&bump(-0.1), 1.0, small()).unwrap();
        let n = 9;
        let c = s.cluster(n);
        let lambda = landau_level(n, 1.0) - 0.5 * c.width;
        let xi = s.ssf(lambda).unwrap().xi;
        let count = c.deviations.iter().filter(|d| landau_level(n, 1.0) + d.delta < lambda).count() as i64;
        assert_eq!(xi, -count);
        assert!(xi < 0);
    }

    #[test]
    fn ssf_monotone_in_amplitude() {
        let t = small();
        let a = SectorSpectra::compute(&bump(0.1), 1.0, t).unwrap();
        let b = SectorSpectra::compute(&bump(0.2), 1.0, t).unwrap();
        let n = 10;
        let w = b.cluster(n).width;
        for i in 0..50 {
            let lambda = landau_level(n, 1.0) - 2.0 * w + 4.0 * w * (i as f64 + 0.37) / 50.0;
            if let (Ok(x), Ok(y)) = (a.ssf(lambda), b.ssf(lambda)) {
                assert!(x.xi <= y.xi);
            }
        }
    }

    #[test]
    fn widths_and_amplitude_monotonicity() {
        let t = small();
        let a = SectorSpectra::compute(&bump(0.1), 1.0, t).unwrap();
        let b = SectorSpectra::compute(&bump(0.2), 1.0, t).unwrap();
        for n in [5usize, 10] {
            assert!(b.cluster(n).width >= a.cluster(n).width);
        }
        let stats = width_stats(&clusters_from(&b, 1..=10));
        assert!(stats.iter().all(|(n, w, s)| *w > 0.0 && (s - w * (*n as f64).sqrt()).abs() < 1e-15));
    }

    #[test]
    fn range_precondition() {
        let err = compute_clusters(&bump(0.2), 1.0, 0..=20, Truncation { n_max: 60, k_max: 25 });
        assert!(matches!(err, Err(Error::TruncationInsufficient(_))));
    }
}
