//! Finite-dimensional realizations of `H + V`: angular-momentum sector
//! Galerkin matrices (radial `V`), Nyström discretisations of sandwiched
//! kernels `|V|^{1/2} K |V|^{1/2}`, and dense eigensolvers.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::kernels::{landau_level, projection_kernel, resolvent_diagonal_regular, resolvent_kernel, ResolventMode};
use crate::potentials::Potential;
use crate::specfun::gamma::ln_factorial;
use crate::specfun::laguerre::{laguerre, laguerre_functions};
use crate::specfun::quadrature::gauss_legendre;
use crate::{Error, Result};

type C = Complex64;

/// Order of the radial Gauss–Legendre rule for sector matrix elements.
pub const RADIAL_ORDER: usize = 200;

/// Default sector cutoff `⌈B R²/2⌉ + 24`, applied symmetrically to `±k`.
pub fn default_k_max(v: &Potential, b: f64) -> i64 {
    let r = v.support_radius();
    (0.5 * b * r * r).ceil() as i64 + 24
}

/// Default level cutoff for cluster studies up to `n_max`.
pub fn default_n_max(n_max: usize) -> usize {
    2 * n_max + 40
}

/// First level present in sector `k`.
pub fn first_level(k: i64) -> usize {
    (-k).max(0) as usize
}

#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub k: i64,
    pub n_max: usize,
    /// `Λ_n` for `n = first_level(k)..=n_max`.
    pub h0_diag: Vec<f64>,
    pub v_block: DMatrix<f64>,
    pub b: f64,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.h0_diag.len()
    }

    pub fn first_level(&self) -> usize {
        first_level(self.k)
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let mut h = self.v_block.clone();
        for (i, l) in self.h0_diag.iter().enumerate() {
            h[(i, i)] += l;
        }
        h
    }

    /// Ascending eigenvalues of `H + V` restricted to the sector.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.v_block.iter().all(|&x| x == 0.0) {
            return Ok(self.h0_diag.clone());
        }
        symmetric_eigensolve(&self.hamiltonian())
    }
}

/// Radial nodes `r_i` and weights `w_i B r_i v(r_i)` for `∫ v φ φ' B r dr`.
fn radial_rule(v: &Potential, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = gauss_legendre(RADIAL_ORDER, 0.0, v.support_radius())?;
    let t: Vec<f64> = rule.nodes.iter().map(|r| 0.5 * b * r * r).collect();
    let w = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&r, &w)| w * b * r * v.v(r))
        .collect();
    Ok((t, w))
}

/// Galerkin block of `H + V` in sector `k` on levels up to `n_max`.
///
/// With `α = |k|` and `j = n - first_level(k)`, the basis is the orthonormal
/// Laguerre function `φ_j^{(α)}(B r²/2)`; `V_{jj'} = ∫ v φ_j φ_j' B r dr`.
pub fn sector_hamiltonian(k: i64, n_max: usize, v: &Potential, b: f64) -> Result<SectorMatrix> {
    let lo = first_level(k);
    if n_max < lo {
        return Err(Error::Invalid(format!("sector {k} is empty below level {n_max}")));
    }
    let dim = n_max - lo + 1;
    let h0_diag = (lo..=n_max).map(|n| landau_level(n, b)).collect();
    if v.is_zero() {
        return Ok(SectorMatrix {
            k,
            n_max,
            h0_diag,
            v_block: DMatrix::zeros(dim, dim),
            b,
        });
    }
    let (t, w) = radial_rule(v, b)?;
    let alpha = k.unsigned_abs() as u32;
    let q = t.len();
    let mut phi = DMatrix::<f64>::zeros(dim, q);
    let mut phi_w = DMatrix::<f64>::zeros(q, dim);
    for (i, (&ti, &wi)) in t.iter().zip(&w).enumerate() {
        let f = laguerre_functions(dim - 1, alpha, ti);
        for j in 0..dim {
            phi[(j, i)] = f[j];
            phi_w[(i, j)] = wi * f[j];
        }
    }
    let mut v_block = &phi * &phi_w;
    for i in 0..dim {
        for j in 0..i {
            let s = 0.5 * (v_block[(i, j)] + v_block[(j, i)]);
            v_block[(i, j)] = s;
            v_block[(j, i)] = s;
        }
    }
    Ok(SectorMatrix {
        k,
        n_max,
        h0_diag,
        v_block,
        b,
    })
}

/// Eigenvalues of `V^{1/2} P_n V^{1/2}` sector by sector:
/// `n!/(n+k)! ∫_0^∞ v(√(2t/B)) e^{-t} t^k L_n^{(k)}(t)² dt`.
///
/// Integrated in `t` over `(0, B R²/2)`; negative `k = -m` uses
/// `L_n^{(-m)}(t) = (-t)^m (n-m)!/n! L_{n-m}^{(m)}(t)`.
pub fn radial_projection_eigenvalues(
    n: usize,
    k_range: RangeInclusive<i64>,
    v: &Potential,
    b: f64,
) -> Result<Vec<(i64, f64)>> {
    if *k_range.start() < -(n as i64) {
        return Err(Error::Range(format!("sector {} does not meet level {n}", k_range.start())));
    }
    let r = v.support_radius();
    let t_max = 0.5 * b * r * r;
    let rule = gauss_legendre(RADIAL_ORDER, 0.0, t_max.max(f64::MIN_POSITIVE))?;
    let vt: Vec<f64> = rule.nodes.iter().map(|&t| v.v((2.0 * t / b).sqrt())).collect();
    Ok(k_range
        .map(|k| {
            let m = k.unsigned_abs() as usize;
            let (deg, alpha) = if k >= 0 { (n, m) } else { (n - m, m) };
            let ln_norm = ln_factorial(deg) - ln_factorial(deg + alpha);
            let mut acc = 0.0;
            for ((&t, &w), &vv) in rule.nodes.iter().zip(&rule.weights).zip(&vt) {
                if vv == 0.0 {
                    continue;
                }
                let l = laguerre(deg, alpha as u32, t);
                acc += w * vv * l * l * (ln_norm + alpha as f64 * t.ln() - t).exp();
            }
            (k, acc)
        })
        .collect())
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigensolve(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Invalid(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.amax().max(1.0);
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if dev > 1e-10 * scale {
        return Err(Error::Symmetry(dev));
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Ascending eigenvalues of a hermitian matrix.
pub fn hermitian_eigensolve(m: &DMatrix<C>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Invalid(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if dev > 1e-10 * scale {
        return Err(Error::Symmetry(dev));
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Polar product grid on the support disk: Gauss–Legendre in `r`,
/// equispaced (trapezoid) in the angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NystromGrid {
    pub radial: usize,
    pub angular: usize,
}

impl NystromGrid {
    /// Resolves the oscillation of `L_n` over the support for level `n`.
    pub fn for_level(n: usize) -> Self {
        NystromGrid {
            radial: 40 + n / 2,
            angular: 64 + 2 * ((n as f64).sqrt() as usize) * 4,
        }
    }

    pub fn refined(self) -> Self {
        NystromGrid {
            radial: 2 * self.radial,
            angular: 2 * self.angular,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SandwichKernel {
    Projection(usize),
    Resolvent(C),
}

/// `√w_i |V(x_i)|^{1/2} K(x_i, x_j) |V(x_j)|^{1/2} √w_j` on a polar grid.
///
/// Both kernels and `V` are rotation invariant, so the matrix is block
/// circulant in the angular index; it is stored as the Fourier blocks
/// `K̂_m(i, j) = Σ_d K_{(i,0),(j,d)} e^{i m θ_d}`, whose spectra together
/// make up the spectrum of the full matrix.
#[derive(Debug, Clone)]
pub struct NystromOperator {
    pub grid: NystromGrid,
    pub radii: Vec<f64>,
    /// Cell weight `w_r · r · 2π/N_θ` per radial node.
    pub weights: Vec<f64>,
    /// First block row: `generator[d][(i, j)] = entry((i, 0), (j, d))`.
    pub generator: Vec<DMatrix<C>>,
    pub blocks: Vec<DMatrix<C>>,
}

impl NystromOperator {
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let na = self.grid.angular;
        let mut out = Vec::with_capacity(self.radii.len() * na);
        for &r in &self.radii {
            for a in 0..na {
                let th = 2.0 * PI * a as f64 / na as f64;
                out.push([r * th.cos(), r * th.sin()]);
            }
        }
        out
    }

    /// Full matrix, index `(i, a) → i·N_θ + a`.
    pub fn matrix(&self) -> DMatrix<C> {
        let (nr, na) = (self.radii.len(), self.grid.angular);
        DMatrix::from_fn(nr * na, nr * na, |p, q| {
            let (i, a) = (p / na, p % na);
            let (j, c) = (q / na, q % na);
            self.generator[(c + na - a) % na][(i, j)]
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let per: Vec<Vec<f64>> = self.blocks.par_iter().map(hermitian_eigensolve).collect::<Result<_>>()?;
        let mut ev: Vec<f64> = per.into_iter().flatten().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().fold(0.0, |m, e| m.max(e.abs())))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self.generator.iter().map(|g| g.norm_squared()).sum();
        (s * self.grid.angular as f64).sqrt()
    }
}

pub fn nystrom_sandwich(kernel: SandwichKernel, v: &Potential, b: f64, grid: NystromGrid) -> Result<NystromOperator> {
    if grid.radial == 0 || grid.angular == 0 {
        return Err(Error::Invalid("empty Nyström grid".into()));
    }
    let rule = gauss_legendre(grid.radial, 0.0, v.support_radius())?;
    let na = grid.angular;
    let dth = 2.0 * PI / na as f64;
    let radii = rule.nodes.clone();
    let weights: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(r, w)| w * r * dth).collect();
    for pair in radii.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::Coincidence(format!("radial nodes coincide at {}", pair[0])));
        }
    }
    let amp: Vec<f64> = radii
        .iter()
        .zip(&weights)
        .map(|(&r, &w)| (w * v.v(r).abs()).sqrt())
        .collect();
    let nr = radii.len();
    let diag_regular = match kernel {
        SandwichKernel::Resolvent(z) => Some(resolvent_diagonal_regular(z, b)?),
        SandwichKernel::Projection(_) => None,
    };
    let generator: Vec<DMatrix<C>> = (0..na)
        .into_par_iter()
        .map(|d| {
            let th = d as f64 * dth;
            let mut g = DMatrix::<C>::zeros(nr, nr);
            for i in 0..nr {
                if amp[i] == 0.0 {
                    continue;
                }
                let x = [radii[i], 0.0];
                for j in 0..nr {
                    if amp[j] == 0.0 {
                        continue;
                    }
                    let y = [radii[j] * th.cos(), radii[j] * th.sin()];
                    let kval = match kernel {
                        SandwichKernel::Projection(n) => projection_kernel(n, x, y, b)?.value,
                        SandwichKernel::Resolvent(z) => {
                            if i == j && d == 0 {
                                // cell average of the logarithmic singularity over
                                // a disk of the cell's area
                                let rho = (weights[i] / PI).sqrt();
                                diag_regular.unwrap() - (rho.ln() - 0.5) / (2.0 * PI)
                            } else {
                                resolvent_kernel(z, x, y, b, ResolventMode::ClosedForm)?.value
                            }
                        }
                    };
                    g[(i, j)] = amp[i] * kval * amp[j];
                }
            }
            Ok(g)
        })
        .collect::<Result<_>>()?;
    let blocks: Vec<DMatrix<C>> = (0..na)
        .into_par_iter()
        .map(|m| {
            let mut blk = DMatrix::<C>::zeros(nr, nr);
            for (d, g) in generator.iter().enumerate() {
                let ph = C::from_polar(1.0, (m * d % na) as f64 * dth);
                blk += g * ph;
            }
            // exact hermitian symmetrisation of roundoff
            let adj = blk.adjoint();
            (blk + adj) * C::new(0.5, 0.0)
        })
        .collect();
    Ok(NystromOperator {
        grid,
        radii,
        weights,
        generator,
        blocks,
    })
}

/// `‖|V|^{1/2}(H - λ)^{-1}|V|^{1/2}‖` on the Nyström grid.
pub fn birman_schwinger_norm(lambda: f64, v: &Potential, b: f64, grid: NystromGrid) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    nystrom_sandwich(SandwichKernel::Resolvent(C::new(lambda, 0.0)), v, b, grid)?.operator_norm()
}

/// Unit vector helper for residual checks.
pub fn residual_norm(m: &DMatrix<f64>, lambda: f64, vec: &DVector<f64>) -> f64 {
    (m * vec - vec * lambda).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bump() -> Potential {
        Potential::bump(0.2, 1.0).unwrap()
    }

    #[test]
    fn eigensolve_basics() {
        assert_eq!(symmetric_eigensolve(&DMatrix::identity(3, 3)).unwrap(), vec![1.0, 1.0, 1.0]);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let ev = symmetric_eigensolve(&d).unwrap();
        for (a, b) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 1e-3;
        assert!(matches!(symmetric_eigensolve(&m), Err(Error::Symmetry(_))));
    }

    #[test]
    fn eigensolve_residuals_random() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 50;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = rnd();
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let eig = m.clone().symmetric_eigen();
        let norm = m.norm();
        for (l, vcol) in eig.eigenvalues.iter().zip(eig.eigenvectors.column_iter()) {
            assert!(residual_norm(&m, *l, &vcol.into_owned()) <= 1e-10 * norm);
        }
        let ours = symmetric_eigensolve(&m).unwrap();
        assert!(ours.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_potential_sectors() {
        let s = sector_hamiltonian(-3, 10, &Potential::zero(), 1.0).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.v_block.amax(), 0.0);
        let ev = s.eigenvalues().unwrap();
        for (e, n) in ev.iter().zip(3..=10) {
            assert_relative_eq!(*e, landau_level(n, 1.0), epsilon = 1e-13);
        }
        let r = radial_projection_eigenvalues(5, -5..=5, &Potential::zero(), 1.0).unwrap();
        assert!(r.iter().all(|(_, e)| *e == 0.0));
    }

    #[test]
    fn sector_diagonal_matches_radial_route() {
        let v = bump();
        let b = 1.0;
        for k in [-12i64, -3, 0, 2, 9] {
            let s = sector_hamiltonian(k, 80, &v, b).unwrap();
            assert!((&s.v_block - s.v_block.transpose()).amax() <= 1e-12);
            for n in [first_level(k), 17, 40, 80] {
                let d = s.v_block[(n - s.first_level(), n - s.first_level())];
                let r = radial_projection_eigenvalues(n, k..=k, &v, b).unwrap()[0].1;
                assert!((d - r).abs() <= 1e-10 * r.abs().max(1e-3), "k={k} n={n}: {d} vs {r}");
            }
        }
    }

    #[test]
    fn radial_range_error() {
        assert!(matches!(
            radial_projection_eigenvalues(3, -4..=0, &bump(), 1.0),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn radial_eigenvalues_bounded_by_sup() {
        let v = bump();
        for n in [0usize, 5, 30] {
            for (_, e) in radial_projection_eigenvalues(n, -(n as i64)..=30, &v, 1.0).unwrap() {
                assert!((0.0..=0.2).contains(&e));
            }
        }
    }

    #[test]
    fn first_order_perturbation() {
        let eps = 1e-4;
        let v = Potential::bump(eps, 1.0).unwrap();
        let s = sector_hamiltonian(1, 30, &v, 1.0).unwrap();
        let ev = s.eigenvalues().unwrap();
        for n in [1usize, 10, 25] {
            let j = n - s.first_level();
            let defect = (ev[j] - landau_level(n, 1.0) - s.v_block[(j, j)]).abs();
            assert!(defect <= 1e-6 * eps && defect <= eps * eps, "n={n}: {defect}");
        }
    }

    #[test]
    fn sector_spectra_stable_under_level_refinement() {
        // couplings to distant levels decay only slowly (the bump is not
        // analytic at its edge), so stability to 1e-8 needs N_max ≥ 2n + 60
        let v = bump();
        let target = 10;
        for k in [-4i64, 0, 5] {
            let j = target - first_level(k);
            let ev = |n_max| sector_hamiltonian(k, n_max, &v, 1.0).unwrap().eigenvalues().unwrap()[j];
            let (a, b, c) = (ev(2 * target + 20), ev(2 * target + 60), ev(2 * target + 140));
            assert!((b - c).abs() <= 1e-8, "k={k}: {b} vs {c}");
            assert!((b - c).abs() < (a - c).abs());
            // truncation only ever removes level repulsion from above
            assert!(a >= c && b >= c);
        }
    }

    #[test]
    fn nystrom_projection_matches_radial_eigenvalues() {
        let v = bump();
        for n in [2usize, 16] {
            let op = nystrom_sandwich(SandwichKernel::Projection(n), &v, 1.0, NystromGrid::for_level(n)).unwrap();
            let mut ev = op.eigenvalues().unwrap();
            ev.retain(|e| e.abs() > 1e-9);
            ev.reverse();
            let mut radial: Vec<f64> = radial_projection_eigenvalues(n, -(n as i64)..=40, &v, 1.0)
                .unwrap()
                .into_iter()
                .map(|(_, e)| e)
                .filter(|e| *e > 1e-9)
                .collect();
            radial.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in ev.iter().zip(&radial).take(8) {
                assert!((a - b).abs() <= 1e-4, "n={n}: {a} vs {b}");
            }
            let fro2: f64 = radial.iter().map(|e| e * e).sum();
            assert_relative_eq!(op.frobenius_norm(), fro2.sqrt(), max_relative = 1e-4);
        }
    }

    #[test]
    fn nystrom_dense_matches_blocks() {
        let v = bump();
        let grid = NystromGrid { radial: 6, angular: 8 };
        let op = nystrom_sandwich(SandwichKernel::Projection(3), &v, 1.0, grid).unwrap();
        let dense = hermitian_eigensolve(&op.matrix()).unwrap();
        let blocks = op.eigenvalues().unwrap();
        for (a, b) in dense.iter().zip(&blocks) {
            assert!((a - b).abs() < 1e-13);
        }
        assert_relative_eq!(op.matrix().norm(), op.frobenius_norm(), max_relative = 1e-12);
        assert_eq!(op.nodes().len(), 48);
        let zero = nystrom_sandwich(SandwichKernel::Projection(3), &Potential::zero(), 1.0, grid).unwrap();
        assert_eq!(zero.frobenius_norm(), 0.0);
    }

    #[test]
    fn nystrom_projection_grid_convergence() {
        let v = bump();
        let g = NystromGrid::for_level(16);
        let a = nystrom_sandwich(SandwichKernel::Projection(16), &v, 1.0, g).unwrap().operator_norm().unwrap();
        let b = nystrom_sandwich(SandwichKernel::Projection(16), &v, 1.0, g.refined())
            .unwrap()
            .operator_norm()
            .unwrap();
        assert!((a - b).abs() <= 1e-4);
    }

    #[test]
    fn birman_schwinger_behaviour() {
        let grid = NystromGrid { radial: 24, angular: 32 };
        assert_eq!(birman_schwinger_norm(2.0, &Potential::zero(), 1.0, grid).unwrap(), 0.0);
        let a = birman_schwinger_norm(4.0, &bump(), 1.0, grid).unwrap();
        let b = birman_schwinger_norm(4.0, &Potential::bump(0.4, 1.0).unwrap(), 1.0, grid).unwrap();
        assert!(a > 0.0 && a < 1.0);
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn v_block_symmetric(k in -20i64..20, amp in -1.0f64..1.0) {
            let s = sector_hamiltonian(k, 40, &Potential::bump(amp, 1.0).unwrap(), 1.0).unwrap();
            prop_assert_eq!(s.dim(), 40 - first_level(k) + 1);
            prop_assert!((&s.v_block - s.v_block.transpose()).amax() <= 1e-12);
        }
    }
}
