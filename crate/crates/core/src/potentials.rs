//! Smooth, compactly supported radial potentials and their integral functionals.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::specfun::elliptic::elliptic_k_complement;
use crate::specfun::laguerre::laguerre;
use crate::specfun::quadrature::{gauss_legendre, integrate_adaptive, integrate_tanh_sinh, QuadratureRule};
use crate::{Error, Point, Result};

/// `v(r) = amplitude · exp(1 - R²/(R² - r²))` for `r < R`, zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    pub radius: f64,
}

impl Bump {
    pub fn value(&self, r: f64) -> f64 {
        let r2 = r * r;
        let big = self.radius * self.radius;
        if r2 >= big || self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * (1.0 - big / (big - r2)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    Bump {
        amplitude: f64,
        radius: f64,
    },
    /// `scale · Σ bumps`
    ScaledSum {
        #[serde(default = "one")]
        scale: f64,
        bumps: Vec<Bump>,
    },
}

fn one() -> f64 {
    1.0
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let check = |b: &Bump| {
            if !(b.radius > 0.0) || !b.radius.is_finite() || !b.amplitude.is_finite() {
                return Err(Error::Invalid(format!(
                    "bump needs a finite amplitude and radius > 0, got ({}, {})",
                    b.amplitude, b.radius
                )));
            }
            Ok(())
        };
        match self {
            Profile::Bump { amplitude, radius } => check(&Bump {
                amplitude: *amplitude,
                radius: *radius,
            }),
            Profile::ScaledSum { scale, bumps } => {
                if bumps.is_empty() || !scale.is_finite() {
                    return Err(Error::Invalid("scaled_sum needs a finite scale and at least one bump".into()));
                }
                bumps.iter().try_for_each(check)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub integral_v: f64,
    pub integral_v2: f64,
    pub sup_norm: f64,
}

/// `h` sampled on a Gauss–Legendre rule covering its support `[0, √(2B)·R]`.
#[derive(Debug)]
pub struct ProfileTable {
    pub rule: QuadratureRule,
    pub values: Vec<f64>,
}

const PROFILE_NODES: usize = 600;

/// Radial potential centred at the origin. Functionals are computed lazily, once.
#[derive(Debug)]
pub struct Potential {
    profile: Profile,
    bumps: Vec<Bump>,
    functionals: OnceLock<Functionals>,
    newton: OnceLock<Result<f64>>,
    profile_tables: Mutex<HashMap<u64, Arc<ProfileTable>>>,
}

impl Clone for Potential {
    fn clone(&self) -> Self {
        Potential::new(self.profile.clone()).expect("profile was validated at construction")
    }
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile
    }
}

impl Potential {
    pub fn new(profile: Profile) -> Result<Self> {
        profile.validate()?;
        let bumps = match &profile {
            Profile::Bump { amplitude, radius } => vec![Bump {
                amplitude: *amplitude,
                radius: *radius,
            }],
            Profile::ScaledSum { scale, bumps } => bumps
                .iter()
                .map(|b| Bump {
                    amplitude: scale * b.amplitude,
                    radius: b.radius,
                })
                .collect(),
        };
        Ok(Potential {
            profile,
            bumps,
            functionals: OnceLock::new(),
            newton: OnceLock::new(),
            profile_tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn bump(amplitude: f64, radius: f64) -> Result<Self> {
        Potential::new(Profile::Bump { amplitude, radius })
    }

    pub fn zero() -> Self {
        Potential::bump(0.0, 1.0).expect("valid")
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// `c · V`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let profile = match &self.profile {
            Profile::Bump { amplitude, radius } => Profile::Bump {
                amplitude: c * amplitude,
                radius: *radius,
            },
            Profile::ScaledSum { scale, bumps } => Profile::ScaledSum {
                scale: c * scale,
                bumps: bumps.clone(),
            },
        };
        Potential::new(profile)
    }

    pub fn is_zero(&self) -> bool {
        self.bumps.iter().all(|b| b.amplitude == 0.0)
    }

    /// Radial profile `v(r)`.
    pub fn v(&self, r: f64) -> f64 {
        self.bumps.iter().map(|b| b.value(r)).sum()
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.v(x[0].hypot(x[1]))
    }

    pub fn support_radius(&self) -> f64 {
        self.bumps.iter().map(|b| b.radius).fold(0.0, f64::max)
    }

    /// Largest `ζ = B|x - y|²/2` between two points of the support.
    pub fn zeta_max(&self, b: f64) -> f64 {
        let d = 2.0 * self.support_radius();
        0.5 * b * d * d
    }

    /// Sign of `v` when it is sign-definite (`Some(0)` for `V ≡ 0`).
    pub fn sign_definite(&self) -> Option<i32> {
        let pos = self.bumps.iter().all(|b| b.amplitude >= 0.0);
        let neg = self.bumps.iter().all(|b| b.amplitude <= 0.0);
        match (pos, neg) {
            (true, true) => Some(0),
            (true, false) => Some(1),
            (false, true) => Some(-1),
            _ => None,
        }
    }

    /// `2π ∫_0^R f(v(r)) r dr` by adaptive Gauss quadrature, split at each bump edge.
    fn radial_integral<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut edges: Vec<f64> = self.bumps.iter().map(|b| b.radius).collect();
        edges.push(0.0);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut total = 0.0;
        for w in edges.windows(2) {
            total += integrate_adaptive(|r| f(self.v(r)) * r, w[0], w[1], 1e-13, 1e-300)
                .expect("smooth bump integrand");
        }
        2.0 * PI * total
    }

    pub fn functionals(&self) -> Functionals {
        *self.functionals.get_or_init(|| {
            if self.is_zero() {
                return Functionals {
                    integral_v: 0.0,
                    integral_v2: 0.0,
                    sup_norm: 0.0,
                };
            }
            let r = self.support_radius();
            let samples = 20_000;
            let sup = (0..=samples)
                .map(|i| self.v(r * i as f64 / samples as f64).abs())
                .fold(0.0, f64::max);
            let sup = if self.bumps.len() == 1 { self.bumps[0].amplitude.abs() } else { sup };
            Functionals {
                integral_v: self.radial_integral(|v| v),
                integral_v2: self.radial_integral(|v| v * v),
                sup_norm: sup,
            }
        })
    }

    pub fn integral_v(&self) -> f64 {
        self.functionals().integral_v
    }

    pub fn integral_v2(&self) -> f64 {
        self.functionals().integral_v2
    }

    pub fn sup_norm(&self) -> f64 {
        self.functionals().sup_norm
    }

    /// `N[V] = ∬ V(x)V(y)/|x-y| dx dy`.
    ///
    /// The angular integrals reduce the kernel to `8π K(m)/(r+r')` with
    /// `m = 4rr'/(r+r')²`; the inner radial integral is split at `r' = r`, where
    /// `K` has its logarithmic singularity, and both sides use tanh–sinh rules.
    pub fn newton_energy(&self) -> Result<f64> {
        self.newton
            .get_or_init(|| {
                if self.is_zero() {
                    return Ok(0.0);
                }
                let coarse = self.newton_at_level(5)?;
                let mut prev = coarse;
                for level in 6..=8 {
                    let fine = self.newton_at_level(level)?;
                    if (fine - prev).abs() <= 1e-9 * fine.abs() {
                        return Ok(fine);
                    }
                    prev = fine;
                }
                Err(Error::Quadrature(format!(
                    "Newton energy did not settle to 1e-9 (last value {prev})"
                )))
            })
            .clone()
    }

    fn newton_at_level(&self, level: u32) -> Result<f64> {
        let big_r = self.support_radius();
        let mut err = None;
        let outer = integrate_tanh_sinh(level, 0.0, big_r, |r, _, _| {
            let vr = self.v(r);
            if vr == 0.0 || r == 0.0 {
                return 0.0;
            }
            let mut kernel = |rp: f64, dist: f64| -> f64 {
                let s = r + rp;
                let kp = dist / s;
                if kp <= 0.0 {
                    return 0.0;
                }
                match elliptic_k_complement(kp.min(1.0)) {
                    Ok(k) => 8.0 * PI * k / s * rp * self.v(rp),
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            };
            let left = integrate_tanh_sinh(level, 0.0, r, |rp, _, db| kernel(rp, db));
            let right = integrate_tanh_sinh(level, r, big_r, |rp, da, _| kernel(rp, da));
            vr * r * (left + right)
        });
        match err {
            Some(e) => Err(e),
            None => Ok(outer),
        }
    }

    /// `∫_{ℝ²} V(y) V(y + s e) dy` for a unit vector `e` (independent of `e`).
    fn overlap(&self, s: f64, radial: &QuadratureRule, angles: usize) -> f64 {
        let big_r = self.support_radius();
        if s >= 2.0 * big_r {
            return 0.0;
        }
        let mut total = 0.0;
        for (&rho, &w) in radial.nodes.iter().zip(&radial.weights) {
            let vr = self.v(rho);
            if vr == 0.0 {
                continue;
            }
            // trapezoid on [0, π] (integrand even in φ), endpoints halved
            let mut ang = 0.0;
            for i in 0..=angles {
                let phi = PI * i as f64 / angles as f64;
                let d2 = rho * rho + s * s + 2.0 * rho * s * phi.cos();
                let wt = if i == 0 || i == angles { 0.5 } else { 1.0 };
                ang += wt * self.v(d2.max(0.0).sqrt());
            }
            ang *= 2.0 * PI / angles as f64;
            total += w * rho * vr * ang;
        }
        total
    }

    /// `h(t) = ∫_{S¹} dω ∫ V(y) V(y + √(2/B) t ω) dy`; zero for `t ≥ √(2B)·R`.
    pub fn autocorrelation_profile(&self, b: f64, t: f64) -> f64 {
        let s = (2.0 / b).sqrt() * t;
        if self.is_zero() || s >= 2.0 * self.support_radius() {
            return 0.0;
        }
        let radial = gauss_legendre(200, 0.0, self.support_radius()).expect("valid rule");
        2.0 * PI * self.overlap(s, &radial, 512)
    }

    /// Cached samples of `h` on a Gauss–Legendre rule over its support.
    pub fn profile_table(&self, b: f64) -> Arc<ProfileTable> {
        let key = b.to_bits();
        if let Some(t) = self.profile_tables.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return t.clone();
        }
        let t_max = (2.0 * b).sqrt() * self.support_radius();
        let rule = gauss_legendre(PROFILE_NODES, 0.0, t_max).expect("valid rule");
        let radial = gauss_legendre(200, 0.0, self.support_radius()).expect("valid rule");
        let values = rule
            .nodes
            .iter()
            .map(|&t| {
                let s = (2.0 / b).sqrt() * t;
                if self.is_zero() {
                    0.0
                } else {
                    2.0 * PI * self.overlap(s, &radial, 512)
                }
            })
            .collect();
        let table = Arc::new(ProfileTable { rule, values });
        self.profile_tables
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .entry(key)
            .or_insert(table)
            .clone()
    }

    /// `∫_0^∞ h(t) dt`, which equals `√(B/2) · N[V]`.
    pub fn profile_integral(&self, b: f64) -> f64 {
        let table = self.profile_table(b);
        table.rule.weights.iter().zip(&table.values).map(|(w, h)| w * h).sum()
    }

    /// `Tr(V P_n)² = (B/2π²) ∫_0^∞ L_n(t²)² e^{-t²} h(t) t dt`.
    pub fn trace_vpn_squared(&self, n: usize, b: f64) -> f64 {
        let table = self.profile_table(b);
        let integral: f64 = table
            .rule
            .nodes
            .iter()
            .zip(&table.rule.weights)
            .zip(&table.values)
            .map(|((&t, &w), &h)| {
                let l = laguerre(n, 0, t * t);
                w * l * l * (-t * t).exp() * h * t
            })
            .sum();
        b / (2.0 * PI * PI) * integral
    }
}
