//! Numerics for the two-dimensional Landau Hamiltonian perturbed by a smooth,
//! compactly supported radial potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Laguerre, Bessel, Gamma/digamma, Kummer `M` and `Γ(a)U(a,1;ζ)`,
//!   the Tricomi–Bessel expansion, elliptic `K` and Gauss quadrature rules.
//! * [`kernels`]: point values of the spectral projection, heat and resolvent kernels of `H`.
//! * [`potentials`]: bump potentials and their integral functionals.
//! * [`operators`]: angular-momentum sector matrices of `H + V` and sandwiched operators.
//! * [`spectra`]: eigenvalue clusters, moments, the spectral shift function and `W(z)`.
//! * [`asymptotics`]: closed-form coefficients, series fits and the trace/heat-trace checks.

pub mod asymptotics;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod potentials;
pub mod specfun;
pub mod spectra;

pub use error::{Error, Result};

/// A point of the plane.
pub type Point = [f64; 2];
