//! Special functions: everything the kernels and expansions need, implemented
//! from scratch on `f64` / `Complex64` (plus double-double accumulation where a
//! series cancels).

pub mod bessel;
pub mod ddouble;
pub mod elliptic;
pub mod gamma;
pub mod kummer;
pub mod laguerre;
pub mod quadrature;
pub mod tricomi;

pub use bessel::{bessel, bessel_j, BesselKind};
pub use elliptic::{elliptic_k, elliptic_k_complement};
pub use gamma::{digamma, gamma_digamma, ln_gamma, pi_cot_pi, GammaWant, EULER_GAMMA};
pub use kummer::{gamma_u, gamma_u_split, kummer_m, GammaUSplit, KummerEval, TruncationBudget};
pub use laguerre::{laguerre, laguerre_functions, laguerre_sequence};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use tricomi::{tricomi_coefficients, tricomi_m};
