//! Recovery of the potential of the perturbed Bessel equation
//!
//! ```text
//! −u″ + (ℓ(ℓ+1)/x² + q(x)) u = ρ² u,   x > 0
//! ```
//!
//! from its scattering data (Jost function on the real line, bound states and
//! norming constants). The transmutation kernel is expanded in a
//! Fourier–Jacobi series; Gelfand–Levitan turns the coefficients into a
//! linear system per `x`, and the potential follows from the first
//! coefficient `β₀(x)` alone.
//!
//! Modules, bottom-up:
//! - [`specfun`]: spherical Bessel functions of real order, Jacobi
//!   polynomials, complex log-gamma, terminating ₂F₁.
//! - [`quadrature`]: ρ-grids, the midpoint-shifted trapezoid rule, the
//!   asymptotic constant `F̃_ℓ` and closed-form tail integrals.
//! - [`forward`]: exact scattering data for the square well and Hulthén
//!   benchmarks, noise injection, JSON/CSV serialization.
//! - [`inverse`]: system assembly, scaled solve, condition numbers, β₀
//!   profiles.
//! - [`recover`]: spline differentiation of β₀ into `q(x)` and error reports.

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod inverse;
pub mod quadrature;
pub mod recover;
pub mod specfun;

pub use error::{Error, Result};
