//! Computational toolkit for quartic Hecke characters over the Gaussian field.
//!
//! The crate provides exact arithmetic in ℤ[i] (factorization, primary
//! normalization, multiplicative functions), quartic/quadratic residue
//! symbols with two independent evaluation routes, quartic Gauss sums,
//! Hecke characters ν_{q,ω} and their root numbers, central L-values via
//! approximate functional equations, mollified moment experiments over
//! the squarefree family q ≡ 1 (mod λ⁷), and truncated metaplectic
//! Dirichlet series of twisted Gauss sums.
//!
//! Layout follows the pipeline:
//!
//! - [`gaussint`] — ℤ[i] scalars, factorization, enumeration
//! - [`quartic`] — residue symbols and biquadratic reciprocity
//! - [`dd`] — double-double floats for exactly-rational phases
//! - [`gauss_sums`] — g₄/g₂, normalized sums, finite Fourier transforms
//! - [`hecke`] — ξ, ν_{q,ω}, conductors, root numbers
//! - [`analytic`] — V/W kernels, Mellin transforms, Bessel J₀, Poisson checks
//! - [`lvalues`] — B/A sums and central-value records
//! - [`moments`] — sieve decomposition, Euler constants, mollifiers, scans
//! - [`metaplectic`] — ψ_α(r,s,ξ;v) and the coprimality-reduction identities

pub mod analytic;
pub mod cache;
pub mod dd;
pub mod gaussint;
pub mod gauss_sums;
pub mod hecke;
pub mod lvalues;
pub mod metaplectic;
pub mod moments;
pub mod quartic;

pub use gaussint::{Factorization, GaussInt, Unit};
pub use quartic::QuarticValue;
