//! Numerics for perturbed spherical Schrödinger operators
//! `H = -d²/dx² + l(l+1)/x² + q(x)` on the half-line.
#![no_std]
// `Float` supplies libm-backed methods; once std is anywhere in the build graph
// (tests, the CLI) its inherent f64 methods take over and the import goes unused
#![allow(unused_imports)]

extern crate alloc;

pub mod error;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub(crate) mod ode;
pub mod potential;
pub mod quad;
pub mod solutions;
pub mod spectral;
pub mod scattering;
pub mod krein;
