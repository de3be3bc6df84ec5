//! Transfer-matrix simulation of periodic arrays of thin polarizable
//! scatterers inside a Fabry–Pérot cavity, with the collective
//! optomechanical quantities derived from it.
//!
//! Lengths are measured in units of the operating wavelength and rates in
//! units of `c/λ`, so the operating wavenumber and the optical angular
//! frequency are both `2π`.

pub mod absorption;
pub mod cavity;
pub mod chebyshev;
pub mod coupling;
pub mod error;
pub mod modes;
pub mod selftest;
pub mod stack;
pub mod table;
pub mod tmm;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Operating wavenumber `2π/λ` with `λ = 1`.
pub const K_OPERATING: f64 = std::f64::consts::TAU;

/// Optical angular frequency `ω_c = 2πc/λ` in code units.
pub const OMEGA_C: f64 = std::f64::consts::TAU;
