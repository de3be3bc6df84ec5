//! Weak absorption in the stack and the resulting linewidth broadening.
//!
//! The closed forms here describe a stack with `Re ζ = +|ζ|` at its
//! transmission points `d_l(+|ζ|)`. A stack with `Re ζ = −|ζ|` absorbs the
//! same amount at `d_{N−l}(−|ζ|)`, and the linewidth formulas are written
//! for that sign, so the two are combined through `|ζ|`.

use std::f64::consts::PI;


use crate::cavity::{self, CavityConfig};
use crate::chebyshev;
use crate::coupling;
use crate::error::{invalid, Result};
use crate::stack::{self, StackSpec};
use crate::tmm::{self, Polarizability};
use crate::K_OPERATING;

fn check(n: usize, l: usize, zeta_im: f64) -> Result<()> {
    if n < 2 || l == 0 || l >= n {
        return invalid(format!("need 1 <= l < N, got l = {l}, N = {n}"));
    }
    if !(zeta_im >= 0.0) {
        return invalid("Im ζ must be non-negative");
    }
    Ok(())
}

/// Spacing `d_l(+|ζ|) + half_waves·λ/2` at which the absorption forms apply.
pub fn absorbing_spacing(n: usize, zeta_abs: f64, l: usize, half_waves: u32) -> f64 {
    stack::transmission_point(n, zeta_abs.abs(), l) + 0.5 * half_waves as f64
}

/// First-order single-pass absorption
/// `2 Im ζ sin ν (|ζ| cos ν + sin ν) U'_{N−1}(cos(lπ/N))`, `ν = k d_l`.
/// `U'_{N−1}` alternates in sign between consecutive zeros, so the
/// magnitude is returned.
pub fn al_closed(n: usize, zeta_abs: f64, zeta_im: f64, l: usize) -> Result<f64> {
    check(n, l, zeta_im)?;
    let z = zeta_abs.abs();
    let nu = K_OPERATING * stack::transmission_point(n, z, l);
    let (s, c) = nu.sin_cos();
    let du = chebyshev::u_derivative(n as i64 - 1, (l as f64 * PI / n as f64).cos());
    Ok((2.0 * zeta_im * s * (z * c + s) * du).abs())
}

pub fn a1_closed(n: usize, zeta_abs: f64, zeta_im: f64) -> Result<f64> {
    al_closed(n, zeta_abs, zeta_im, 1)
}

/// Conjectured general form
/// `2N Im ζ/(1−cos(2lπ/N))·[√(1+ζ²) sin(2(acos(cos(lπ/N)/√(1+ζ²)) − atan|ζ|) − atan(1/|ζ|)) + 1]`.
pub fn al_conjectured(n: usize, zeta_abs: f64, zeta_im: f64, l: usize) -> Result<f64> {
    check(n, l, zeta_im)?;
    let z = zeta_abs.abs();
    let root = (1.0 + z * z).sqrt();
    let theta = l as f64 * PI / n as f64;
    let inner = 2.0 * ((theta.cos() / root).acos() - z.atan()) - (1.0 / z).atan();
    Ok(2.0 * n as f64 * zeta_im / (1.0 - (2.0 * theta).cos()) * (root * inner.sin() + 1.0))
}

/// Absorbed fraction `1 − |𝒯|² − |ℛ|²` of the stack from the explicit product.
pub fn absorption_numeric(n: usize, zeta: Polarizability, d: f64) -> Result<f64> {
    let m = tmm::stack_matrix_brute(n, zeta.value(), K_OPERATING, d)?;
    Ok(tmm::optics_from_matrix(&m)?.absorption)
}

/// `κ_eff,abs = κ_eff·(1 + 2A|Z|√(Z²+1))`, with `κ_eff` evaluated for `−|ζ|`.
pub fn kappa_eff_abs(n: usize, zeta_abs: f64, l: usize, d: f64, length: f64, mirror_z: f64, absorption: f64) -> Result<f64> {
    let kappa = coupling::kappa_eff(n, -zeta_abs.abs(), l, d, length, mirror_z)?;
    let z = mirror_z.abs();
    Ok(kappa * (1.0 + 2.0 * absorption * z * (z * z + 1.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionPoint {
    pub l: usize,
    pub spacing: f64,
    pub length: f64,
    pub a_numeric: f64,
    pub a_closed: f64,
    pub a_conjectured: f64,
    pub kappa_eff: f64,
    pub kappa_eff_abs: f64,
    /// Measured half width with the lossless stack.
    pub kappa_lossless: f64,
    /// Measured half width with the absorbing stack.
    pub kappa_absorbing: f64,
}

/// Numeric and closed-form linewidths of the strongly coupled resonance
/// with an absorbing stack of `N` elements at `d_l + half_waves·λ/2`.
pub fn absorption_linewidth(
    n: usize,
    zeta_abs: f64,
    zeta_im: f64,
    l: usize,
    half_waves: u32,
    length: f64,
    mirror_z: f64,
) -> Result<AbsorptionPoint> {
    check(n, l, zeta_im)?;
    let z = zeta_abs.abs();
    let d = absorbing_spacing(n, z, l, half_waves);
    let lossless = StackSpec::new(n, Polarizability::real(z)?, d)?;
    let cfg = CavityConfig::new(length, mirror_z, Some(lossless), 0.0)?;
    let branch = cavity::coupled_branch(&cfg, K_OPERATING)?;
    let (cfg, _) = cavity::tune_length(&cfg, K_OPERATING, branch)?;
    let kappa_lossless = cavity::resonance_and_width(&cfg, K_OPERATING)?.kappa;

    let lossy_zeta = Polarizability::new(z, zeta_im)?;
    let lossy = CavityConfig {
        stack: Some(StackSpec::new(n, lossy_zeta, d)?),
        ..cfg.clone()
    };
    let kappa_absorbing = cavity::resonance_and_width(&lossy, K_OPERATING)?.kappa;

    let a_numeric = absorption_numeric(n, lossy_zeta, d)?;
    let a_closed = al_closed(n, z, zeta_im, l)?;
    Ok(AbsorptionPoint {
        l,
        spacing: d,
        length: cfg.length,
        a_numeric,
        a_closed,
        a_conjectured: al_conjectured(n, z, zeta_im, l)?,
        kappa_eff: coupling::kappa_eff(n, -z, l, d, cfg.length, mirror_z)?,
        kappa_eff_abs: kappa_eff_abs(n, z, l, d, cfg.length, mirror_z, a_closed)?,
        kappa_lossless,
        kappa_absorbing,
    })
}

/// Complex polarizability helper for callers holding the parts separately.
pub fn polarizability(re: f64, im: f64) -> Result<Polarizability> {
    Polarizability::new(re, im)
}
