//! Optomechanical coupling strengths of a stack in a cavity.
//!
//! Couplings are mostly expressed as ratios to the yardstick
//! `g = 2ω_c x_zpt/L` of a perfect mirror at the cavity centre; the
//! `_over_g` suffix marks such ratios.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cavity::{self, Branch, CavityConfig, ResonanceSolution};
use crate::error::{invalid, Error, Result};
use crate::stack::{self, StackSpec};
use crate::table::SweepTable;
use crate::tmm::{self, Polarizability};
use crate::K_OPERATING;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalSpec {
    pub omega_m: f64,
    pub gamma: f64,
    pub x_zpt: f64,
}

impl MechanicalSpec {
    pub fn new(omega_m: f64, gamma: f64, x_zpt: f64) -> Result<Self> {
        for (name, v) in [("omega_m", omega_m), ("gamma", gamma), ("x_zpt", x_zpt)] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(Self { omega_m, gamma, x_zpt })
    }
}

/// `g = 2ω_c x_zpt/L`.
pub fn yardstick_g(omega_c: f64, x_zpt: f64, length: f64) -> f64 {
    2.0 * omega_c * x_zpt / length
}

/// Centre-of-mass coupling `√(ℛ/N)` at the reflectivity maximum.
pub fn g_com_over_g(n: usize, zeta: f64) -> f64 {
    (stack::maximum_reflectance(n, zeta) / n as f64).sqrt()
}

/// Coupling of one element at its best position, `|r| = |ζ|/√(1+ζ²)`.
pub fn single_element_over_g(zeta: f64) -> f64 {
    zeta.abs() / (1.0 + zeta * zeta).sqrt()
}

fn check_l(n: usize, l: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::NoTransmissionPoints);
    }
    if l == 0 || l >= n {
        return invalid(format!("l must lie in 1..={}, got {l}", n - 1));
    }
    Ok(())
}

/// `𝒩_{N,l}`: `√N` when `N = 2l`, otherwise `√(N/2)`.
pub fn normalization_factor(n: usize, l: usize) -> Result<f64> {
    check_l(n, l)?;
    Ok(if n == 2 * l { (n as f64).sqrt() } else { (n as f64 / 2.0).sqrt() })
}

/// `sin(2lπ(j−½)/N)` for `j = 1..=N`.
pub fn sinusoid_profile(n: usize, l: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| (2.0 * PI * l as f64 * (j as f64 - 0.5) / n as f64).sin())
        .collect()
}

/// `2Ndζ csc²(lπ/N) √(sin²(lπ/N)+ζ²)`, the stack's addition to the length
/// with the sign that makes it positive for `ζ < 0`.
fn length_excess(n: usize, zeta: f64, l: usize, d: f64) -> f64 {
    let s = (l as f64 * PI / n as f64).sin();
    -2.0 * n as f64 * d * zeta / (s * s) * (s * s + zeta * zeta).sqrt()
}

/// `L_eff = L − 2Ndζ csc²(lπ/N) √(sin²(lπ/N)+ζ²)`.
pub fn effective_length(n: usize, zeta: f64, l: usize, d: f64, length: f64) -> Result<f64> {
    check_l(n, l)?;
    Ok(length + length_excess(n, zeta, l, d))
}

/// `κ_eff = (c/2L_eff)/(|Z|√(Z²+1))`.
pub fn kappa_eff(n: usize, zeta: f64, l: usize, d: f64, length: f64, mirror_z: f64) -> Result<f64> {
    Ok(cavity::bare_linewidth(effective_length(n, zeta, l, d, length)?, mirror_z))
}

/// Collective coupling of the `l`-th sinusoidal mode,
/// `−𝒩 ζ csc(lπ/N)[√(sin²(lπ/N)+ζ²) − ζ] / (1 + excess/L)`.
pub fn g_sin_over_g(n: usize, zeta: f64, l: usize, d: f64, length: f64) -> Result<f64> {
    let norm = normalization_factor(n, l)?;
    let s = (l as f64 * PI / n as f64).sin();
    let numer = -norm * zeta / s * ((s * s + zeta * zeta).sqrt() - zeta);
    Ok(numer / (1.0 + length_excess(n, zeta, l, d) / length))
}

/// Rate-valued form of [`g_sin_over_g`].
pub fn g_sin_analytic(n: usize, zeta: f64, l: usize, d: f64, length: f64, g: f64) -> Result<f64> {
    Ok(g * g_sin_over_g(n, zeta, l, d, length)?)
}

/// Large-`N` form `(√2/π) ζ² N^{3/2}` of the `l = 1` coupling with `L_eff ≈ L`.
pub fn g_sin_large_n_over_g(n: usize, zeta: f64) -> f64 {
    2f64.sqrt() / PI * zeta * zeta * (n as f64).powf(1.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticProfile {
    /// Unit-norm weights `g̃_j`.
    pub normalized: Vec<f64>,
    /// `sin(2lπ(j−½)/N)`.
    pub shape: Vec<f64>,
    /// `g_j/g = g_sin/g · g̃_j`.
    pub couplings_over_g: Vec<f64>,
}

pub fn coupling_profile_analytic(n: usize, zeta: f64, l: usize, d: f64, length: f64) -> Result<AnalyticProfile> {
    let g_sin = g_sin_over_g(n, zeta, l, d, length)?;
    let shape = sinusoid_profile(n, l);
    let norm = shape.iter().map(|v| v * v).sum::<f64>().sqrt();
    let normalized: Vec<f64> = shape.iter().map(|v| v / norm).collect();
    let couplings_over_g = normalized.iter().map(|v| g_sin * v).collect();
    Ok(AnalyticProfile {
        normalized,
        shape,
        couplings_over_g,
    })
}

/// First-order increments `(α, β)` of the cavity round trip when element
/// `j` (1-based) moves, from the superelements of the `j−1` elements to its
/// left and the `N−j` to its right.
pub fn element_increment(n: usize, zeta: f64, j: usize, k: f64, d: f64) -> Result<(Complex64, Complex64)> {
    if j == 0 || j > n {
        return invalid(format!("element index must lie in 1..={n}, got {j}"));
    }
    let left = tmm::superelement(j - 1, zeta, k, d);
    let right = tmm::superelement(n - j, zeta, k, d);
    let i = Complex64::i();
    let (c1, c2) = (left.chi, right.chi);
    let e1 = Complex64::from_polar(1.0, left.mu);
    let e2 = Complex64::from_polar(1.0, right.mu);
    let alpha = 2.0 * i * k * zeta * (e1 * (1.0 + i * c1) * c2 - e2 * c1 * (1.0 + i * c2));
    let beta = 2.0 * k * zeta * (c1 * c2 - (1.0 + i * c1) * (1.0 - i * c2) * Complex64::from_polar(1.0, left.mu - right.mu));
    Ok((alpha, beta))
}

/// `Im{β + e^{−iμ}α}` for every element. Proportional to the sinusoidal
/// profile at a transmission point.
pub fn increment_shape(n: usize, zeta: f64, k: f64, d: f64) -> Result<Vec<f64>> {
    let mu = tmm::superelement(n, zeta, k, d).mu;
    (1..=n)
        .map(|j| {
            let (a, b) = element_increment(n, zeta, j, k, d)?;
            Ok((b + Complex64::from_polar(1.0, -mu) * a).im)
        })
        .collect()
}

/// Finite-difference step for numeric couplings.
pub const DEFAULT_DELTA_X: f64 = 1e-6;

/// Largest accepted change of the numeric profile when the step is halved,
/// relative to its norm.
pub const RICHARDSON_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericProfile {
    /// `g_j/g = −(dk/dδx_j)·L/(2k)`.
    pub couplings_over_g: Vec<f64>,
    pub k_res: f64,
    /// Largest change on halving the step, relative to the profile norm.
    pub step_sensitivity: f64,
}

impl NumericProfile {
    pub fn norm(&self) -> f64 {
        self.couplings_over_g.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn gradients(cfg: &CavityConfig, k_res: f64, h: f64) -> Result<Vec<f64>> {
    let n = cfg.n_elements();
    let window = PI / (20.0 * cfg.length);
    (0..n)
        .into_par_iter()
        .map(|j| {
            let mut offsets = vec![0.0; n];
            offsets[j] = h;
            let up = cavity::find_resonance_displaced(cfg, &offsets, k_res, window)?.k_res;
            offsets[j] = -h;
            let down = cavity::find_resonance_displaced(cfg, &offsets, k_res, window)?.k_res;
            Ok(-(up - down) / (2.0 * h) * cfg.length / (2.0 * k_res))
        })
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| match e {
            Error::BracketFailure(msg) => Error::ResonanceTracking(msg),
            other => other,
        })
}

/// Per-element couplings from central differences of the numerically found
/// resonance. `cfg` must be tuned so that a resonance lies near `k = 2π`.
pub fn coupling_profile_numeric(cfg: &CavityConfig, delta_x: f64) -> Result<NumericProfile> {
    if !(delta_x > 0.0 && delta_x <= 1e-5) {
        return invalid(format!("delta_x must lie in (0, 1e-5], got {delta_x}"));
    }
    if cfg.stack.is_none() {
        return invalid("coupling profile needs a stack");
    }
    let k_res = cavity::find_resonance_numeric(cfg, K_OPERATING, cavity::default_window(cfg))
        .map_err(|e| Error::ResonanceTracking(e.to_string()))?
        .k_res;
    let full = gradients(cfg, k_res, delta_x)?;
    let half = gradients(cfg, k_res, delta_x / 2.0)?;
    let norm = full.iter().map(|v| v * v).sum::<f64>().sqrt();
    let change = full
        .iter()
        .zip(&half)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let step_sensitivity = if norm > 0.0 { change / norm } else { change };
    if step_sensitivity > RICHARDSON_TOLERANCE {
        return Err(Error::ResonanceTracking(format!(
            "finite differences not converged: relative change {step_sensitivity:e} on halving the step"
        )));
    }
    Ok(NumericProfile {
        couplings_over_g: full,
        k_res,
        step_sensitivity,
    })
}

/// Cavity around a lossless stack at `d_l + half_waves·λ/2`, tuned to the
/// strongly coupled resonance nearest `length`.
pub fn transmissive_cavity(
    n: usize,
    zeta: f64,
    l: usize,
    half_waves: u32,
    length: f64,
    mirror_z: f64,
) -> Result<(CavityConfig, ResonanceSolution)> {
    let spec = StackSpec::at_transmission_point(n, Polarizability::real(zeta)?, l, half_waves)?;
    let cfg = CavityConfig::new(length, mirror_z, Some(spec), 0.0)?;
    let branch: Branch = cavity::coupled_branch(&cfg, K_OPERATING)?;
    cavity::tune_length(&cfg, K_OPERATING, branch)
}

/// Spacing `d_l + half_waves·λ/2`.
pub fn spacing_at(n: usize, zeta: f64, l: usize, half_waves: u32) -> Result<f64> {
    check_l(n, l)?;
    Ok(stack::transmission_point(n, zeta, l) + 0.5 * half_waves as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub n_opt: usize,
    pub g_opt_over_g: f64,
    /// Spacing at the optimum.
    pub spacing: f64,
    /// `½√(L/d)|ζ|` at that spacing.
    pub closed_form_over_g: f64,
}

/// `g_opt = ½ g √(L/d) |ζ|`.
pub fn g_opt_closed_over_g(zeta: f64, d: f64, length: f64) -> f64 {
    0.5 * (length / d).sqrt() * zeta.abs()
}

pub const DEFAULT_N_MAX: usize = 10_000;

/// Exhaustive search of `2 ≤ N ≤ n_max` for the largest `g_sin^(l)`, with
/// the stack at `d_l(N) + half_waves·λ/2`. Ties go to the smaller `N`.
pub fn optimize_over_n(zeta: f64, l: usize, half_waves: u32, length: f64, n_max: usize) -> Result<Optimum> {
    if n_max < 2 {
        return invalid(format!("n_max must be at least 2, got {n_max}"));
    }
    if n_max <= l {
        return invalid(format!("n_max must exceed l = {l}"));
    }
    let values: Vec<(usize, f64, f64)> = (l + 1..=n_max)
        .into_par_iter()
        .map(|n| {
            let d = spacing_at(n, zeta, l, half_waves)?;
            Ok((n, g_sin_over_g(n, zeta, l, d, length)?, d))
        })
        .collect::<Result<_>>()?;
    let (n_opt, g, d) = values
        .into_iter()
        .fold((0, f64::NEG_INFINITY, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(Optimum {
        n_opt,
        g_opt_over_g: g,
        spacing: d,
        closed_form_over_g: g_opt_closed_over_g(zeta, d, length),
    })
}

/// `C = g²/(κΓ)`.
pub fn cooperativity(g: f64, kappa: f64, gamma: f64) -> f64 {
    g * g / (kappa * gamma)
}

/// Cooperativity relative to a single element in the same cavity:
/// `(g_sin/g_single)²·(κ_c/κ_eff)`.
pub fn normalized_cooperativity(g_sin: f64, g_single: f64, kappa_c: f64, kappa_eff: f64) -> f64 {
    (g_sin / g_single).powi(2) * kappa_c / kappa_eff
}

/// Closed-form normalized cooperativity, `(g_sin/g_single)²·L_eff/L`.
pub fn normalized_cooperativity_analytic(n: usize, zeta: f64, l: usize, d: f64, length: f64) -> Result<f64> {
    let g_sin = g_sin_over_g(n, zeta, l, d, length)?;
    let l_eff = effective_length(n, zeta, l, d, length)?;
    Ok((g_sin / single_element_over_g(zeta)).powi(2) * l_eff / length)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoupling {
    pub l: usize,
    pub spacing: f64,
    pub norm_factor: f64,
    pub g_sin: f64,
    pub l_eff: f64,
    pub kappa_eff: f64,
    pub cooperativity_norm: f64,
    /// `g_j^(l)` in rate units.
    pub profile: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub n_elements: usize,
    pub zeta: f64,
    pub half_waves: u32,
    pub length: f64,
    pub mirror_z: f64,
    pub g_yardstick: f64,
    pub g_com: f64,
    pub kappa_c: f64,
    pub modes: Vec<ModeCoupling>,
}

impl CouplingReport {
    /// Closed-form report for every transmission point of an `N`-element stack.
    pub fn analytic(n: usize, zeta: f64, half_waves: u32, length: f64, mirror_z: f64, mech: &MechanicalSpec) -> Result<Self> {
        if n < 2 {
            return Err(Error::NoTransmissionPoints);
        }
        Polarizability::real(zeta)?;
        let g = yardstick_g(crate::OMEGA_C, mech.x_zpt, length);
        let kappa_c = cavity::bare_linewidth(length, mirror_z);
        let g_single = g * single_element_over_g(zeta);
        let modes = (1..n)
            .map(|l| {
                let d = spacing_at(n, zeta, l, half_waves)?;
                let g_sin = g_sin_analytic(n, zeta, l, d, length, g)?;
                let kappa = kappa_eff(n, zeta, l, d, length, mirror_z)?;
                let profile = coupling_profile_analytic(n, zeta, l, d, length)?
                    .couplings_over_g
                    .into_iter()
                    .map(|v| v * g)
                    .collect();
                Ok(ModeCoupling {
                    l,
                    spacing: d,
                    norm_factor: normalization_factor(n, l)?,
                    g_sin,
                    l_eff: effective_length(n, zeta, l, d, length)?,
                    kappa_eff: kappa,
                    cooperativity_norm: normalized_cooperativity(g_sin, g_single, kappa_c, kappa),
                    profile,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_elements: n,
            zeta,
            half_waves,
            length,
            mirror_z,
            g_yardstick: g,
            g_com: g * g_com_over_g(n, zeta),
            kappa_c,
            modes,
        })
    }

    /// One row per `l`.
    pub fn to_table(&self) -> SweepTable {
        let mut cols: Vec<String> = [
            "l", "d", "norm_factor", "g_sin", "g_sin_over_g", "L_eff", "kappa_eff", "C_norm",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        cols.extend((1..=self.n_elements).map(|j| format!("g_{j}")));
        let mut table = SweepTable::new(cols);
        for m in &self.modes {
            let mut row = vec![
                m.l as f64,
                m.spacing,
                m.norm_factor,
                m.g_sin,
                m.g_sin / self.g_yardstick,
                m.l_eff,
                m.kappa_eff,
                m.cooperativity_norm,
            ];
            row.extend(&m.profile);
            table.push_row(row).expect("row width matches header");
        }
        table
    }

    /// Flat `key=value` summary.
    pub fn to_summary(&self) -> String {
        use crate::table::format_value as f;
        let mut out = String::new();
        let mut kv = |k: String, v: String| {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("n_elements".into(), self.n_elements.to_string());
        kv("zeta".into(), f(self.zeta));
        kv("half_waves".into(), self.half_waves.to_string());
        kv("length".into(), f(self.length));
        kv("mirror_z".into(), f(self.mirror_z));
        kv("g_yardstick".into(), f(self.g_yardstick));
        kv("g_com".into(), f(self.g_com));
        kv("kappa_c".into(), f(self.kappa_c));
        for m in &self.modes {
            let l = m.l;
            kv(format!("d.{l}"), f(m.spacing));
            kv(format!("norm_factor.{l}"), f(m.norm_factor));
            kv(format!("g_sin.{l}"), f(m.g_sin));
            kv(format!("L_eff.{l}"), f(m.l_eff));
            kv(format!("kappa_eff.{l}"), f(m.kappa_eff));
            kv(format!("C_norm.{l}"), f(m.cooperativity_norm));
        }
        out
    }
}
