//! A stack between two identical thin mirrors: transmission, resonances
//! and linewidths.
//!
//! The cavity matrix is `M_m(Z)·M_p(L/2+x)·M_N·M_p(L/2−x)·M_m(Z)`, where
//! `M_N` is the stack without padding. `L` is therefore the total free
//! propagation length; the mirror separation is `L + (N−1)d`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::stack::StackSpec;
use crate::table::{LinearAxis, SweepTable};
use crate::tmm::{self, TransferMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    /// Free propagation length `L`.
    pub length: f64,
    /// Polarizability `Z` of each end mirror.
    pub mirror_z: f64,
    /// `None` for a bare cavity.
    pub stack: Option<StackSpec>,
    /// Offset `x` of the stack centre from the cavity centre.
    pub displacement: f64,
}

impl CavityConfig {
    pub fn new(length: f64, mirror_z: f64, stack: Option<StackSpec>, displacement: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return invalid(format!("cavity length must be positive, got {length}"));
        }
        if !mirror_z.is_finite() || !displacement.is_finite() {
            return invalid("mirror polarizability and displacement must be finite");
        }
        if displacement.abs() > length / 2.0 {
            return invalid("stack displaced outside the cavity");
        }
        Ok(Self {
            length,
            mirror_z,
            stack,
            displacement,
        })
    }

    pub fn bare(length: f64, mirror_z: f64) -> Result<Self> {
        Self::new(length, mirror_z, None, 0.0)
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(length, self.mirror_z, self.stack, self.displacement)
    }

    pub fn n_elements(&self) -> usize {
        self.stack.map_or(0, |s| s.n_elements)
    }

    /// Distance between the two end mirrors.
    pub fn mirror_separation(&self) -> f64 {
        self.length + self.stack.map_or(0.0, |s| s.extent())
    }

    /// Conditions outside the regime the closed forms are meant for.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(s) = self.stack {
            let size = s.n_elements as f64 * s.spacing;
            if self.length <= 10.0 * size {
                out.push(format!("cavity length {} is not much longer than the stack ({size})", self.length));
            }
        }
        if self.mirror_z.abs() < 1.0 {
            out.push(format!("|Z| = {} is below 1; the finesse formula is inaccurate", self.mirror_z.abs()));
        }
        out
    }
}

/// Mirror polarizability for a given intensity reflectivity, `Z = −√(R/(1−R))`.
pub fn mirror_z_from_reflectivity(r: f64) -> Result<f64> {
    Ok(tmm::Polarizability::from_reflectivity(r)?.re())
}

pub fn cavity_matrix(cfg: &CavityConfig, k: f64) -> Result<TransferMatrix> {
    let mirror = tmm::element_matrix(Complex64::new(cfg.mirror_z, 0.0));
    let inner = match &cfg.stack {
        Some(s) => s.matrix(k)?,
        None => TransferMatrix::identity(),
    };
    let half = cfg.length / 2.0;
    Ok(mirror
        * tmm::propagation_matrix(k, half + cfg.displacement)
        * inner
        * tmm::propagation_matrix(k, half - cfg.displacement)
        * mirror)
}

/// Cavity matrix with element `j` moved by `offsets[j]` from its lattice site.
pub fn cavity_matrix_displaced(cfg: &CavityConfig, k: f64, offsets: &[f64]) -> Result<TransferMatrix> {
    let Some(s) = &cfg.stack else {
        return invalid("displacements need a stack");
    };
    if offsets.len() != s.n_elements {
        return invalid(format!("expected {} offsets, got {}", s.n_elements, offsets.len()));
    }
    let positions: Vec<f64> = offsets
        .iter()
        .enumerate()
        .map(|(j, dx)| j as f64 * s.spacing + dx)
        .collect();
    let inner = tmm::stack_matrix_positions(s.zeta.value(), k, &positions)?;
    let mirror = tmm::element_matrix(Complex64::new(cfg.mirror_z, 0.0));
    let half = cfg.length / 2.0;
    let last = offsets[offsets.len() - 1];
    Ok(mirror
        * tmm::propagation_matrix(k, half + cfg.displacement + offsets[0])
        * inner
        * tmm::propagation_matrix(k, half - cfg.displacement - last)
        * mirror)
}

/// Intensity transmission `|𝒯_cav(k)|²`.
pub fn transmission(cfg: &CavityConfig, k: f64) -> Result<f64> {
    Ok(tmm::optics_from_matrix(&cavity_matrix(cfg, k)?)?.transmittance())
}

pub fn transmission_displaced(cfg: &CavityConfig, k: f64, offsets: &[f64]) -> Result<f64> {
    Ok(tmm::optics_from_matrix(&cavity_matrix_displaced(cfg, k, offsets)?)?.transmittance())
}

/// `𝓕 = π|Z|√(Z²+1)`.
pub fn finesse(z: f64) -> f64 {
    PI * z.abs() * (z * z + 1.0).sqrt()
}

/// `κ = (c/2L)/(|Z|√(Z²+1))`, in units of `c/λ`.
pub fn bare_linewidth(length: f64, z: f64) -> f64 {
    1.0 / (2.0 * length * z.abs() * (z * z + 1.0).sqrt())
}

/// Sign choice in the resonance condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl TryFrom<i64> for Branch {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Branch::Plus),
            -1 => Ok(Branch::Minus),
            other => Err(Error::InvalidBranch(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSolution {
    pub k_res: f64,
    pub branch: Branch,
    /// Length resonant at `k_res` with the actual (finite) mirrors.
    pub length: f64,
    /// Length from the perfect-mirror condition alone.
    pub length_perfect: f64,
    pub mode_index: i64,
}

/// `(χ, μ)` of the stack, or `(0, 0)` for a bare cavity.
fn superelement(cfg: &CavityConfig, k: f64) -> Result<(f64, f64)> {
    match &cfg.stack {
        None => Ok((0.0, 0.0)),
        Some(s) => {
            let f = s.closed_form(k)?;
            Ok((f.chi, f.mu))
        }
    }
}

/// Right-hand side of `e^{ikL} = e^{−iμ}/(1+iχ)·[iχ cos 2kx ± √(1+χ² sin² 2kx)]`.
pub fn resonance_rhs(cfg: &CavityConfig, k: f64, branch: Branch) -> Result<Complex64> {
    let (chi, mu) = superelement(cfg, k)?;
    let (s2, c2) = (2.0 * k * cfg.displacement).sin_cos();
    let root = (1.0 + chi * chi * s2 * s2).sqrt();
    let bracket = Complex64::new(branch.sign() * root, chi * c2);
    Ok(Complex64::from_polar(1.0, -mu) / Complex64::new(1.0, chi) * bracket)
}

/// Reflection phase `arg(−r)` of a mirror with `r = iZ/(1−iZ)`.
pub fn mirror_phase(z: f64) -> f64 {
    let r = Complex64::new(0.0, z) / Complex64::new(1.0, -z);
    (-r).arg()
}

/// Length resonant at wavenumber `k` on the given branch and mode index.
///
/// The perfect-mirror condition gives `L = [arg(RHS) + 2πm]/k`; the finite
/// mirrors add a reflection phase, removed by `L → L − arg(−r)/k`.
pub fn solve_resonance_for_length(cfg: &CavityConfig, k: f64, branch: Branch, mode_index: i64) -> Result<ResonanceSolution> {
    let phase = resonance_rhs(cfg, k, branch)?.arg();
    let length_perfect = (phase + TAU * mode_index as f64) / k;
    let length = length_perfect - mirror_phase(cfg.mirror_z) / k;
    if !(length > 0.0) {
        return invalid(format!("mode index {mode_index} gives non-positive length"));
    }
    Ok(ResonanceSolution {
        k_res: k,
        branch,
        length,
        length_perfect,
        mode_index,
    })
}

/// Resonant length on `branch` closest to `cfg.length`, and the retuned config.
pub fn tune_length(cfg: &CavityConfig, k: f64, branch: Branch) -> Result<(CavityConfig, ResonanceSolution)> {
    let phase = resonance_rhs(cfg, k, branch)?.arg();
    let m = ((k * cfg.length + mirror_phase(cfg.mirror_z) - phase) / TAU).round() as i64;
    let sol = solve_resonance_for_length(cfg, k, branch, m)?;
    Ok((cfg.with_length(sol.length)?, sol))
}

/// `d arg(RHS)/dk` at fixed geometry.
pub fn rhs_phase_slope(cfg: &CavityConfig, k: f64, branch: Branch) -> Result<f64> {
    let h = 1e-7;
    let up = resonance_rhs(cfg, k + h, branch)?;
    let down = resonance_rhs(cfg, k - h, branch)?;
    Ok((up / down).arg() / (2.0 * h))
}

/// The branch whose modes see the longer optical length, i.e. the smaller
/// `d arg(RHS)/dk`. At a transmission point these are the modes that
/// couple strongly to the stack.
pub fn coupled_branch(cfg: &CavityConfig, k: f64) -> Result<Branch> {
    let plus = rhs_phase_slope(cfg, k, Branch::Plus)?;
    let minus = rhs_phase_slope(cfg, k, Branch::Minus)?;
    Ok(if minus < plus { Branch::Minus } else { Branch::Plus })
}

/// Maximizes `f` on `[a, b]` by golden-section search, down to the
/// resolution of the floating-point grid.
pub fn golden_section_max(mut f: impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..400 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        if b - a <= 2.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericResonance {
    pub k_res: f64,
    pub peak_transmission: f64,
}

fn find_peak(f: impl Fn(f64) -> Result<f64>, k_guess: f64, window: f64) -> Result<NumericResonance> {
    if !(window > 0.0) {
        return invalid("search window must be positive");
    }
    let (a, b) = (k_guess - window, k_guess + window);
    let k_res = golden_section_max(&f, a, b)?;
    let peak = f(k_res)?;
    let margin = 1e-6 * window;
    if k_res - a < margin || b - k_res < margin || peak <= f(a)?.max(f(b)?) {
        return Err(Error::BracketFailure(format!(
            "no transmission maximum inside [{a}, {b}]"
        )));
    }
    Ok(NumericResonance {
        k_res,
        peak_transmission: peak,
    })
}

/// Transmission maximum within `k_guess ± window`.
pub fn find_resonance_numeric(cfg: &CavityConfig, k_guess: f64, window: f64) -> Result<NumericResonance> {
    find_peak(|k| transmission(cfg, k), k_guess, window)
}

pub fn find_resonance_displaced(cfg: &CavityConfig, offsets: &[f64], k_guess: f64, window: f64) -> Result<NumericResonance> {
    find_peak(|k| transmission_displaced(cfg, k, offsets), k_guess, window)
}

/// Default search window: an eighth of the free spectral range `π/L`.
pub fn default_window(cfg: &CavityConfig) -> f64 {
    PI / (8.0 * cfg.length)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinewidthEstimate {
    /// Full width at half maximum in `k`, equal to the angular FWHM in `c/λ`.
    pub fwhm: f64,
    /// Half width `fwhm/2`, the quantity the `κ` formulas describe.
    pub kappa: f64,
    pub peak_transmission: f64,
    pub k_res: f64,
}

fn half_crossing(f: &impl Fn(f64) -> Result<f64>, inside: f64, outside: f64, level: f64) -> Result<f64> {
    let (mut a, mut b) = (inside, outside);
    let scale = (outside - inside).abs();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b || (b - a).abs() <= 1e-13 * scale {
            break;
        }
        if f(m)? >= level {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn flank(f: &impl Fn(f64) -> Result<f64>, k_res: f64, level: f64, step0: f64, dir: f64, limit: f64) -> Result<f64> {
    let mut inside = k_res;
    let mut step = step0;
    loop {
        let probe = k_res + dir * step;
        if step > limit {
            return Err(Error::FlankNotBracketed(format!(
                "transmission stays above half maximum within {limit:e} of {k_res}"
            )));
        }
        if f(probe)? < level {
            return half_crossing(f, inside, probe, level);
        }
        inside = probe;
        step *= 2.0;
    }
}

fn measure_width(f: impl Fn(f64) -> Result<f64>, k_res: f64, length: f64, z: f64) -> Result<LinewidthEstimate> {
    let peak = f(k_res)?;
    let level = 0.5 * peak;
    let fsr = PI / length;
    let step0 = bare_linewidth(length, z).min(fsr) / 16.0;
    let hi = flank(&f, k_res, level, step0, 1.0, fsr / 2.0)?;
    let lo = flank(&f, k_res, level, step0, -1.0, fsr / 2.0)?;
    let fwhm = hi - lo;
    Ok(LinewidthEstimate {
        fwhm,
        kappa: fwhm / 2.0,
        peak_transmission: peak,
        k_res,
    })
}

/// Full width at half maximum of the resonance at `k_res`, by bisection on
/// each flank.
pub fn linewidth_fwhm(cfg: &CavityConfig, k_res: f64) -> Result<LinewidthEstimate> {
    measure_width(|k| transmission(cfg, k), k_res, cfg.length, cfg.mirror_z)
}

/// How the stack moves along the displacement axis of a map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapAxis {
    /// All elements move together.
    CenterOfMass,
    /// Element `j` moves by `X·s_j` for amplitude `X`.
    Profile(Vec<f64>),
}

impl MapAxis {
    fn weights(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            MapAxis::CenterOfMass => Ok(vec![1.0; n]),
            MapAxis::Profile(w) if w.len() == n => Ok(w.clone()),
            MapAxis::Profile(w) => invalid(format!("profile has {} entries for {n} elements", w.len())),
        }
    }
}

/// Transmission over a grid of displacement amplitude and wavenumber.
///
/// Columns `q, k, T`. The emitted coordinate is `q = X·‖s‖`, i.e. `X√N`
/// for centre-of-mass motion, so the slope of a fringe `dk/dq` reads as the
/// coupling of the normalized collective coordinate. Rows are ordered with
/// `X` outermost.
pub fn transmission_map(cfg: &CavityConfig, axis: &MapAxis, amplitude: LinearAxis, wavenumber: LinearAxis) -> Result<SweepTable> {
    let n = cfg.n_elements();
    let (weights, norm) = if n == 0 {
        (Vec::new(), 1.0)
    } else {
        let w = axis.weights(n)?;
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroProfile);
        }
        (w, norm)
    };
    let total = amplitude.samples * wavenumber.samples;
    let rows: Result<Vec<Vec<f64>>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x = amplitude.value(idx / wavenumber.samples);
            let k = wavenumber.value(idx % wavenumber.samples);
            let t = if n == 0 {
                transmission(cfg, k)?
            } else {
                let offsets: Vec<f64> = weights.iter().map(|w| w * x).collect();
                transmission_displaced(cfg, k, &offsets)?
            };
            Ok(vec![x * norm, k, t])
        })
        .collect();
    let mut table = SweepTable::new(["q", "k", "T"]);
    table.rows = rows?;
    Ok(table)
}

/// Resonance and linewidth of a cavity with an absorbing or otherwise
/// arbitrary stack, near `k_guess`.
pub fn resonance_and_width(cfg: &CavityConfig, k_guess: f64) -> Result<LinewidthEstimate> {
    let res = find_resonance_numeric(cfg, k_guess, default_window(cfg))?;
    linewidth_fwhm(cfg, res.k_res)
}
