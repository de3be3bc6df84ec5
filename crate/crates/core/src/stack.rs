//! Periodic stacks: transmission points, the reflectivity maximum and
//! optical scans versus spacing.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::chebyshev;
use crate::error::{invalid, Error, Result};
use crate::table::SweepTable;
use crate::tmm::{self, Optics, Polarizability, StackClosedForm, TransferMatrix};

/// Reflectance below which a stack counts as transmissive.
pub const TRANSMISSIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackSpec {
    pub n_elements: usize,
    pub zeta: Polarizability,
    pub spacing: f64,
}

impl StackSpec {
    pub fn new(n_elements: usize, zeta: Polarizability, spacing: f64) -> Result<Self> {
        if n_elements == 0 {
            return invalid("a stack needs at least one element");
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return invalid(format!("spacing must be positive, got {spacing}"));
        }
        Ok(Self {
            n_elements,
            zeta,
            spacing,
        })
    }

    /// Stack at the canonical transmission point `d_l` shifted by
    /// `half_waves` half wavelengths.
    pub fn at_transmission_point(n: usize, zeta: Polarizability, l: usize, half_waves: u32) -> Result<Self> {
        check_order(n, l)?;
        let d = transmission_point(n, zeta.re(), l) + 0.5 * half_waves as f64;
        Self::new(n, zeta, d)
    }

    /// Stack at the reflectivity maximum `d_0` shifted by `half_waves`.
    pub fn at_reflectivity_maximum(n: usize, zeta: Polarizability, half_waves: u32) -> Result<Self> {
        Self::new(n, zeta, reflectivity_maximum(zeta.re()) + 0.5 * half_waves as f64)
    }

    pub fn with_spacing(&self, spacing: f64) -> Result<Self> {
        Self::new(self.n_elements, self.zeta, spacing)
    }

    /// Physical extent from the first to the last element.
    pub fn extent(&self) -> f64 {
        (self.n_elements - 1) as f64 * self.spacing
    }

    /// Stack matrix: closed form when lossless, explicit product otherwise.
    pub fn matrix(&self, k: f64) -> Result<TransferMatrix> {
        if self.zeta.is_lossless() {
            Ok(self.closed_form(k)?.matrix())
        } else {
            tmm::stack_matrix_brute(self.n_elements, self.zeta.value(), k, self.spacing)
        }
    }

    pub fn closed_form(&self, k: f64) -> Result<StackClosedForm> {
        Ok(tmm::stack_matrix_closed(self.n_elements, self.zeta.value(), k, self.spacing)?.1)
    }

    pub fn optics(&self, k: f64) -> Result<Optics> {
        tmm::optics_from_matrix(&self.matrix(k)?)
    }
}

fn check_order(n: usize, l: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::NoTransmissionPoints);
    }
    if l == 0 || l >= n {
        return invalid(format!("transmission index must lie in 1..={}, got {l}", n - 1));
    }
    Ok(())
}

/// Reduces a spacing to its representative in `(0, λ/2]`.
pub fn canonical_spacing(d: f64) -> f64 {
    let r = d.rem_euclid(0.5);
    if r == 0.0 {
        0.5
    } else {
        r
    }
}

/// `d_l = (1/k){acos[cos(lπ/N)/√(1+ζ²)] − atan ζ}` reduced to `(0, λ/2]`.
pub fn transmission_point(n: usize, zeta: f64, l: usize) -> f64 {
    let c = (l as f64 * PI / n as f64).cos();
    let kd = (c / (1.0 + zeta * zeta).sqrt()).acos() - zeta.atan();
    canonical_spacing(kd / crate::K_OPERATING)
}

/// `d_0` with `kd_0 = −atan ζ`, reduced to `(0, λ/2]`.
pub fn reflectivity_maximum(zeta: f64) -> f64 {
    canonical_spacing(-zeta.atan() / crate::K_OPERATING)
}

/// Collective polarizability at the reflectivity maximum,
/// `χ_0 = ζ U_{N−1}(√(1+ζ²))`.
pub fn chi_at_maximum(n: usize, zeta: f64) -> f64 {
    zeta * chebyshev::u(n as i64 - 1, (1.0 + zeta * zeta).sqrt())
}

/// Reflectance `χ_0²/(1+χ_0²)` at the reflectivity maximum.
pub fn maximum_reflectance(n: usize, zeta: f64) -> f64 {
    let chi2 = chi_at_maximum(n, zeta).powi(2);
    if chi2.is_infinite() {
        return 1.0;
    }
    chi2 / (1.0 + chi2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionPointSet {
    /// `d_1 … d_{N−1}` in order of `l`.
    pub points: Vec<f64>,
    /// `d_0`.
    pub reflect_max: f64,
}

impl TransmissionPointSet {
    pub fn point(&self, l: usize) -> Option<f64> {
        l.checked_sub(1).and_then(|i| self.points.get(i).copied())
    }
}

/// All transmission points of a lossless stack, each certified by an
/// explicit matrix product.
pub fn transmission_points(spec: &StackSpec) -> Result<TransmissionPointSet> {
    let n = spec.n_elements;
    if n < 2 {
        return Err(Error::NoTransmissionPoints);
    }
    if !spec.zeta.is_lossless() {
        return invalid("transmission points are defined for real polarizability");
    }
    let zeta = spec.zeta.re();
    let k = crate::K_OPERATING;
    let mut points = Vec::with_capacity(n - 1);
    for l in 1..n {
        let d = transmission_point(n, zeta, l);
        let m = tmm::stack_matrix_brute(n, spec.zeta.value(), k, d)?;
        let r = tmm::optics_from_matrix(&m)?.reflectance();
        if r >= TRANSMISSIVE_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "stack not transmissive at d_{l} = {d}: |R|^2 = {r:e}"
            )));
        }
        points.push(d);
    }
    Ok(TransmissionPointSet {
        points,
        reflect_max: reflectivity_maximum(zeta),
    })
}

/// Uniform scan of stack optics over `d ∈ [d_start, d_stop]`.
///
/// Columns: `d`, `R`, `T`, `A`. Rows are evaluated in parallel and returned
/// in ascending `d`.
pub fn scan_spacing(spec: &StackSpec, d_start: f64, d_stop: f64, n_samples: usize) -> Result<SweepTable> {
    if n_samples < 2 {
        return invalid("a scan needs at least two samples");
    }
    if !(d_start.is_finite() && d_stop.is_finite() && d_start > 0.0 && d_stop > d_start) {
        return invalid(format!("invalid spacing range [{d_start}, {d_stop}]"));
    }
    let k = crate::K_OPERATING;
    let step = (d_stop - d_start) / (n_samples - 1) as f64;
    let rows: Result<Vec<Vec<f64>>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let d = d_start + step * i as f64;
            let o = spec.with_spacing(d)?.optics(k)?;
            Ok(vec![d, o.reflectance(), o.transmittance(), o.absorption])
        })
        .collect();
    let mut table = SweepTable::new(["d", "R", "T", "A"]);
    table.rows = rows?;
    Ok(table)
}
