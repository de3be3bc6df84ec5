//! 2×2 transfer matrices for thin scatterers and free propagation.
//!
//! A matrix maps the (backward, forward) field amplitudes on its right-hand
//! side to those on its left-hand side. Lengths are in units of the operating
//! wavelength, so the operating wavenumber is `2π`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::chebyshev;
use crate::error::{invalid, Error, Result};

/// Complex field amplitude.
pub type ComplexAmplitude = Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Polarizability `ζ` of a thin scatterer. The imaginary part encodes
/// absorption and is never negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability(Complex64);

impl Polarizability {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return invalid("polarizability must be finite");
        }
        if im < 0.0 {
            return invalid(format!("Im ζ must be >= 0, got {im}"));
        }
        Ok(Self(Complex64::new(re, im)))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    /// Polarizability of an element with the given intensity reflectivity,
    /// taking the negative branch `ζ = -√(R/(1-R))`.
    pub fn from_reflectivity(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return invalid(format!("reflectivity must lie in [0, 1), got {r}"));
        }
        Self::real(-(r / (1.0 - r)).sqrt())
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn is_lossless(&self) -> bool {
        self.0.im == 0.0
    }

    /// Intensity reflectivity `ζ²/(1+ζ²)` of a single lossless element.
    pub fn single_reflectivity(&self) -> f64 {
        let z = self.0.re;
        z * z / (1.0 + z * z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: ComplexAmplitude,
    pub m12: ComplexAmplitude,
    pub m21: ComplexAmplitude,
    pub m22: ComplexAmplitude,
}

impl TransferMatrix {
    pub const fn new(
        m11: ComplexAmplitude,
        m12: ComplexAmplitude,
        m21: ComplexAmplitude,
        m22: ComplexAmplitude,
    ) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() < 1e-300 {
            return Err(Error::SingularMatrix);
        }
        Ok(Self::new(
            self.m22 / det,
            -self.m12 / det,
            -self.m21 / det,
            self.m11 / det,
        ))
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, o: TransferMatrix) -> TransferMatrix {
        TransferMatrix::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

/// Matrix of a single thin scatterer, `[[1+iζ, iζ], [-iζ, 1-iζ]]`.
pub fn element_matrix(zeta: Complex64) -> TransferMatrix {
    let iz = I * zeta;
    TransferMatrix::new(1.0 + iz, iz, -iz, 1.0 - iz)
}

/// Free propagation over `d`: `diag(e^{ikd}, e^{-ikd})`.
pub fn propagation_matrix(k: f64, d: f64) -> TransferMatrix {
    let phase = Complex64::from_polar(1.0, k * d);
    TransferMatrix::new(
        phase,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        phase.conj(),
    )
}

/// Left-to-right product of the listed matrices.
pub fn matrix_product(ms: &[TransferMatrix]) -> Result<TransferMatrix> {
    let (first, rest) = ms.split_first().ok_or(Error::EmptyProduct)?;
    Ok(rest.iter().fold(*first, |acc, m| acc * *m))
}

/// Unit cell `M_p(d/2)·M_m(ζ)·M_p(d/2)` written out explicitly.
pub fn unit_cell(zeta: Complex64, k: f64, d: f64) -> TransferMatrix {
    let iz = I * zeta;
    let phase = Complex64::from_polar(1.0, k * d);
    TransferMatrix::new((1.0 + iz) * phase, iz, -iz, (1.0 - iz) * phase.conj())
}

/// Explicit product of `n` element matrices interleaved with `n-1`
/// propagation matrices. Accepts lossy elements.
pub fn stack_matrix_brute(n: usize, zeta: Complex64, k: f64, d: f64) -> Result<TransferMatrix> {
    if n == 0 {
        return invalid("stack needs at least one element");
    }
    let element = element_matrix(zeta);
    let gap = propagation_matrix(k, d);
    Ok((1..n).fold(element, |acc, _| acc * gap * element))
}

/// Stack of elements at arbitrary positions `positions[0] < positions[1] < ...`
/// (only the differences matter).
pub fn stack_matrix_positions(zeta: Complex64, k: f64, positions: &[f64]) -> Result<TransferMatrix> {
    let (first, rest) = positions.split_first().ok_or(Error::EmptyProduct)?;
    let element = element_matrix(zeta);
    let mut acc = element;
    let mut last = *first;
    for &p in rest {
        acc = acc * propagation_matrix(k, p - last) * element;
        last = p;
    }
    Ok(acc)
}

/// Collective description of a lossless periodic stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackClosedForm {
    /// Collective polarizability `χ = ζ U_{N-1}(a)`.
    pub chi: f64,
    /// Padding phase `μ`, principal value in `(-π, π]`.
    pub mu: f64,
    /// Chebyshev argument `a = cos(kd) - ζ sin(kd)`.
    pub a: f64,
}

impl StackClosedForm {
    /// The stack as a superelement with padding: `M_p[μ/2k]·M_m(χ)·M_p[μ/2k]`.
    pub fn matrix(&self) -> TransferMatrix {
        let iz = I * self.chi;
        let phase = Complex64::from_polar(1.0, self.mu);
        TransferMatrix::new((1.0 + iz) * phase, iz, -iz, (1.0 - iz) * phase.conj())
    }

    /// Intensity reflectivity `χ²/(1+χ²)` of the stack.
    pub fn reflectivity(&self) -> f64 {
        let chi2 = self.chi * self.chi;
        if chi2.is_infinite() {
            return 1.0;
        }
        chi2 / (1.0 + chi2)
    }
}

/// Superelement parameters for `n` lossless elements (`n = 0` is allowed
/// and describes an empty section with `χ = 0`, `μ = -kd`).
pub fn superelement(n: usize, zeta: f64, k: f64, d: f64) -> StackClosedForm {
    superelement_with(n, zeta, k, d, chebyshev::u)
}

/// As [`superelement`], with a caller-supplied Chebyshev evaluator.
pub fn superelement_with(
    n: usize,
    zeta: f64,
    k: f64,
    d: f64,
    cheb: impl Fn(i64, f64) -> f64,
) -> StackClosedForm {
    let (s, c) = (k * d).sin_cos();
    let a = c - zeta * s;
    let n = n as i64;
    let u1 = cheb(n - 1, a);
    let u2 = cheb(n - 2, a);
    let chi = zeta * u1;
    let num = Complex64::new(1.0, -chi);
    let den = Complex64::new(1.0, -zeta) * u1 - Complex64::from_polar(1.0, k * d) * u2;
    StackClosedForm {
        chi,
        mu: (num / den).arg(),
        a,
    }
}

/// Closed-form matrix of `n` lossless elements (no outer padding).
pub fn stack_matrix_closed(
    n: usize,
    zeta: Complex64,
    k: f64,
    d: f64,
) -> Result<(TransferMatrix, StackClosedForm)> {
    if n == 0 {
        return invalid("stack needs at least one element");
    }
    if zeta.im != 0.0 {
        return Err(Error::LossyClosedForm);
    }
    let form = superelement(n, zeta.re, k, d);
    Ok((form.matrix(), form))
}

/// Complex transmissivity, reflectivity and absorbed fraction of a system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optics {
    pub t: Complex64,
    pub r: Complex64,
    pub absorption: f64,
}

impl Optics {
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }
}

/// Tolerance below zero within which a computed absorption is rounding.
pub const ABSORPTION_ROUNDING: f64 = 1e-10;

/// `𝒯 = 1/m₂₂`, `ℛ = m₁₂/m₂₂`, `A = 1 - |𝒯|² - |ℛ|²`.
pub fn optics_from_matrix(m: &TransferMatrix) -> Result<Optics> {
    if m.m22.norm() < 1e-300 || !m.m22.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let t = 1.0 / m.m22;
    let r = m.m12 / m.m22;
    let mut absorption = 1.0 - t.norm_sqr() - r.norm_sqr();
    if absorption < 0.0 {
        if absorption < -ABSORPTION_ROUNDING {
            return Err(Error::NegativeAbsorption(absorption));
        }
        absorption = 0.0;
    }
    Ok(Optics { t, r, absorption })
}
