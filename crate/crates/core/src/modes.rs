//! Collective mechanical modes.
//!
//! `N` identical damped oscillators driven through weights `g̃_j g_sin F(t)`
//! project onto a single oscillator `b = Σ g̃_j b_j` obeying
//! `db/dt = −(iω_m+Γ)b + g_sin F(t)`. Both sides are integrated here with
//! the classical fourth-order Runge–Kutta scheme so the reduction can be
//! checked directly.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::table::SweepTable;

/// Unit-norm real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    weights: Vec<f64>,
}

impl ModeVector {
    pub fn new(profile: &[f64]) -> Result<Self> {
        if profile.iter().any(|v| !v.is_finite()) {
            return invalid("profile entries must be finite");
        }
        let norm = profile.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroProfile);
        }
        Ok(Self {
            weights: profile.iter().map(|v| v / norm).collect(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ_j g̃_j b_j`.
    pub fn project(&self, amplitudes: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(amplitudes).map(|(w, b)| b * *w).sum()
    }
}

/// Orthonormal basis whose first vector is `mode`, completed by
/// Gram–Schmidt over the unit vectors.
pub fn orthonormal_basis(mode: &ModeVector) -> Vec<Vec<f64>> {
    let n = mode.len();
    let mut basis = vec![mode.weights.clone()];
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        // Two passes keep the result orthogonal to rounding accuracy.
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Amplitudes expressed in `basis`.
pub fn rotate(basis: &[Vec<f64>], amplitudes: &[Complex64]) -> Vec<Complex64> {
    basis
        .iter()
        .map(|row| row.iter().zip(amplitudes).map(|(w, b)| b * *w).sum())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub omega_m: f64,
    pub gamma: f64,
}

impl Oscillator {
    pub fn new(omega_m: f64, gamma: f64) -> Result<Self> {
        if !(omega_m > 0.0 && omega_m.is_finite() && gamma >= 0.0 && gamma.is_finite()) {
            return invalid("need omega_m > 0 and gamma >= 0");
        }
        Ok(Self { omega_m, gamma })
    }

    /// Largest accepted step, `0.01/max(ω_m, Γ)`.
    pub fn max_step(&self) -> f64 {
        0.01 / self.omega_m.max(self.gamma)
    }

    fn rate(&self) -> Complex64 {
        Complex64::new(-self.gamma, -self.omega_m)
    }
}

/// Fixed-step integration settings. Every `stride`-th step is recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integration {
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
}

impl Integration {
    pub fn new(dt: f64, duration: f64, stride: usize) -> Result<Self> {
        if !(dt > 0.0 && duration >= 0.0 && dt.is_finite() && duration.is_finite()) {
            return invalid("need dt > 0 and duration >= 0");
        }
        Ok(Self {
            dt,
            steps: (duration / dt).round() as usize,
            stride: stride.max(1),
        })
    }

    fn check(&self, osc: &Oscillator) -> Result<()> {
        let limit = osc.max_step();
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::UnstableStep { dt: self.dt, limit });
        }
        Ok(())
    }
}

/// Integrates `db_j/dt = −(iω_m+Γ)b_j + w_j F(t)` for all `j`.
/// Returns the recorded times and amplitudes.
pub fn evolve_driven(
    osc: &Oscillator,
    initial: &[Complex64],
    drive_weights: &[f64],
    drive: &dyn Fn(f64) -> f64,
    integ: &Integration,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    integ.check(osc)?;
    if initial.len() != drive_weights.len() {
        return invalid("initial state and drive weights differ in length");
    }
    let rate = osc.rate();
    let dt = integ.dt;
    let deriv = |b: &[Complex64], f: f64| -> Vec<Complex64> {
        b.iter().zip(drive_weights).map(|(b, w)| rate * b + w * f).collect()
    };
    let axpy = |b: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
        b.iter().zip(k).map(|(b, k)| b + k * h).collect()
    };
    let mut b = initial.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![b.clone()];
    for step in 0..integ.steps {
        let t = step as f64 * dt;
        let (f0, fh, f1) = (drive(t), drive(t + 0.5 * dt), drive(t + dt));
        let k1 = deriv(&b, f0);
        let k2 = deriv(&axpy(&b, &k1, 0.5 * dt), fh);
        let k3 = deriv(&axpy(&b, &k2, 0.5 * dt), fh);
        let k4 = deriv(&axpy(&b, &k3, dt), f1);
        for i in 0..b.len() {
            b[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        if (step + 1) % integ.stride == 0 || step + 1 == integ.steps {
            times.push((step + 1) as f64 * dt);
            states.push(b.clone());
        }
    }
    if states.iter().flatten().any(|z| !z.is_finite()) {
        return invalid("trajectory diverged");
    }
    Ok((times, states))
}

/// Integrates the single collective oscillator `db/dt = −(iω_m+Γ)b + g F(t)`.
pub fn evolve_collective(
    osc: &Oscillator,
    b0: Complex64,
    g: f64,
    drive: &dyn Fn(f64) -> f64,
    integ: &Integration,
) -> Result<Vec<Complex64>> {
    let (_, states) = evolve_driven(osc, &[b0], &[g], drive, integ)?;
    Ok(states.into_iter().map(|s| s[0]).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub ensemble: Vec<Vec<Complex64>>,
    /// `Σ g̃_j b_j(t)` from the ensemble.
    pub projected: Vec<Complex64>,
    /// Independent integration of the collective equation.
    pub collective: Vec<Complex64>,
}

impl Trajectory {
    /// Largest `|projected − collective|` relative to the largest collective amplitude.
    pub fn max_relative_deviation(&self) -> f64 {
        let scale = self.collective.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dev = self
            .projected
            .iter()
            .zip(&self.collective)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            dev / scale
        } else {
            dev
        }
    }

    /// Columns `t, re_b1, im_b1, …, re_coll, im_coll`.
    pub fn to_table(&self) -> SweepTable {
        let n = self.ensemble.first().map_or(0, Vec::len);
        let mut cols = vec!["t".to_string()];
        for j in 1..=n {
            cols.push(format!("re_b{j}"));
            cols.push(format!("im_b{j}"));
        }
        cols.push("re_coll".into());
        cols.push("im_coll".into());
        let mut table = SweepTable::new(cols);
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![*t];
            for b in &self.ensemble[i] {
                row.push(b.re);
                row.push(b.im);
            }
            row.push(self.collective[i].re);
            row.push(self.collective[i].im);
            table.push_row(row).expect("row width matches header");
        }
        table
    }
}

/// Evolves the ensemble driven through `mode` with coupling `g_sin`, and
/// the collective oscillator started from the projected initial state.
pub fn evolve_ensemble(
    osc: &Oscillator,
    initial: &[Complex64],
    mode: &ModeVector,
    g_sin: f64,
    drive: &dyn Fn(f64) -> f64,
    integ: &Integration,
) -> Result<Trajectory> {
    if initial.len() != mode.len() {
        return invalid("initial state and mode vector differ in length");
    }
    let weights: Vec<f64> = mode.weights().iter().map(|w| w * g_sin).collect();
    let (times, ensemble) = evolve_driven(osc, initial, &weights, drive, integ)?;
    let collective = evolve_collective(osc, mode.project(initial), g_sin, drive, integ)?;
    let projected = ensemble.iter().map(|b| mode.project(b)).collect();
    Ok(Trajectory {
        times,
        ensemble,
        projected,
        collective,
    })
}
