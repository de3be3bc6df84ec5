//! The sweep commands. Each one reads and validates all of its parameters,
//! rejects unknown keys, then computes a table.

use rayon::prelude::*;

use optoarray::absorption;
use optoarray::cavity::{self, Branch, CavityConfig, MapAxis};
use optoarray::coupling::{self, CouplingReport, MechanicalSpec};
use optoarray::selftest::{self, CheckResult, Fault};
use optoarray::stack::{self, StackSpec};
use optoarray::table::{LinearAxis, SweepTable};
use optoarray::tmm::Polarizability;
use optoarray::{Error, K_OPERATING};

use crate::config::{Config, ConfigError, ConfigResult};

/// Output of a command: the table plus anything meant for the terminal.
#[derive(Debug, Default)]
pub struct Output {
    pub table: Option<SweepTable>,
    pub text: String,
    pub warnings: Vec<String>,
    /// Number of failed checks (selftest only).
    pub failures: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Physics(#[from] Error),
}

impl CommandError {
    pub fn is_numeric(&self) -> bool {
        matches!(self, CommandError::Physics(e) if e.is_numeric())
    }
}

type CmdResult<T> = std::result::Result<T, CommandError>;

fn value_error(key: &str, msg: impl Into<String>) -> CommandError {
    CommandError::Config(ConfigError::Value {
        key: key.into(),
        msg: msg.into(),
    })
}

fn mirror_z(cfg: &Config) -> CmdResult<f64> {
    let r = cfg.f64("cavity.mirror_reflectivity", Some(0.9999))?;
    if !(0.0..1.0).contains(&r) {
        return Err(value_error("cavity.mirror_reflectivity", "must lie in [0, 1)"));
    }
    Ok(cavity::mirror_z_from_reflectivity(r)?)
}

fn half_waves(cfg: &Config) -> ConfigResult<u32> {
    cfg.parsed("stack.half_waves", Some(0u32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Linear,
    Log,
}

struct Sweep {
    start: f64,
    stop: f64,
    samples: usize,
    scale: Scale,
}

impl Sweep {
    fn read(cfg: &Config, start: f64, stop: f64, samples: usize) -> CmdResult<Self> {
        let sweep = Self {
            start: cfg.f64("sweep.start", Some(start))?,
            stop: cfg.f64("sweep.stop", Some(stop))?,
            samples: cfg.usize("sweep.samples", Some(samples))?,
            scale: match cfg.string("sweep.scale", Some("linear"))?.as_str() {
                "linear" => Scale::Linear,
                "log" => Scale::Log,
                other => return Err(value_error("sweep.scale", format!("expected linear or log, got {other}"))),
            },
        };
        if sweep.samples < 2 || !(sweep.stop > sweep.start) {
            return Err(value_error("sweep", "need stop > start and at least two samples"));
        }
        if sweep.scale == Scale::Log && sweep.start <= 0.0 {
            return Err(value_error("sweep.start", "log sweeps need a positive start"));
        }
        Ok(sweep)
    }

    fn values(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Integer range `start..=stop` read from the sweep section.
fn integer_range(cfg: &Config, start: usize, stop: usize) -> CmdResult<Vec<usize>> {
    let a = cfg.usize("sweep.start", Some(start))?;
    let b = cfg.usize("sweep.stop", Some(stop))?;
    if b < a {
        return Err(value_error("sweep.stop", "must not be below sweep.start"));
    }
    Ok((a..=b).collect())
}

pub fn scan_stack(cfg: &Config) -> CmdResult<Output> {
    let n = cfg.usize("stack.n", None)?;
    let zeta = Polarizability::new(cfg.f64("stack.zeta_re", None)?, cfg.f64("stack.zeta_im", Some(0.0))?)?;
    let start = cfg.f64("sweep.start", Some(0.001))?;
    let stop = cfg.f64("sweep.stop", Some(0.5))?;
    let samples = cfg.usize("sweep.samples", Some(1000))?;
    cfg.ensure_all_used()?;

    let spec = StackSpec::new(n, zeta, start)?;
    let mut table = stack::scan_spacing(&spec, start, stop, samples)?;
    if zeta.is_lossless() {
        table.remove_column("A");
    }
    let mut warnings = Vec::new();
    if zeta.re() > 0.0 {
        warnings.push("positive Re ζ is outside the validated range".into());
    }
    Ok(Output {
        table: Some(table),
        warnings,
        ..Default::default()
    })
}

fn branch(cfg: &Config, base: &CavityConfig) -> CmdResult<Branch> {
    match cfg.string("cavity.branch", Some("coupled"))?.as_str() {
        "coupled" => Ok(cavity::coupled_branch(base, K_OPERATING)?),
        "plus" | "+1" => Ok(Branch::Plus),
        "minus" | "-1" => Ok(Branch::Minus),
        other => Err(value_error("cavity.branch", format!("expected coupled, plus or minus, got {other}"))),
    }
}

pub fn cavity_map(cfg: &Config) -> CmdResult<Output> {
    let n = cfg.usize("stack.n", None)?;
    let length = cfg.f64("cavity.length", Some(6.3e4))?;
    let z = mirror_z(cfg)?;
    let x = cfg.f64("cavity.displacement", Some(0.0))?;
    let (stack, axis) = if n == 0 {
        (None, MapAxis::CenterOfMass)
    } else {
        let zeta = Polarizability::real(cfg.f64("stack.zeta_re", None)?)?;
        let point = cfg.usize("stack.point", Some(1))?;
        let hw = half_waves(cfg)?;
        let spec = if point == 0 {
            StackSpec::at_reflectivity_maximum(n, zeta, hw)?
        } else {
            StackSpec::at_transmission_point(n, zeta, point, hw)?
        };
        let axis = match cfg.string("map.axis", Some("com"))?.as_str() {
            "com" => MapAxis::CenterOfMass,
            "sinusoid" => {
                let l = cfg.usize("map.l", Some(point.max(1)))?;
                if l == 0 || l >= n {
                    return Err(value_error("map.l", format!("must lie in 1..={}", n - 1)));
                }
                MapAxis::Profile(coupling::sinusoid_profile(n, l))
            }
            other => return Err(value_error("map.axis", format!("expected com or sinusoid, got {other}"))),
        };
        (Some(spec), axis)
    };
    let base = CavityConfig::new(length, z, stack, x)?;
    let b = branch(cfg, &base)?;
    let amplitude = cfg.f64("map.amplitude", Some(1e-5))?;
    let amp_samples = cfg.usize("map.amplitude_samples", Some(41))?;
    let k_span = cfg.f64("map.k_span", Some(20.0))?;
    let k_samples = cfg.usize("map.k_samples", Some(201))?;
    cfg.ensure_all_used()?;

    let (tuned, sol) = cavity::tune_length(&base, K_OPERATING, b)?;
    let kappa_c = cavity::bare_linewidth(tuned.length, z);
    let amp_axis = LinearAxis::new(-amplitude, amplitude, amp_samples)?;
    let k_axis = LinearAxis::new(
        K_OPERATING - k_span * kappa_c,
        K_OPERATING + k_span * kappa_c,
        k_samples,
    )?;
    let mut table = cavity::transmission_map(&tuned, &axis, amp_axis, k_axis)?;
    // Report wavenumbers as offsets from 2π so the fringe structure survives
    // twelve-digit output.
    let k_col = table.column_index("k").expect("map has a k column");
    for row in &mut table.rows {
        row[k_col] -= K_OPERATING;
    }
    table.columns[k_col] = "dk".into();
    table.add_provenance(format!("tuned length = {:.12e}", sol.length));
    table.add_provenance(format!("branch = {:?}", sol.branch));
    table.add_provenance(format!("kappa_c = {kappa_c:.12e}"));
    Ok(Output {
        table: Some(table),
        warnings: tuned.warnings(),
        ..Default::default()
    })
}

fn mechanics(cfg: &Config) -> CmdResult<MechanicalSpec> {
    Ok(MechanicalSpec::new(
        cfg.f64("mechanics.omega_m", Some(1e-9))?,
        cfg.f64("mechanics.gamma", Some(1e-15))?,
        cfg.f64("mechanics.x_zpt", Some(1e-9))?,
    )?)
}

pub fn coupling(cfg: &Config) -> CmdResult<Output> {
    let sweep = cfg.string("coupling.sweep", Some("none"))?;
    match sweep.as_str() {
        "none" => coupling_report(cfg),
        "n" => coupling_vs_n(cfg),
        "zeta" => coupling_vs_zeta(cfg),
        other => Err(value_error("coupling.sweep", format!("expected none, n or zeta, got {other}"))),
    }
}

fn coupling_report(cfg: &Config) -> CmdResult<Output> {
    let n = cfg.usize("stack.n", None)?;
    let zeta = Polarizability::real(cfg.f64("stack.zeta_re", None)?)?.re();
    let hw = half_waves(cfg)?;
    let length = cfg.f64("cavity.length", Some(6.3e4))?;
    let z = mirror_z(cfg)?;
    let mech = mechanics(cfg)?;
    cfg.ensure_all_used()?;
    let report = CouplingReport::analytic(n, zeta, hw, length, z, &mech)?;
    Ok(Output {
        table: Some(report.to_table()),
        text: report.to_summary(),
        ..Default::default()
    })
}

fn coupling_vs_n(cfg: &Config) -> CmdResult<Output> {
    let zeta = Polarizability::real(cfg.f64("stack.zeta_re", None)?)?.re();
    let hw = half_waves(cfg)?;
    let length = cfg.f64("cavity.length", Some(6.3e4))?;
    let modes = cfg.usize_list("coupling.modes", Some("1"))?;
    let ns = integer_range(cfg, 2, 100)?;
    let numeric = cfg.bool("coupling.numeric", Some(false))?;
    let z = if numeric { Some(mirror_z(cfg)?) } else { None };
    cfg.ensure_all_used()?;
    if modes.contains(&0) {
        return Err(value_error("coupling.modes", "mode indices start at 1"));
    }
    if ns[0] == 0 {
        return Err(value_error("sweep.start", "N must be at least 1"));
    }

    let mut cols = vec!["N".to_string(), "g_com_over_g".to_string()];
    for l in &modes {
        cols.push(format!("d_{l}"));
        cols.push(format!("g_sin_over_g_{l}"));
        cols.push(format!("L_eff_over_L_{l}"));
        cols.push(format!("kappa_eff_over_kappa_c_{l}"));
        cols.push(format!("C_norm_{l}"));
        if numeric {
            cols.push(format!("g_sin_numeric_over_g_{l}"));
            cols.push(format!("kappa_numeric_over_kappa_c_{l}"));
        }
    }
    let rows = ns
        .par_iter()
        .map(|&n| -> CmdResult<Vec<f64>> {
            let mut row = vec![n as f64, coupling::g_com_over_g(n, zeta)];
            for &l in &modes {
                if l >= n {
                    let width = if numeric { 7 } else { 5 };
                    row.extend(std::iter::repeat_n(f64::NAN, width));
                    continue;
                }
                let d = coupling::spacing_at(n, zeta, l, hw)?;
                let l_eff = coupling::effective_length(n, zeta, l, d, length)?;
                row.push(d);
                row.push(coupling::g_sin_over_g(n, zeta, l, d, length)?);
                row.push(l_eff / length);
                row.push(length / l_eff);
                row.push(coupling::normalized_cooperativity_analytic(n, zeta, l, d, length)?);
                if let Some(z) = z {
                    let (tuned, _) = coupling::transmissive_cavity(n, zeta, l, hw, length, z)?;
                    let profile = coupling::coupling_profile_numeric(&tuned, coupling::DEFAULT_DELTA_X)?;
                    let width = cavity::resonance_and_width(&tuned, K_OPERATING)?;
                    row.push(profile.norm());
                    row.push(width.kappa / cavity::bare_linewidth(tuned.length, z));
                }
            }
            Ok(row)
        })
        .collect::<CmdResult<Vec<_>>>()?;
    let mut table = SweepTable::new(cols);
    table.rows = rows;
    Ok(Output {
        table: Some(table),
        ..Default::default()
    })
}

fn coupling_vs_zeta(cfg: &Config) -> CmdResult<Output> {
    let n = cfg.usize("stack.n", None)?;
    let hw = half_waves(cfg)?;
    let length = cfg.f64("cavity.length", Some(6.3e4))?;
    let modes = cfg.usize_list("coupling.modes", Some("1"))?;
    let sweep = Sweep::read(cfg, 0.01, 20.0, 200)?;
    cfg.ensure_all_used()?;
    if modes.iter().any(|&l| l == 0 || l >= n) {
        return Err(value_error("coupling.modes", format!("entries must lie in 1..={}", n.max(2) - 1)));
    }
    let mut cols = vec!["zeta".to_string()];
    cols.extend(modes.iter().map(|l| format!("g_sin_over_g_{l}")));
    let rows = sweep
        .values()
        .par_iter()
        .map(|&mag| -> CmdResult<Vec<f64>> {
            let zeta = -mag;
            let mut row = vec![zeta];
            for &l in &modes {
                let d = coupling::spacing_at(n, zeta, l, hw)?;
                row.push(coupling::g_sin_over_g(n, zeta, l, d, length)?);
            }
            Ok(row)
        })
        .collect::<CmdResult<Vec<_>>>()?;
    let mut table = SweepTable::new(cols);
    table.rows = rows;
    Ok(Output {
        table: Some(table),
        ..Default::default()
    })
}

pub fn optimize(cfg: &Config) -> CmdResult<Output> {
    let hw = half_waves(cfg)?;
    let l = cfg.usize("coupling.l", Some(1))?;
    let length = cfg.f64("cavity.length", Some(6.3e4))?;
    let n_max = cfg.usize("optimize.n_max", Some(coupling::DEFAULT_N_MAX))?;
    let sweep = Sweep::read(cfg, 0.01, 0.999, 50)?;
    cfg.ensure_all_used()?;
    if n_max < 2 {
        return Err(value_error("optimize.n_max", "must be at least 2"));
    }
    if sweep.start < 0.0 || sweep.stop >= 1.0 {
        return Err(value_error("sweep", "reflectivities must lie in [0, 1)"));
    }
    let rows = sweep
        .values()
        .par_iter()
        .map(|&r| -> CmdResult<Vec<f64>> {
            let zeta = Polarizability::from_reflectivity(r)?.re();
            let opt = coupling::optimize_over_n(zeta, l, hw, length, n_max)?;
            Ok(vec![
                r,
                zeta,
                opt.n_opt as f64,
                opt.spacing,
                opt.g_opt_over_g,
                opt.closed_form_over_g,
            ])
        })
        .collect::<CmdResult<Vec<_>>>()?;
    let mut table = SweepTable::new(["R", "zeta", "N_opt", "d", "g_opt_over_g", "g_opt_closed_over_g"]);
    table.rows = rows;
    Ok(Output {
        table: Some(table),
        ..Default::default()
    })
}

fn absorption_modes(cfg: &Config) -> CmdResult<Vec<String>> {
    let text = cfg.string("absorption.modes", Some("1,last"))?;
    let modes: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    for m in &modes {
        if m != "last" && m.parse::<usize>().map_or(true, |v| v == 0) {
            return Err(value_error("absorption.modes", format!("expected positive integers or last, got {m:?}")));
        }
    }
    Ok(modes)
}

pub fn absorption(cfg: &Config) -> CmdResult<Output> {
    let zeta_abs = cfg.f64("stack.zeta_abs", Some(12.9))?.abs();
    let zeta_im = cfg.f64("stack.zeta_im", Some(1e-5))?;
    let hw = half_waves(cfg)?;
    let length = cfg.f64("cavity.length", Some(6.3e4))?;
    let z = mirror_z(cfg)?;
    let ns = integer_range(cfg, 2, 20)?;
    let modes = absorption_modes(cfg)?;
    cfg.ensure_all_used()?;
    Polarizability::new(zeta_abs, zeta_im)?;
    if ns[0] < 2 {
        return Err(CommandError::Physics(Error::NoTransmissionPoints));
    }

    let mut points = Vec::new();
    for &n in &ns {
        let mut ls: Vec<usize> = modes
            .iter()
            .map(|m| if m == "last" { n - 1 } else { m.parse().expect("validated") })
            .filter(|&l| l < n)
            .collect();
        ls.dedup();
        points.extend(ls.into_iter().map(|l| (n, l)));
    }
    let kappa_c = |len: f64| cavity::bare_linewidth(len, z);
    let rows = points
        .par_iter()
        .map(|&(n, l)| -> CmdResult<Vec<f64>> {
            let p = absorption::absorption_linewidth(n, zeta_abs, zeta_im, l, hw, length, z)?;
            let kc = kappa_c(p.length);
            let scale = n as f64 * zeta_im;
            Ok(vec![
                n as f64,
                l as f64,
                p.spacing,
                p.a_numeric,
                p.a_closed,
                p.a_conjectured,
                if scale > 0.0 { p.a_numeric / scale } else { 0.0 },
                p.kappa_lossless / kc,
                p.kappa_absorbing / kc,
                p.kappa_eff / kc,
                p.kappa_eff_abs / kc,
            ])
        })
        .collect::<CmdResult<Vec<_>>>()?;
    let mut table = SweepTable::new([
        "N",
        "l",
        "d",
        "A_numeric",
        "A_closed",
        "A_conjectured",
        "A_over_N_im_zeta",
        "kappa_lossless_over_kappa_c",
        "kappa_absorbing_over_kappa_c",
        "kappa_eff_over_kappa_c",
        "kappa_eff_abs_over_kappa_c",
    ]);
    table.rows = rows;
    Ok(Output {
        table: Some(table),
        ..Default::default()
    })
}

pub fn selftest(fault: Fault) -> Output {
    let results: Vec<CheckResult> = selftest::run(fault);
    let mut text = String::new();
    let mut failures = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        if !r.passed {
            failures += 1;
        }
        text.push_str(&format!("{tag} {}: {}\n", r.name, r.detail));
    }
    text.push_str(&format!("{} checks, {failures} failed\n", results.len()));
    Output {
        text,
        failures,
        ..Default::default()
    }
}
