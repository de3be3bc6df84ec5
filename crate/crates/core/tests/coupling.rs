use optoarray::cavity;
use optoarray::coupling::{self, DEFAULT_DELTA_X};
use optoarray::stack;

const L: f64 = 6.3e4;
const Z: f64 = -99.995;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn g1_series(zeta: f64, length: f64, ns: &[usize]) -> Vec<f64> {
    ns.iter()
        .map(|&n| coupling::g_sin_over_g(n, zeta, 1, stack::transmission_point(n, zeta, 1), length).unwrap())
        .collect()
}

#[test]
fn growth_as_n_three_halves_without_saturation() {
    let ns: Vec<usize> = (200..=2000).step_by(100).collect();
    let g = g1_series(-0.5, 1e14, &ns);
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    assert!((slope(&x, &g) - 1.5).abs() < 0.05);
}

#[test]
fn growth_as_root_n_for_weak_elements() {
    let zeta = -1e-4;
    let ns: Vec<usize> = (3..=40).collect();
    let g = g1_series(zeta, 1e14, &ns);
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    assert!((slope(&x, &g) - 0.5).abs() < 0.05);
    for (n, g) in x.iter().zip(&g) {
        assert!((g / n.sqrt() / (zeta.abs() / 2f64.sqrt()) - 1.0).abs() < 0.05);
    }
}

#[test]
fn centre_of_mass_decays_as_inverse_root_n() {
    let ns: Vec<usize> = (4..=40).collect();
    let g: Vec<f64> = ns.iter().map(|&n| coupling::g_com_over_g(n, -12.9)).collect();
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    assert!((slope(&x, &g) + 0.5).abs() < 0.05);
}

#[test]
fn saturated_coupling_decays_as_n_three_halves() {
    let ns: Vec<usize> = (200..=2000).step_by(100).collect();
    let g = g1_series(-12.9, L, &ns);
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    assert!((slope(&x, &g) + 1.5).abs() < 0.05);
}

#[test]
fn pair_crosses_from_linear_to_quadratic() {
    let exact = |z: f64| coupling::g_sin_over_g(2, -z, 1, 0.0, 1.0).unwrap();
    assert!((exact(0.01) / (2f64.sqrt() * 0.01) - 1.0).abs() < 0.1);
    assert!((exact(50.0) / (2.0 * 2f64.sqrt() * 2500.0) - 1.0).abs() < 0.1);
}

#[test]
fn pair_example_value() {
    let g = coupling::g_sin_over_g(2, -0.5, 1, 0.0, 1.0).unwrap();
    assert!((g - 2f64.sqrt() * 0.5 * (1.25f64.sqrt() + 0.5)).abs() < 1e-14);
    assert!((g - 1.1441).abs() < 1e-4);
}

#[test]
fn large_n_form_is_close_at_twenty() {
    let exact = coupling::g_sin_over_g(20, -0.5, 1, 0.0, 1.0).unwrap();
    let approx = coupling::g_sin_large_n_over_g(20, -0.5);
    assert!((exact - 10.35).abs() < 0.01);
    assert!((approx - 10.07).abs() < 0.01);
}

#[test]
fn normalization_anomaly_is_exact() {
    for n in 2..=40usize {
        for l in 1..n {
            let s: f64 = coupling::sinusoid_profile(n, l).iter().map(|v| v * v).sum();
            let expected = if n == 2 * l { n as f64 } else { n as f64 / 2.0 };
            assert!((s - expected).abs() < 1e-12, "N={n} l={l}");
        }
    }
}

#[test]
fn half_filling_is_a_local_maximum() {
    let zeta = -12.9;
    for l in 2..=4usize {
        let g = |n: usize| coupling::g_sin_over_g(n, zeta, l, stack::transmission_point(n, zeta, l), L).unwrap();
        let peak = g(2 * l);
        assert!(peak > g(2 * l - 1) && peak > g(2 * l + 1), "l={l}");
    }
}

#[test]
fn numeric_profile_matches_sinusoid_for_second_point() {
    let (cfg, _) = coupling::transmissive_cavity(6, -0.5, 2, 0, L, Z).unwrap();
    let num = coupling::coupling_profile_numeric(&cfg, DEFAULT_DELTA_X).unwrap();
    let d = cfg.stack.as_ref().unwrap().spacing;
    let ana = coupling::coupling_profile_analytic(6, -0.5, 2, d, cfg.length).unwrap();
    let sign = num.couplings_over_g.iter().zip(&ana.couplings_over_g).map(|(a, b)| a * b).sum::<f64>().signum();
    let scale = num.norm();
    for (a, b) in num.couplings_over_g.iter().zip(&ana.couplings_over_g) {
        assert!((a - sign * b).abs() / scale < 1e-3);
    }
    assert!((num.norm() / ana.couplings_over_g.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-3);
}

#[test]
fn mirror_pair_moves_oppositely_and_uniform_motion_is_silent() {
    // The resonance is only resolved to one ulp of k, so the larger allowed
    // step keeps that floor well below the tolerance.
    let h = 1e-5;
    let (cfg, _) = coupling::transmissive_cavity(6, -0.5, 1, 0, L, Z).unwrap();
    let num = coupling::coupling_profile_numeric(&cfg, h).unwrap();
    let g = &num.couplings_over_g;
    let scale = num.norm();
    for j in 0..3 {
        assert!((g[j] + g[5 - j]).abs() / scale < 1e-6, "{g:?}");
    }

    let window = cavity::default_window(&cfg);
    let up = cavity::find_resonance_displaced(&cfg, &[h; 6], num.k_res, window).unwrap().k_res;
    let down = cavity::find_resonance_displaced(&cfg, &[-h; 6], num.k_res, window).unwrap().k_res;
    let uniform = -(up - down) / (2.0 * h) * cfg.length / (2.0 * num.k_res);
    assert!(uniform.abs() / scale < 1e-4, "{uniform:e}");
}

#[test]
fn optimum_matches_closed_form_for_weak_elements() {
    let opt = coupling::optimize_over_n(-0.05, 1, 0, L, 10_000).unwrap();
    assert!(opt.n_opt > 2);
    assert!((opt.g_opt_over_g / opt.closed_form_over_g - 1.0).abs() < 0.1, "{opt:?}");
}

#[test]
fn optimum_is_small_for_strong_elements() {
    let opt = coupling::optimize_over_n(-12.9, 1, 0, L, 10_000).unwrap();
    assert_eq!(opt.n_opt, 16);
}

#[test]
fn report_rows_cover_every_mode() {
    let mech = coupling::MechanicalSpec::new(1e-9, 1e-15, 1e-9).unwrap();
    let rep = coupling::CouplingReport::analytic(6, -0.5, 0, L, Z, &mech).unwrap();
    let t = rep.to_table();
    assert_eq!(t.rows.len(), 5);
    assert!(rep.to_summary().contains("g_com"));
}

#[test]
fn effective_length_example() {
    let excess = |d: f64| coupling::effective_length(2, -12.9, 1, d, L).unwrap() - L;
    assert!((excess(20.04) / 1.338e4 - 1.0).abs() < 1e-3);
    let d = coupling::spacing_at(2, -12.9, 1, 40).unwrap();
    assert!((d - 20.488).abs() < 1e-3);
    assert!((excess(d) - 4.0 * d * 12.9 * (1.0f64 + 166.41).sqrt()).abs() < 1e-9 * L);
}
