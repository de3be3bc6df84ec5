use optoarray::cavity::{self, Branch, CavityConfig};
use optoarray::coupling;
use optoarray::stack::StackSpec;
use optoarray::tmm::Polarizability;
use optoarray::K_OPERATING as K;

const L: f64 = 6.3e4;
const Z: f64 = -99.995;

fn cavity_at(n: usize, zeta: f64, l: usize, half_waves: u32) -> CavityConfig {
    let s = StackSpec::at_transmission_point(n, Polarizability::real(zeta).unwrap(), l, half_waves).unwrap();
    CavityConfig::new(L, Z, Some(s), 0.0).unwrap()
}

#[test]
fn solved_lengths_are_numeric_resonances() {
    for l in 1..=5 {
        for branch in [Branch::Plus, Branch::Minus] {
            let (cfg, sol) = cavity::tune_length(&cavity_at(6, -0.5, l, 0), K, branch).unwrap();
            let found = cavity::find_resonance_numeric(&cfg, K, cavity::default_window(&cfg)).unwrap();
            assert!(((found.k_res - sol.k_res) / sol.k_res).abs() < 1e-9, "l={l} {branch:?}");
            assert!(found.peak_transmission > 0.999);
        }
    }
}

#[test]
fn perfect_mirror_guess_is_off_by_the_mirror_phase() {
    let (cfg, sol) = cavity::tune_length(&cavity_at(6, -0.5, 2, 0), K, Branch::Plus).unwrap();
    let perfect = cfg.with_length(sol.length_perfect).unwrap();
    let width = cavity::resonance_and_width(&cfg, K).unwrap();
    let shift = cavity::find_resonance_numeric(&perfect, K, cavity::default_window(&perfect)).unwrap().k_res - K;
    let predicted = K * (sol.length - sol.length_perfect) / sol.length_perfect;
    assert!(shift.abs() > 10.0 * width.fwhm);
    assert!((shift / predicted - 1.0).abs() < 0.01, "{shift:e} vs {predicted:e}");
}

#[test]
fn branches_interleave() {
    let cfg = cavity_at(6, -0.5, 1, 0);
    let mut lengths: Vec<(f64, Branch)> = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        let (_, sol) = cavity::tune_length(&cfg, K, branch).unwrap();
        for dm in -2..=2 {
            let s = cavity::solve_resonance_for_length(&cfg, K, branch, sol.mode_index + dm).unwrap();
            lengths.push((s.length, branch));
        }
    }
    lengths.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in lengths.windows(2) {
        assert_ne!(pair[0].1, pair[1].1, "consecutive resonant lengths share a branch");
    }
}

#[test]
fn narrowing_law_holds_across_n() {
    let zeta = -12.9;
    let products: Vec<f64> = (2..=8)
        .map(|n| {
            let (cfg, _) = coupling::transmissive_cavity(n, zeta, 1, 40, L, Z).unwrap();
            let w = cavity::resonance_and_width(&cfg, K).unwrap();
            let d = cfg.stack.as_ref().unwrap().spacing;
            w.kappa * coupling::effective_length(n, zeta, 1, d, cfg.length).unwrap()
        })
        .collect();
    let first = products[0];
    for p in &products {
        assert!((p / first - 1.0).abs() < 0.05, "{products:?}");
    }
}

#[test]
fn bare_linewidth_matches_formula() {
    let cfg = CavityConfig::bare(L, Z).unwrap();
    let w = cavity::resonance_and_width(&cfg, K).unwrap();
    let expected = cavity::bare_linewidth(L, Z);
    assert!((w.kappa / expected - 1.0).abs() < 0.02);
}

#[test]
fn displaced_map_rows_are_ordered() {
    use optoarray::cavity::MapAxis;
    use optoarray::table::LinearAxis;
    let s = StackSpec::at_reflectivity_maximum(4, Polarizability::real(-0.5).unwrap(), 0).unwrap();
    let cfg = CavityConfig::new(L, Z, Some(s), 0.0).unwrap();
    let t = cavity::transmission_map(
        &cfg,
        &MapAxis::CenterOfMass,
        LinearAxis::new(-1e-4, 1e-4, 3).unwrap(),
        LinearAxis::new(K - 1e-4, K + 1e-4, 5).unwrap(),
    )
    .unwrap();
    assert_eq!(t.rows.len(), 15);
    assert_eq!(t.rows[0][0], -2e-4);
    assert_eq!(t.rows[4][1], K + 1e-4);
    assert!(t.rows.iter().all(|r| (0.0..=1.0 + 1e-9).contains(&r[2])));
}
