use oam_lattice::hamiltonian::Model;
use oam_lattice::qsh::*;
use oam_lattice::scattering::DecaySpec;
use oam_lattice::{LatticeSpec, SiteIndex};

const NK: usize = 48;

#[test]
fn gap_closes_and_reopens() {
    let r = qsh_gap_scan(0.6, &[0.0, 0.075, 0.125], -1.6, NK).unwrap();
    assert!(r[0].width > 0.3, "{:?}", r[0]);
    assert!(r[1].width < 0.05, "{:?}", r[1]);
    assert!(r[2].width > 0.2, "{:?}", r[2]);
    for g in &r {
        assert_eq!(g.bands_below, 2);
    }
    assert!(r[0].e_low < -1.6 && r[0].e_high > -1.6);
}

#[test]
fn band_edges_are_ordered_and_mirror_symmetric_at_zero_modulation() {
    let e = qsh_band_edges::<f64>(0.05, 0.0, 16).unwrap();
    assert_eq!(e.len(), 8);
    for w in e.windows(2) {
        assert!(w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
    }
    for (a, b) in e.iter().zip(e.iter().rev()) {
        assert!((a.0 + b.1).abs() < 1e-9 && (a.1 + b.0).abs() < 1e-9);
    }
}

#[test]
fn gap_is_continuous_in_beta() {
    let grid: Vec<f64> = (0..=12).map(|i| 0.0125 * i as f64).collect();
    let w: Vec<f64> = qsh_gap_scan(0.6, &grid, -1.6, 32).unwrap().iter().map(|g| g.width).collect();
    let d: Vec<f64> = w.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    for i in 1..d.len() - 1 {
        let neighbor = d[i - 1].max(d[i + 1]).max(0.02);
        assert!(d[i] <= 4.0 * neighbor, "jump {} at {}", d[i], grid[i]);
    }
}

#[test]
fn detector_finds_the_closing() {
    let grid: Vec<f64> = (0..=6).map(|i| 0.025 * i as f64).collect();
    let est = transition_detector(0.6, &grid, -1.6, NK).unwrap();
    assert!((est.beta_c - 0.075).abs() <= est.uncertainty + 1e-12, "{:?}", est.beta_c);
    let fine: Vec<f64> = (0..=12).map(|i| 0.0125 * i as f64).collect();
    let refined = transition_detector(0.6, &fine, -1.6, NK).unwrap();
    assert!((refined.uncertainty - est.uncertainty / 2.0).abs() < 1e-12);
    assert!((refined.beta_c - 0.075).abs() <= refined.uncertainty + 1e-12);
    assert!(transition_detector(0.6, &[0.0, 0.01], -1.6, NK).is_err());
    assert!(transition_detector(0.6, &[0.0, 0.01, 0.02], -1.6, NK).is_err());
    // Uniform lattice: smoke run only.
    let _ = transition_detector(0.0, &grid, -1.6, 16);
}

#[test]
fn polarizations_counter_propagate_in_the_topological_phase() {
    let spec = LatticeSpec::cylinder(10, -50, 50, 2).unwrap();
    let decay = DecaySpec::<f64>::Uniform(0.1);
    let topo = polarized_edge_maps(&spec, &Model::Qsh { beta0: 0.0, lambda0: 0.6 }, &decay, -1.6).unwrap();
    let [a, b] = topo.displacement;
    assert!(a * b < 0.0, "{a} {b}");
    assert!((a + b).abs() < 0.1 * a.abs().max(b.abs()));
    let normal = polarized_edge_maps(&spec, &Model::Qsh { beta0: 0.125, lambda0: 0.6 }, &decay, -1.6).unwrap();
    for s in 0..2 {
        assert!(normal.edge_weight[s] < topo.edge_weight[s]);
        assert!(normal.displacement[s].abs() < 1e-6);
    }
}

#[test]
fn decoupled_map_is_the_input_alone() {
    let spec = LatticeSpec::cylinder(4, -5, 5, 2).unwrap();
    let out = polarized_edge_maps(&spec, &Model::Decoupled, &DecaySpec::Uniform(0.1), -1.6).unwrap();
    for s in 0..2 {
        let m = &out.maps[s];
        let k = spec.flat_index(&SiteIndex::new(0, 0, s)).unwrap();
        assert!(m.weights[k] > 0.0);
        assert!(m.weights.iter().enumerate().all(|(i, w)| i == k || *w == 0.0));
        assert_eq!(out.displacement[s], 0.0);
    }
    assert!(polarized_edge_maps(&LatticeSpec::cylinder(4, -5, 5, 1).unwrap(), &Model::Decoupled, &DecaySpec::Uniform(0.1), 0.0).is_err());
}
