use oam_lattice::chern::*;
use oam_lattice::hamiltonian::Model;
use oam_lattice::scattering::{DecaySpec, Propagator, SolverKind};
use oam_lattice::{Boundary, Flux, LatticeSpec, Real};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Hall conductance of gap r from r = p t + q s with |t| ≤ q/2 (the
/// smallest |t| when two solutions exist).
fn diophantine_t(p: i64, q: i64, r: i64) -> i64 {
    let mut best: Option<i64> = None;
    for t in -q..=q {
        if (r - p * t).rem_euclid(q) == 0 && 2 * t.abs() <= q && best.is_none_or(|b| t.abs() < b.abs()) {
            best = Some(t);
        }
    }
    best.unwrap()
}

fn oracle_band_cherns(p: i64, q: i64) -> Vec<i64> {
    let gap = |r: i64| if r == 0 || r == q { 0 } else { diophantine_t(p, q, r) };
    (1..=q).map(|r| gap(r) - gap(r - 1)).collect()
}

#[test]
fn bloch_hamiltonian_is_hermitian_and_matches_q1() {
    let h = magnetic_bloch_hamiltonian::<f64>(0, 1, 0.3, 1.1).unwrap();
    let e = -2.0 * 0.3f64.cos() - 2.0 * 1.1f64.cos();
    assert!((h[(0, 0)].re - e).abs() < 1e-14);
    let h = magnetic_bloch_hamiltonian::<f64>(2, 7, 0.4, 0.2).unwrap();
    assert!(h.hermiticity_error() < 1e-14);
    assert!(magnetic_bloch_hamiltonian::<f64>(2, 4, 0.0, 0.0).is_err());
}

#[test]
fn bloch_spectrum_matches_torus_spectrum() {
    // A torus whose sizes are commensurate with the magnetic cell has exactly
    // the Bloch eigenvalues at its allowed momenta.
    let (p, q, n_x, n_l) = (1i64, 4i64, 6usize, 12usize);
    let spec = LatticeSpec::new(n_x, 0, n_l as i64 - 1, 1, Boundary::Periodic, Boundary::Periodic).unwrap();
    let h = Model::OamGauge { phi0: Flux::new(p, q).unwrap() }.build(&spec).unwrap();
    let mut torus: Vec<f64> = h.eigenvalues().unwrap();
    let mut bloch = Vec::new();
    for m in 0..n_x {
        for n in 0..n_l / q as usize {
            let kx = 2.0 * PI * m as f64 / n_x as f64;
            let ky = 2.0 * PI * n as f64 / n_l as f64;
            bloch.extend(f64::eigvalsh(&magnetic_bloch_hamiltonian(p, q, kx, ky).unwrap()).unwrap());
        }
    }
    torus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bloch.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(torus.len(), bloch.len());
    for (a, b) in torus.iter().zip(&bloch) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn lowest_band_flux_one_sixth_has_unit_chern() {
    let grid = MagneticBZGrid::new(1, 6, 64, 64).unwrap();
    let data = band_structure::<f64>(&grid).unwrap();
    assert_eq!(fukui_hatsugai_chern(&data, 0).unwrap(), 1);
}

#[test]
fn cherns_match_diophantine_oracle() {
    for (p, q) in [(1, 3), (2, 5), (1, 5), (3, 7), (1, 4), (1, 6)] {
        let grid = MagneticBZGrid::new(p, q, 48, 48).unwrap();
        let data = band_structure::<f64>(&grid).unwrap();
        let oracle = oracle_band_cherns(p, q);
        let groups = chern_numbers(&data, 1e-6).unwrap();
        assert_eq!(groups.iter().map(|g| g.1).sum::<i64>(), 0);
        for (range, c) in groups {
            let expected: i64 = range.clone().map(|m| oracle[m]).sum();
            assert_eq!(c, expected, "p/q = {p}/{q}, bands {range:?}");
        }
    }
}

#[test]
fn coarse_grid_is_flagged() {
    let grid = MagneticBZGrid::new(1, 6, 2, 2).unwrap();
    let data = band_structure::<f64>(&grid).unwrap();
    assert!(matches!(fukui_hatsugai_chern(&data, 0), Err(oam_lattice::Error::GridTooCoarse { .. })));
}

#[test]
fn phase_mismatch_agrees_with_plaquette_method() {
    let grid = MagneticBZGrid::new(1, 6, 60, 60).unwrap();
    let data = band_structure::<f64>(&grid).unwrap();
    let part = BZPartition::from_kx_range(&grid, -0.4 * PI, 0.4 * PI, 3);
    assert_eq!(phase_mismatch_chern(&data, 0, &part).unwrap(), 1);
    let auto = auto_partition(&data, 0).unwrap();
    assert_eq!(phase_mismatch_chern(&data, 0, &auto).unwrap(), 1);
    for (p, q) in [(1, 3), (2, 5), (1, 5), (3, 7), (3, 8)] {
        let grid = MagneticBZGrid::new(p, q, 60, 60).unwrap();
        let data = band_structure::<f64>(&grid).unwrap();
        for group in band_groups(&data, 1e-6).into_iter().filter(|g| g.len() == 1) {
            let m = group.start;
            let fhs = fukui_hatsugai_chern(&data, m).unwrap();
            let part = auto_partition(&data, m).unwrap();
            assert_eq!(phase_mismatch_chern(&data, m, &part).unwrap(), fhs, "p/q = {p}/{q}, band {m}");
            let cells = (0..60).flat_map(|i| (0..60).map(move |j| (i, j)));
            let min_u0 = cells.clone().map(|(i, j)| data.u(m, i, j)[0].norm()).fold(f64::INFINITY, f64::min);
            if min_u0 > 1e-3 {
                let vortices: i64 = cells.map(|(i, j)| component_vortex(&data, m, 0, i as usize, j as usize)).sum();
                assert_eq!(vortices, fhs, "vortex count p/q = {p}/{q}, band {m}");
            }
        }
    }
}

#[test]
fn partition_through_a_zero_is_rejected() {
    let grid = MagneticBZGrid::new(1, 6, 60, 60).unwrap();
    let data = band_structure::<f64>(&grid).unwrap();
    let whole = BZPartition::whole_zone();
    assert!(matches!(phase_mismatch_chern(&data, 0, &whole), Err(oam_lattice::Error::InvalidPartition(_))));
}

#[test]
fn transmission_recovers_lowest_band_chern() {
    let spec = LatticeSpec::new(10, -48, 47, 1, Boundary::Periodic, Boundary::Periodic).unwrap();
    let h = Model::OamGauge { phi0: Flux::new(1, 6).unwrap() }.build(&spec).unwrap();
    let prop = Propagator::new(&h, &DecaySpec::Uniform(0.1), SolverKind::Auto).unwrap();
    let grid = MagneticBZGrid::new(1, 6, 10, 16).unwrap();
    let bands = band_structure::<f64>(&grid).unwrap();
    let (lo, hi) = bands.band_range(0);
    let omega = 0.5 * (lo + hi);
    let input = spec.flat_index(&oam_lattice::SiteIndex::new(0, 0, 0)).unwrap();
    let amps = prop.amplitudes(omega, &[input]).unwrap().remove(0);
    let data = bloch_from_transmission(&spec, &amps, 1, 6, omega, 0.1).unwrap();
    let part = BZPartition::from_kx_range(&data.grid, -0.4 * PI, 0.4 * PI, 3);
    assert_eq!(phase_mismatch_chern_with(&data, 0, &part, PartitionCheck::Boundary).unwrap(), 1);
}

#[test]
fn transmission_rejects_unisolated_band() {
    let spec = LatticeSpec::new(10, -48, 47, 1, Boundary::Periodic, Boundary::Periodic).unwrap();
    let amps = vec![num_complex::Complex::new(0.0, 0.0); spec.dim()];
    assert!(bloch_from_transmission(&spec, &amps, 1, 6, 0.0, 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chern_is_gauge_invariant(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let grid = MagneticBZGrid::new(1, 3, 24, 24).unwrap();
        let data = band_structure::<f64>(&grid).unwrap();
        let g = data.regauge(|m, kx, ky| a * kx.sin() + b * (3.0 * ky).cos() + c * m as f64);
        for m in 0..3 {
            prop_assert_eq!(fukui_hatsugai_chern(&g, m).unwrap(), fukui_hatsugai_chern(&data, m).unwrap());
        }
        let part = auto_partition(&data, 0).unwrap();
        let gp = auto_partition(&g, 0).unwrap();
        prop_assert_eq!(phase_mismatch_chern(&g, 0, &gp).unwrap(), phase_mismatch_chern(&data, 0, &part).unwrap());
    }

    #[test]
    fn chern_sum_vanishes(q in 2i64..8, p0 in 1i64..7) {
        let p = p0 % q;
        prop_assume!(p > 0 && num_integer::gcd(p, q) == 1);
        let grid = MagneticBZGrid::new(p, q, 40, 40).unwrap();
        let data = band_structure::<f64>(&grid).unwrap();
        let total: i64 = chern_numbers(&data, 1e-6).unwrap().iter().map(|g| g.1).sum();
        prop_assert_eq!(total, 0);
    }
}
