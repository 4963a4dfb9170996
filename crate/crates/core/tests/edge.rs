use num_complex::Complex64 as C;
use oam_lattice::edge::*;
use oam_lattice::hamiltonian::Model;
use oam_lattice::scattering::{linspace, DecaySpec, Propagator, SolverKind};
use oam_lattice::{Flux, LatticeSpec, Real, SiteIndex};

fn sixth() -> Flux {
    Flux::new(1, 6).unwrap()
}

fn desk_cylinder() -> LatticeSpec {
    LatticeSpec::cylinder(10, -50, 50, 1).unwrap()
}

fn ky_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| std::f64::consts::TAU * i as f64 / n as f64).collect()
}

#[test]
fn harper_union_reproduces_cylinder_spectrum() {
    let spec = LatticeSpec::cylinder(6, 0, 11, 1).unwrap();
    let h = Model::<f64>::Landau { phi0: sixth() }.build(&spec).unwrap();
    let mut cyl: Vec<f64> = h.eigenvalues().unwrap();
    let mut harper = Vec::new();
    for n in 0..12 {
        let ky = std::f64::consts::TAU * n as f64 / 12.0;
        let m = harper_matrix::<f64>(sixth(), 6, ky);
        assert!(m.hermiticity_error() < 1e-15);
        harper.extend(f64::eigvalsh(&m).unwrap());
    }
    cyl.sort_by(|a, b| a.partial_cmp(b).unwrap());
    harper.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (a, b) in cyl.iter().zip(&harper) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn edge_branches_count_the_gap_chern_sum() {
    let ky = ky_grid(400);
    let first = harper_edge_modes(sixth(), 10, &ky, -2.2, 0.2).unwrap();
    let second = harper_edge_modes(sixth(), 10, &ky, -1.0, 0.2).unwrap();
    assert_eq!(first.predicted_displacement(EdgeSide::Right), 1);
    assert_eq!(first.predicted_displacement(EdgeSide::Left), -1);
    assert_eq!(second.predicted_displacement(EdgeSide::Right), 2);
    assert_eq!(second.predicted_displacement(EdgeSide::Left), -2);
    for m in &first.modes {
        assert!(m.side_weight > 0.5);
        let norm: f64 = m.psi.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn numeric_displacement_matches_edge_branch_count() {
    let spec = desk_cylinder();
    let h = Model::<f64>::Landau { phi0: sixth() }.build(&spec).unwrap();
    let ky = ky_grid(400);
    for omega in [-2.2, -1.0] {
        let modes = harper_edge_modes(sixth(), 10, &ky, omega, 0.2).unwrap();
        let d = oam_displacement(&h, &DecaySpec::Uniform(0.2), omega, &EdgeRegion::default(), &DisplacementOptions::default())
            .unwrap();
        assert_eq!(d.round() as i64, modes.predicted_displacement(EdgeSide::Right), "ω = {omega}: l̄_e = {d}");
    }
}

#[test]
fn edge_transmission_decays_at_the_analytic_rate() {
    let spec = desk_cylinder();
    let h = Model::<f64>::Landau { phi0: sixth() }.build(&spec).unwrap();
    let (omega, gamma, j) = (-2.2, 0.2, 9usize);
    let modes = harper_edge_modes(sixth(), 10, &ky_grid(400), omega, gamma).unwrap();
    let right: Vec<&EdgeMode<f64>> = modes.on_side(EdgeSide::Right).collect();
    assert_eq!(right.len(), 1);
    let v = right[0].velocity;
    let prop = Propagator::new(&h, &DecaySpec::Uniform(gamma), SolverKind::Direct).unwrap();
    let input = spec.flat_index(&SiteIndex::new(j, 0, 0)).unwrap();
    let amps = prop.amplitudes(omega, &[input]).unwrap().remove(0);
    let dir = v.signum() as i64;
    let (l0, l1) = (4i64, 20i64);
    let at = |l: i64| amps[spec.flat_index(&SiteIndex::new(j, dir * l, 0)).unwrap()].norm_sqr().ln();
    let slope = (at(l1) - at(l0)) / (l1 - l0) as f64;
    let expect = -gamma / v.abs();
    assert!((slope - expect).abs() < 0.1 * expect.abs(), "slope {slope} vs {expect}");

    let analytic = analytic_gap_transmission(&modes, gamma, -30..=30, j, j).unwrap();
    for (l, t) in analytic {
        if l * dir >= 4 && l * dir <= 12 {
            let numeric = amps[spec.flat_index(&SiteIndex::new(j, l, 0)).unwrap()];
            let ratio = t.norm() / numeric.norm();
            assert!((ratio - 1.0).abs() < 0.25, "l = {l}: |T| analytic/numeric = {ratio}");
        }
    }
}

#[test]
fn decoupled_array_has_no_displacement() {
    let spec = LatticeSpec::cylinder(6, -10, 10, 1).unwrap();
    let h = Model::<f64>::Decoupled.build(&spec).unwrap();
    let grid = linspace(-1.0, 1.0, 9);
    let out = displacement_spectrum(&h, &DecaySpec::Uniform(0.2), &grid, &EdgeRegion::default(), &DisplacementOptions::default())
        .unwrap();
    for (_, d) in out {
        assert!(d.abs() < 1e-14);
    }
}

#[test]
fn spectrum_matches_pointwise_displacement() {
    let spec = LatticeSpec::cylinder(6, -12, 12, 1).unwrap();
    let h = Model::<f64>::Landau { phi0: Flux::new(1, 4).unwrap() }.build(&spec).unwrap();
    let decay = DecaySpec::Uniform(0.2);
    let region = EdgeRegion::new(EdgeSide::Left, 2);
    let opts = DisplacementOptions::default();
    let grid = linspace(-3.0, 3.0, 7);
    let spectrum = displacement_spectrum(&h, &decay, &grid, &region, &opts).unwrap();
    for (w, d) in spectrum {
        let single = oam_displacement(&h, &decay, w, &region, &opts).unwrap();
        assert!((d - single).abs() < 1e-10);
    }
}

#[test]
fn region_validation() {
    assert!(EdgeRegion::new(EdgeSide::Right, 0).columns(10).is_err());
    assert!(EdgeRegion::new(EdgeSide::Right, 6).columns(10).is_err());
    assert_eq!(EdgeRegion::new(EdgeSide::Right, 3).columns(10).unwrap(), vec![7, 8, 9]);
    assert_eq!(EdgeRegion::new(EdgeSide::Left, 2).columns(10).unwrap(), vec![0, 1]);
    let spec = LatticeSpec::cylinder(4, -1, 1, 2).unwrap();
    let opts = DisplacementOptions { input_l: 0, spin: SpinInput::Only(1) };
    let idx = region_inputs(&spec, &EdgeRegion::new(EdgeSide::Left, 1), &opts).unwrap();
    assert_eq!(idx, vec![spec.flat_index(&SiteIndex::new(0, 0, 1)).unwrap()]);
}

#[test]
fn transmission_map_partitions_weight() {
    let spec = LatticeSpec::cylinder(8, -6, 6, 1).unwrap();
    let h = Model::<f64>::Landau { phi0: Flux::new(1, 4).unwrap() }.build(&spec).unwrap();
    let map = transmission_map(&h, &DecaySpec::Uniform(0.1), -2.0, &SiteIndex::new(0, 0, 0)).unwrap();
    let grid = map.jl_grid();
    let summed: f64 = grid.iter().flatten().sum();
    assert!((summed - map.total()).abs() < 1e-12);
    assert!((map.edge_weight(2) + map.interior_weight(1) - map.total()).abs() < 1e-12);
}

#[test]
fn zero_velocity_is_reported() {
    let set = EdgeModeSet {
        omega: 0.0,
        gamma: 0.1,
        n_x: 2,
        modes: vec![EdgeMode {
            ky: 0.0,
            band: 0,
            velocity: 0.0,
            side: EdgeSide::Left,
            side_weight: 1.0,
            psi: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
        }],
    };
    assert!(matches!(analytic_gap_transmission(&set, 0.1, 0..=3, 0, 0), Err(oam_lattice::Error::ZeroVelocity { .. })));
}
