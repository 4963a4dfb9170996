use num_complex::Complex64 as C;
use oam_lattice::hamiltonian::{HamiltonianMatrix, Model};
use oam_lattice::linalg::DenseMatrix;
use oam_lattice::scattering::*;
use oam_lattice::{Boundary, Flux, LatticeSpec, SiteIndex};
use proptest::prelude::*;

fn landau(spec: &LatticeSpec, p: i64, q: i64) -> HamiltonianMatrix<f64> {
    Model::Landau { phi0: Flux::new(p, q).unwrap() }.build(spec).unwrap()
}

#[test]
fn single_mode_is_a_lorentzian() {
    let spec = LatticeSpec::new(1, 0, 0, 1, Boundary::Open, Boundary::Open).unwrap();
    let h = HamiltonianMatrix::from_dense(spec, DenseMatrix::from_fn(1, 1, |_, _| C::new(0.3, 0.0))).unwrap();
    let g = 0.2;
    for omega in [-1.0, 0.1, 0.3, 0.7] {
        let r = transmission(&h, &DecaySpec::Uniform(g), omega, &SiteIndex::new(0, 0, 0)).unwrap();
        let expect = C::new(0.0, -g) / C::new(omega - 0.3, g / 2.0);
        assert!((r.amplitudes[0] - expect).norm() < 1e-14);
        assert!((r.s_row(&spec)[0].norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn two_coupled_modes_closed_form() {
    let spec = LatticeSpec::new(2, 0, 0, 1, Boundary::Open, Boundary::Open).unwrap();
    let h = landau(&spec, 0, 1);
    let g = 0.3;
    for omega in [-1.2, -0.5, 0.0, 1.0] {
        let z = C::new(omega, g / 2.0);
        let t21 = C::new(0.0, g) / (z * z - 1.0);
        let t11 = C::new(0.0, -g) * z / (z * z - 1.0);
        let r = transmission(&h, &DecaySpec::Uniform(g), omega, &SiteIndex::new(0, 0, 0)).unwrap();
        assert!((r.amplitudes[1] - t21).norm() < 1e-13);
        assert!((r.amplitudes[0] - t11).norm() < 1e-13);
    }
}

#[test]
fn decoupled_array_gives_one_lorentzian_per_input() {
    let spec = LatticeSpec::cylinder(3, -2, 2, 1).unwrap();
    let h = Model::<f64>::Decoupled.build(&spec).unwrap();
    let g = 0.1;
    let inputs = column_inputs(&spec, 0);
    let spec_vals = total_transmission_spectrum(&h, &DecaySpec::Uniform(g), &inputs, &[-0.2, 0.0, 0.05]).unwrap();
    for (omega, t) in spec_vals {
        let lorentz = g * g / (omega * omega + g * g / 4.0);
        assert!((t - 3.0 * lorentz).abs() < 1e-12);
    }
}

#[test]
fn solver_backends_agree() {
    let spec = LatticeSpec::cylinder(5, -4, 4, 1).unwrap();
    let h = landau(&spec, 1, 5);
    let decay = DecaySpec::Uniform(0.1);
    let input = spec.flat_index(&SiteIndex::new(2, 0, 0)).unwrap();
    let runs: Vec<Vec<C>> = [SolverKind::Spectral, SolverKind::Direct, SolverKind::Iterative]
        .into_iter()
        .map(|k| Propagator::new(&h, &decay, k).unwrap().amplitudes(-1.3, &[input]).unwrap().remove(0))
        .collect();
    for r in &runs[1..] {
        let err = r.iter().zip(&runs[0]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
    let prop = Propagator::new(&h, &decay, SolverKind::Direct).unwrap();
    let x = prop.solve(-1.3, &[input]).unwrap().remove(0);
    assert!(prop.residual(-1.3, input, &x) < 1e-10);
}

#[test]
fn fast_total_matches_summed_intensities() {
    let spec = LatticeSpec::cylinder(4, -3, 3, 2).unwrap();
    let h = Model::<f64>::Qsh { beta0: 0.1, lambda0: 0.2 }.build(&spec).unwrap();
    let decay = DecaySpec::Uniform(0.15);
    let inputs = [0, 5, 17];
    let spectral = Propagator::new(&h, &decay, SolverKind::Spectral).unwrap();
    let direct = Propagator::new(&h, &decay, SolverKind::Direct).unwrap();
    for omega in [-2.0, -0.4, 0.9] {
        let a = spectral.total_transmission(omega, &inputs).unwrap();
        let b: f64 = direct.amplitudes(omega, &inputs).unwrap().iter().flatten().map(|v| v.norm_sqr()).sum();
        assert!((a - b).abs() < 1e-10 * b.max(1.0));
    }
}

#[test]
fn spectral_requires_uniform_loss() {
    let spec = LatticeSpec::cylinder(2, 0, 1, 1).unwrap();
    let h = landau(&spec, 0, 1);
    let per = DecaySpec::PerMode(vec![0.1, 0.2, 0.1, 0.1]);
    assert!(Propagator::new(&h, &per, SolverKind::Spectral).is_err());
    assert!(Propagator::new(&h, &DecaySpec::Uniform(0.0), SolverKind::Auto).is_err());
    assert!(Propagator::new(&h, &DecaySpec::PerMode(vec![0.1; 3]), SolverKind::Auto).is_err());
    assert!(Propagator::new(&h, &DecaySpec::PerMode(vec![0.1, -0.1, 0.1, 0.1]), SolverKind::Auto).is_err());
}

#[test]
fn peaks_sit_within_gamma_of_eigenvalues() {
    let spec = LatticeSpec::cylinder(3, -1, 1, 1).unwrap();
    let h = landau(&spec, 1, 3);
    let g = 0.05;
    let energies: Vec<f64> = h.eigenvalues().unwrap();
    let all: Vec<SiteIndex> = (0..spec.dim()).map(|i| spec.site_of(i).unwrap()).collect();
    let grid = linspace(-4.0, 4.0, 4001);
    let t = total_transmission_spectrum(&h, &DecaySpec::Uniform(g), &all, &grid).unwrap();
    for k in 1..t.len() - 1 {
        if t[k].1 > t[k - 1].1 && t[k].1 > t[k + 1].1 {
            let d = energies.iter().map(|e| (e - t[k].0).abs()).fold(f64::INFINITY, f64::min);
            assert!(d <= g, "peak at {} is {d} from the spectrum", t[k].0);
        }
    }
}

#[test]
fn column_total_equals_broadened_dos_per_oam_row() {
    // Periodic OAM direction: each row l contributes equally, so summing the
    // l = 0 column gives γ² Σ_k 1/((ω − E_k)² + γ²/4) divided by n_l.
    let spec = LatticeSpec::cylinder(4, -4, 3, 1).unwrap();
    let g = 0.2;
    let grid = linspace(-3.5, 3.5, 15);
    let phis = [Flux::new(1, 4).unwrap(), Flux::new(1, 2).unwrap()];
    let b = butterfly_scan(&spec, &phis, &grid, &DecaySpec::Uniform(g)).unwrap();
    for (row, phi) in b.values.iter().zip(&phis) {
        let e: Vec<f64> = Model::<f64>::Landau { phi0: *phi }.build(&spec).unwrap().eigenvalues().unwrap();
        for (t, omega) in row.iter().zip(&grid) {
            let dos: f64 = e.iter().map(|x| g * g / ((omega - x).powi(2) + g * g / 4.0)).sum();
            assert!((t - dos / spec.n_l() as f64).abs() < 1e-9 * dos.max(1.0));
        }
    }
}

#[test]
fn default_grid_covers_the_band() {
    let g: Vec<f64> = default_omega_grid();
    assert_eq!(g.len(), 400);
    assert_eq!(g[0], -4.5);
    assert!((g[399] - 4.5).abs() < 1e-12);
}

#[test]
fn f32_scattering_tracks_f64() {
    let spec = LatticeSpec::cylinder(3, -2, 2, 1).unwrap();
    let h64 = landau(&spec, 1, 3);
    let h32 = Model::<f32>::Landau { phi0: Flux::new(1, 3).unwrap() }.build(&spec).unwrap();
    let a = transmission(&h64, &DecaySpec::Uniform(0.2), -1.0, &SiteIndex::new(1, 0, 0)).unwrap();
    let b = transmission(&h32, &DecaySpec::Uniform(0.2f32), -1.0, &SiteIndex::new(1, 0, 0)).unwrap();
    for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
        assert!((x.re - y.re as f64).abs() < 1e-4 && (x.im - y.im as f64).abs() < 1e-4);
    }
}

fn arb_model() -> impl Strategy<Value = (Model<f64>, LatticeSpec)> {
    let flux = (0i64..7, 1i64..8).prop_filter_map("reduced", |(p, q)| Flux::new(p % q, q).ok());
    (flux, 2usize..5, 1i64..4, any::<bool>(), 0u8..4, -0.3f64..0.3, -0.5f64..0.5).prop_map(|(phi0, n, w, py, kind, beta0, lam)| {
        let by = if py { Boundary::Periodic } else { Boundary::Open };
        let model = match kind {
            0 => Model::Landau { phi0 },
            1 => Model::OamGauge { phi0 },
            2 => Model::Dirac { phi0 },
            _ => Model::Qsh { beta0, lambda0: lam },
        };
        let spec = LatticeSpec::new(n, -w, w, model.spin_dim().unwrap(), Boundary::Open, by).unwrap();
        (model, spec)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn s_matrix_rows_are_unit_norm((model, spec) in arb_model(), omega in -4.5f64..4.5, g in 0.02f64..1.0, pick in 0usize..1000) {
        let h = model.build(&spec).unwrap();
        let input = spec.site_of(pick % spec.dim()).unwrap();
        let row = s_matrix_row(&h, &DecaySpec::Uniform(g), omega, &input).unwrap();
        let norm: f64 = row.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-9, "row norm {}", norm);
    }

    #[test]
    fn flux_reversal_swaps_source_and_detector(p in 1i64..5, q in 2i64..7, a in 0usize..1000, b in 0usize..1000, omega in -3.0f64..3.0) {
        prop_assume!(num_integer::gcd(p, q) == 1 && p < q);
        let spec = LatticeSpec::cylinder(3, -2, 2, 1).unwrap();
        let fwd = landau(&spec, p, q);
        let rev = landau(&spec, q - p, q);
        let (ia, ib) = (a % spec.dim(), b % spec.dim());
        let decay = DecaySpec::Uniform(0.1);
        let t_ab = Propagator::new(&fwd, &decay, SolverKind::Direct).unwrap().amplitudes(omega, &[ia]).unwrap()[0][ib];
        let t_ba = Propagator::new(&rev, &decay, SolverKind::Direct).unwrap().amplitudes(omega, &[ib]).unwrap()[0][ia];
        prop_assert!((t_ab - t_ba).norm() < 1e-10);
    }

    #[test]
    fn per_mode_loss_keeps_s_unitary(g1 in 0.05f64..0.5, g2 in 0.05f64..0.5) {
        let spec = LatticeSpec::cylinder(2, -1, 1, 1).unwrap();
        let h = landau(&spec, 1, 2);
        let rates: Vec<f64> = (0..spec.dim()).map(|i| if i % 2 == 0 { g1 } else { g2 }).collect();
        let prop = Propagator::new(&h, &DecaySpec::PerMode(rates), SolverKind::Direct).unwrap();
        for a in 0..spec.dim() {
            let t = prop.amplitudes(0.3, &[a]).unwrap().remove(0);
            let mut s = t.clone();
            s[a] += C::new(1.0, 0.0);
            let norm: f64 = s.iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn linspace_endpoints() {
    let v: Vec<f64> = linspace(0.0, 1.0, 5);
    assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
}
