use num_complex::Complex64 as C;
use oam_lattice::optics::*;
use std::f64::consts::PI;

fn params(r: f64) -> OpticalParams<f64> {
    OpticalParams::resonant(r, 1.0, 101, 30).unwrap()
}

#[test]
fn beam_splitter_matrix() {
    let m = bs_transfer_matrix(1.0 / 2f64.sqrt()).unwrap();
    let mags = [m[0][0].norm(), m[0][1].norm(), m[1][0].norm(), m[1][1].norm()];
    for (a, b) in mags.iter().zip([2f64.sqrt(), 1.0, 1.0, 2f64.sqrt()]) {
        assert!((a - b).abs() < 1e-14);
    }
    for r in [0.01, 0.3, 0.9] {
        assert!((transfer_determinant(&bs_transfer_matrix(r).unwrap()) - C::new(1.0, 0.0)).norm() < 1e-10);
    }
    assert!(bs_transfer_matrix(0.0).is_err());
    assert!(bs_transfer_matrix(1.0).is_err());
    assert!(bs_transfer_matrix(1e-3).unwrap()[0][0].norm() > 999.0);
}

#[test]
fn field_transfer_determinant_is_the_arm_phase() {
    for r in [0.05, 0.2, 0.6] {
        for (px, py) in [(0.0, 0.0), (0.13, -0.4)] {
            let p = params(r).with_phases(px, py);
            let cases = [(field_transfer_x(&p).unwrap(), px), (field_transfer_y(&p).unwrap(), py), (field_transfer(&p, 3.7, 0.21).unwrap(), 0.21)];
            for (m, phi) in cases {
                let expect = C::from_polar(1.0, -4.0 * PI * phi);
                // ad − bc cancels entries of size ~1/|r|²; compare on that scale.
                let scale = m.iter().flatten().map(|z| z.norm_sqr()).fold(1.0, f64::max);
                let err = (transfer_determinant(&m) - expect).norm() / scale;
                assert!(err < 1e-12, "r = {r}, φ = {phi}: {err}");
            }
        }
    }
}

#[test]
fn anti_resonant_coupler_gives_real_transfer_up_to_phase() {
    // The outer path phases e^{∓ik S_c/8} keep the product real only when
    // k S_c/4 is a multiple of π, so n is even here.
    let p = OpticalParams::resonant(0.1, 1.0, 100, 31).unwrap();
    let m = field_transfer_x(&p).unwrap();
    let entries = [m[0][0], m[0][1], m[1][0], m[1][1]];
    let pivot = entries.iter().fold(C::new(0.0, 0.0), |b, e| if e.norm() > b.norm() { *e } else { b });
    let phase = pivot.conj() / pivot.norm();
    for e in entries {
        assert!((e * phase).im.abs() < 1e-12 * pivot.norm(), "{e}");
    }
}

#[test]
fn band_bottom_is_minus_four_kappa() {
    let p = params(0.1);
    let kappa = coupling_strength(&p);
    let d = bloch_dispersion(&p, 0.0, 0.0).unwrap();
    assert!((d + 4.0 * kappa).abs() < 4.0 * kappa * 0.01 * 1.5, "{d} vs {}", -4.0 * kappa);
    let top = bloch_dispersion(&p, PI, PI).unwrap();
    assert!((top - 4.0 * kappa).abs() < 4.0 * kappa * 0.015);
}

#[test]
fn even_parity_is_rejected() {
    assert!(OpticalParams::<f64>::resonant(0.1, 1.0, 100, 30).is_err());
    assert!(OpticalParams::<f64>::resonant(0.1, 1.0, 0, 1).is_err());
}

#[test]
fn phase_shift_translates_the_surface() {
    let p = params(0.1);
    let shifted = p.with_phases(0.5, 0.0);
    for (kx, ky) in [(0.3, 1.1), (2.0, -0.4)] {
        let a = bloch_dispersion(&shifted, kx + PI, ky).unwrap();
        let b = bloch_dispersion(&p, kx, ky).unwrap();
        assert!((a - b).abs() < 1e-9 * coupling_strength(&p));
    }
}

#[test]
fn coupling_strength_examples() {
    let mut p = params(0.1);
    p.s_c = 1e-9;
    let omega0 = p.omega0();
    assert!((omega0 - 2.0 * PI * 1e9).abs() < 1e-3);
    assert!((coupling_strength(&p) - 5e6).abs() < 1e-6);
    let q = OpticalParams { r_mag: 0.2, ..p };
    assert!((coupling_strength(&q) / coupling_strength(&p) - 4.0).abs() < 1e-12);
}

#[test]
fn dispersion_follows_cosine_band() {
    for r in [0.05, 0.1, 0.2] {
        let check = dispersion_check(&params(r).with_phases(0.1, -0.2), 8).unwrap();
        assert!(check.max_relative_error < r * r, "|r| = {r}: {}", check.max_relative_error);
        assert!((check.kappa_fit / check.kappa - 1.0).abs() < r * r);
    }
}

#[test]
fn degenerate_cavity_condition() {
    let flat = RayMatrix::<f64>::new(1.0, 0.0, 0.0, 1.0).unwrap();
    assert!(flat.is_degenerate());
    let base = degenerate_mode_detuning(0, 0, 1.0, 7.0, &flat).unwrap();
    for (p, l) in [(1, 0), (0, 5), (3, -7)] {
        assert!((degenerate_mode_detuning(p, l, 1.0, 7.0, &flat).unwrap() - base).abs() < 1e-12);
    }
    let quarter = RayMatrix::<f64>::new(0.0, 1.0, -1.0, 0.0).unwrap();
    let a = degenerate_mode_detuning(0, 0, 1.0, 7.0, &quarter).unwrap();
    let b = degenerate_mode_detuning(0, 1, 1.0, 7.0, &quarter).unwrap();
    assert!(((a - b).rem_euclid(2.0 * PI) - PI / 2.0).abs() < 1e-12);
    let inverting = RayMatrix::<f64>::new(-1.0, 0.0, 0.0, -1.0).unwrap();
    let c0 = degenerate_mode_detuning(0, 0, 1.0, 7.0, &inverting).unwrap();
    let c1 = degenerate_mode_detuning(0, 1, 1.0, 7.0, &inverting).unwrap();
    let c2 = degenerate_mode_detuning(0, 2, 1.0, 7.0, &inverting).unwrap();
    assert!(((c0 - c1).rem_euclid(2.0 * PI) - PI).abs() < 1e-12);
    assert!((c0 - c2).abs() < 1e-12);
    let unstable = RayMatrix::<f64>::new(2.0, 1.0, 1.0, 1.0).unwrap();
    assert!(matches!(degenerate_mode_detuning(0, 0, 1.0, 1.0, &unstable), Err(oam_lattice::Error::UnstableCavity(_))));
    assert!(RayMatrix::<f64>::new(1.0, 1.0, 1.0, 1.0).is_err());
    let composed = quarter.compose(&quarter);
    assert!((composed.a + 1.0).abs() < 1e-15 && (composed.d + 1.0).abs() < 1e-15);
}
