use std::f64::consts::PI;

use num_complex::Complex64;
use qfield::hamiltonian::energy_expectation;
use qfield::observables::{coherent_state, FieldModel1D, Snapshot, Vec3};
use qfield::verify::{
    check_energy_equivalence, check_maxwell_1d, check_translation, EnergyParams, Maxwell1dParams,
    Ordering, TranslationParams,
};
use qfield::{Direction, FrequencyGrid, Medium, ModeId, MultiModeState, Polarization};

fn dielectric() -> FieldModel1D {
    // eps = 4: v = 1/2, dk = 2 d_omega
    FieldModel1D::new(
        Medium::new(4.0, 1.0, 1.0, 1.0).unwrap(),
        FrequencyGrid::new(1.0, 0.5, 6).unwrap(),
    )
}

fn index(model: &FieldModel1D, d: Direction, p: Polarization, f: usize) -> usize {
    ModeId::new(d, p, f).index(&model.grid).unwrap()
}

#[test]
fn energy_in_a_dielectric_matches_photon_count() {
    let model = dielectric();
    let m1 = index(&model, Direction::R, Polarization::Two, 3);
    let m2 = index(&model, Direction::L, Polarization::One, 0);
    let s = MultiModeState::fock(model.grid, 3, &[(m1, 2), (m2, 1)]).unwrap();
    let r = check_energy_equivalence(&model, &s, &EnergyParams::default()).unwrap();
    // 2 * 2.5 + 1 * 1.0
    assert_eq!(param(&r, "target"), 6.0);
    assert!(r.pass, "{r:?}");

    let vac = MultiModeState::vacuum(model.grid, 1).unwrap();
    let full = EnergyParams {
        ordering: Ordering::Full,
        ..Default::default()
    };
    let r = check_energy_equivalence(&model, &vac, &full).unwrap();
    let zpe = 0.5 * 4.0 * (1.0 + 1.5 + 2.0 + 2.5 + 3.0 + 3.5);
    assert!((param(&r, "quadrature") - zpe).abs() < 1e-10 * zpe);
}

#[test]
fn energy_of_interfering_modes_is_additive() {
    // L and R at the same frequency and polarization interfere pointwise but not in the integral
    let model = dielectric();
    let l = index(&model, Direction::L, Polarization::One, 2);
    let r = index(&model, Direction::R, Polarization::One, 2);
    let s = coherent_state(
        model.grid,
        16,
        &[
            (l, Complex64::new(0.8, 0.1)),
            (r, Complex64::new(-0.3, 0.6)),
        ],
    )
    .unwrap();
    let expected = 2.0 * (0.65 + 0.45);
    let report = check_energy_equivalence(
        &model,
        &s,
        &EnergyParams {
            expected: Some(expected),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(report.relative_residual() < 1e-9, "{report:?}");
}

#[test]
fn incommensurate_grid_rejected() {
    let model = FieldModel1D::new(Medium::natural(), FrequencyGrid::new(1.2, 1.0, 3).unwrap());
    let s = MultiModeState::vacuum(model.grid, 1).unwrap();
    assert!(check_energy_equivalence(&model, &s, &EnergyParams::default()).is_err());
}

#[test]
fn coherent_fields_match_closed_form_in_dielectric() {
    let model = dielectric();
    let m = index(&model, Direction::R, Polarization::Two, 1);
    let alpha = Complex64::from_polar(0.9, 0.4);
    let s = coherent_state(model.grid, 20, &[(m, alpha)]).unwrap();
    let omega = 1.5;
    let k = 2.0 * omega;
    let c = (omega * 2.0 * 0.5 / (4.0 * PI * 4.0)).sqrt();
    for (x, t) in [(0.0, 0.0), (0.3, 1.1), (-2.0, 0.25)] {
        let (e, b) = Snapshot::new(&model, &s, t, false)
            .unwrap()
            .fields(&Vec3::new(x, 0.0, 0.0));
        // <E> = 2 Re(alpha i c e^{i(kx - omega t)}) along z
        let ez = -2.0 * 0.9 * c * (k * x - omega * t + 0.4).sin();
        assert!((e.z - ez).abs() < 1e-12, "{} vs {ez}", e.z);
        assert!(e.x.abs() < 1e-15 && e.y.abs() < 1e-15);
        // B along x_hat cross z_hat = -y_hat, magnitude sqrt(eps mu) |E|
        assert!((b.y + 2.0 * ez).abs() < 1e-12);
    }
}

#[test]
fn translation_holds_in_dielectric() {
    let model = dielectric();
    let modes: Vec<(usize, Complex64)> = [1, 3, 5]
        .into_iter()
        .map(|f| {
            (
                index(&model, Direction::R, Polarization::One, f),
                Complex64::new(0.1 * f as f64, 0.05),
            )
        })
        .collect();
    let s = coherent_state(model.grid, 10, &modes).unwrap();
    let r = check_translation(&model, &s, &TranslationParams::default()).unwrap();
    assert!(r.pass, "{r:?}");

    let mixed = coherent_state(
        model.grid,
        8,
        &[
            (
                index(&model, Direction::R, Polarization::One, 0),
                Complex64::new(0.5, 0.0),
            ),
            (
                index(&model, Direction::L, Polarization::One, 0),
                Complex64::new(0.5, 0.0),
            ),
        ],
    )
    .unwrap();
    assert!(check_translation(&model, &mixed, &TranslationParams::default()).is_err());
}

#[test]
fn maxwell_window_validation() {
    let model = dielectric();
    let s = MultiModeState::vacuum(model.grid, 1).unwrap();
    let p = Maxwell1dParams {
        x_window: [0.0, 1e-3],
        ..Default::default()
    };
    assert!(check_maxwell_1d(&model, &s, &p).is_err());
    let (f, a) = check_maxwell_1d(&model, &s, &Maxwell1dParams::default()).unwrap();
    // vacuum: no field, nothing to fit
    assert!(f.pass && a.pass && f.order.is_none());
}

#[test]
fn hamiltonian_energy_of_superposition_is_weighted() {
    let model = dielectric();
    let s = MultiModeState::from_amplitudes(
        model.grid,
        2,
        [
            (qfield::Occupation::vacuum(), Complex64::new(0.6, 0.0)),
            (
                qfield::Occupation::from_pairs([(5, 2)]),
                Complex64::new(0.0, 0.8),
            ),
        ],
    )
    .unwrap();
    let e = energy_expectation(&s, &model.medium, false).unwrap();
    // mode 5 is L1 at omega = 3.5
    assert!((e.excitation_energy - 0.64 * 2.0 * 3.5).abs() < 1e-15);
}

fn param(r: &qfield::verify::ResidualReport, key: &str) -> f64 {
    r.params[key].as_f64().unwrap()
}
