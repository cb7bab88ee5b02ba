use num_complex::Complex64;
use qfield::maxwell3d::{
    divergence_check, hamiltonian_3d_expectation, polarization_basis, FieldModel3D, KGrid,
    LatticeMode,
};
use qfield::observables::{coherent_state, Vec3};
use qfield::verify::{check_curl, check_energy_3d, Energy3dParams, Fd3dParams};
use qfield::{Medium, MultiModeState, Polarization};

fn model() -> FieldModel3D {
    FieldModel3D::new(Medium::natural(), KGrid::new(1.0, 2).unwrap())
}

fn mode(k: [i32; 3], p: Polarization) -> usize {
    LatticeMode::new(k, p)
        .index(&KGrid::new(1.0, 2).unwrap())
        .unwrap()
}

#[test]
fn axis_aligned_plane_wave_is_divergence_free_to_roundoff() {
    let m = model();
    let s = coherent_state(
        m.grid,
        2,
        &[(
            mode([1, 0, 0], Polarization::Two),
            Complex64::new(0.01, 0.0),
        )],
    )
    .unwrap();
    let points = [Vec3::new(0.1, 0.2, 0.3), Vec3::new(-1.0, 2.0, 0.5)];
    let r = divergence_check(&m, &s, &points, 1e-3, 0.4).unwrap();
    assert!(r.max_div_e <= 1e-10 && r.max_div_b <= 1e-10, "{r:?}");
}

#[test]
fn single_photon_energy_in_a_medium() {
    let medium = Medium::new(2.0, 1.5, 1.0, 1.0).unwrap();
    let m = FieldModel3D::new(medium, KGrid::new(0.5, 1).unwrap());
    let idx = LatticeMode::new([1, -1, 1], Polarization::One)
        .index(&m.grid)
        .unwrap();
    let s = MultiModeState::fock(m.grid, 1, &[(idx, 1)]).unwrap();
    // omega = |k| / sqrt(eps mu), |k| = 0.5 sqrt(3)
    let omega = 0.5 * 3f64.sqrt() / 3f64.sqrt();
    let e = hamiltonian_3d_expectation(&s, &medium).unwrap();
    assert!((e.excitation_energy - omega).abs() < 1e-15);
    let r = check_energy_3d(
        &m,
        &s,
        &Energy3dParams {
            points_per_axis: 6,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(r.pass, "{r:?}");
    // too few points alias the k + k' harmonics
    assert!(check_energy_3d(
        &m,
        &s,
        &Energy3dParams {
            points_per_axis: 4,
            ..Default::default()
        }
    )
    .is_err());
}

#[test]
fn curl_equations_converge_for_superposed_waves() {
    let m = model();
    let s = coherent_state(
        m.grid,
        2,
        &[
            (
                mode([2, 1, 0], Polarization::One),
                Complex64::new(0.01, 0.0),
            ),
            (
                mode([-1, 1, 2], Polarization::Two),
                Complex64::new(0.0, 0.01),
            ),
        ],
    )
    .unwrap();
    let r = check_curl(&m, &s, &Fd3dParams::default(), 5).unwrap();
    assert!(r.pass && r.order.unwrap() > 1.9, "{r:?}");
}

#[test]
fn polarization_basis_is_right_handed_off_axis() {
    for k in [
        Vec3::new(0.3, -2.0, 1.1),
        Vec3::new(0.0, 0.0, -4.0),
        Vec3::new(1e-12, 0.0, 1.0),
    ] {
        let (e1, e2) = polarization_basis(&k).unwrap();
        let k_hat = k.normalize();
        assert!((e1.cross(&e2) - k_hat).norm() < 1e-14);
        assert!(e1.dot(&k_hat).abs() < 1e-15 && e2.dot(&k_hat).abs() < 1e-15);
    }
    assert!(polarization_basis(&Vec3::zeros()).is_err());
}
