//! Sparse Fock-space operations against dense Kronecker-product matrices
//! built independently here.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qfield::observables::{
    apply_field_component, coherent_state, FieldKind, FieldModel, FieldModel1D, Vec3,
};
use qfield::{FrequencyGrid, Medium, MultiModeState, Occupation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

fn ladder(dim: usize) -> DMatrix<C> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            C::new((j as f64).sqrt(), 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
}

fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

/// Dense basis index of an occupation over `modes`, first mode most significant.
fn dense_index(occ: &Occupation, modes: &[usize], dim: usize) -> usize {
    modes
        .iter()
        .fold(0, |acc, &m| acc * dim + occ.get(m) as usize)
}

fn occupation_of(index: usize, modes: &[usize], dim: usize) -> Occupation {
    let mut rest = index;
    let mut pairs = vec![(0usize, 0u32); modes.len()];
    for (slot, &m) in modes.iter().enumerate().rev() {
        pairs[slot] = (m, (rest % dim) as u32);
        rest /= dim;
    }
    Occupation::from_pairs(pairs)
}

fn to_dense(s: &MultiModeState, modes: &[usize], dim: usize) -> DVector<C> {
    let mut v = DVector::from_element(dim.pow(modes.len() as u32), C::new(0.0, 0.0));
    for (occ, a) in s.iter() {
        v[dense_index(occ, modes, dim)] = *a;
    }
    v
}

fn random_state(
    rng: &mut ChaCha8Rng,
    grid: FrequencyGrid,
    n_max: u32,
    modes: &[usize],
) -> MultiModeState {
    let dim = n_max as usize + 1;
    let terms = (0..dim.pow(modes.len() as u32)).map(|i| {
        (
            occupation_of(i, modes, dim),
            C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    });
    MultiModeState::from_amplitudes(grid, n_max, terms)
        .unwrap()
        .normalized()
        .unwrap()
}

#[test]
fn ladder_operators_match_kronecker_matrices() {
    let grid = FrequencyGrid::new(1.0, 1.0, 1).unwrap();
    let n_max = 4;
    let dim = 5;
    let modes = [0, 1];
    let id = DMatrix::<C>::identity(dim, dim);
    let a = ladder(dim);
    let dense_a = [kron(&a, &id), kron(&id, &a)];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let psi = random_state(&mut rng, grid, n_max, &modes);
        let v = to_dense(&psi, &modes, dim);
        for (slot, &m) in modes.iter().enumerate() {
            let lowered = to_dense(&psi.annihilate(m).unwrap(), &modes, dim);
            assert!((lowered - &dense_a[slot] * &v).norm() < 1e-14);

            let raised = psi.create(m).unwrap();
            let expected = dense_a[slot].adjoint() * &v;
            assert!((to_dense(&raised.value, &modes, dim) - expected).norm() < 1e-14);
            // what the truncated matrix drops: sqrt(n_max + 1) times the amplitudes at the cap
            let lost: f64 = psi
                .iter()
                .filter(|(occ, _)| occ.get(m) == n_max)
                .map(|(_, a)| (n_max as f64 + 1.0) * a.norm_sqr())
                .sum();
            assert!((raised.lost_norm_sqr - lost).abs() < 1e-13);

            let number = to_dense(&psi.number(m).unwrap(), &modes, dim);
            let dense_n = dense_a[slot].adjoint() * &dense_a[slot];
            assert!((number - dense_n * &v).norm() < 1e-13);
        }
    }
}

#[test]
fn field_operator_is_hermitian_and_vacuum_variance_matches() {
    let medium = Medium::new(2.25, 1.0, 1.0, 0.5).unwrap();
    let grid = FrequencyGrid::new(1.5, 0.5, 1).unwrap();
    let model = FieldModel1D::new(medium, grid);
    let n_max = 2;
    let dim: usize = 3;
    let modes = [0, 1, 2, 3];
    let size = dim.pow(4);
    let r = Vec3::new(0.37, 0.0, 0.0);
    let mut vacuum_sq = 0.0;
    for kind in [FieldKind::Electric, FieldKind::Magnetic] {
        let mut total = 0.0;
        for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
            let mut m = DMatrix::from_element(size, size, C::new(0.0, 0.0));
            for col in 0..size {
                let basis = MultiModeState::from_amplitudes(
                    grid,
                    n_max,
                    [(occupation_of(col, &modes, dim), C::new(1.0, 0.0))],
                )
                .unwrap();
                let image = apply_field_component(&model, &basis, &r, kind, &axis).unwrap();
                m.set_column(col, &to_dense(&image, &modes, dim));
            }
            assert!((&m - m.adjoint()).norm() < 1e-14);
            let vac = DVector::from_fn(size, |i, _| {
                if i == 0 {
                    C::new(1.0, 0.0)
                } else {
                    C::new(0.0, 0.0)
                }
            });
            total += (vac.adjoint() * &m * &m * &vac)[(0, 0)].re;
        }
        if kind == FieldKind::Electric {
            vacuum_sq = total;
        }
        let (e, b) = model.vacuum_squares();
        let expected = if kind == FieldKind::Electric { e } else { b };
        assert!((total - expected).abs() < 1e-14 * expected.max(1.0));
    }
    // four modes at omega = 1.5, each with c^2 = hbar omega sqrt(eps mu) d_omega / (4 pi eps A)
    let c2 = 1.5 * 1.5 * 0.5 / (4.0 * PI * 2.25 * 0.5);
    assert!((vacuum_sq - 4.0 * c2).abs() < 1e-14);
}

#[test]
fn coherent_amplitudes_follow_poisson_series() {
    let grid = FrequencyGrid::new(1.0, 1.0, 2).unwrap();
    let alpha = C::new(0.7, -0.4);
    let beta = C::new(-0.2, 0.3);
    let n_max = 14;
    let s = coherent_state(grid, n_max, &[(1, alpha), (6, beta)]).unwrap();
    let single = |z: C, n: u32| {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        (-0.5 * z.norm_sqr()).exp() * z.powu(n) / fact.sqrt()
    };
    let kept: f64 = [alpha, beta]
        .iter()
        .map(|z| (0..=n_max).map(|n| single(*z, n).norm_sqr()).sum::<f64>())
        .product();
    for n in 0..=n_max {
        for m in 0..=n_max {
            let occ = Occupation::from_pairs([(1, n), (6, m)]);
            let expected = single(alpha, n) * single(beta, m) / kept.sqrt();
            assert!((s.amplitude(&occ) - expected).norm() < 1e-15);
        }
    }
    let mean = s.inner(&s.annihilate(1).unwrap()).unwrap();
    assert!((mean - alpha).norm() < 1e-10);
}

#[test]
fn vacuum_squares_sum_analytic_amplitudes() {
    let medium = Medium::new(3.0, 0.5, 2.0, 0.1).unwrap();
    let grid = FrequencyGrid::new(0.5, 0.25, 6).unwrap();
    let model = FieldModel1D::new(medium, grid);
    let slowness = (3.0f64 * 0.5).sqrt();
    let expected_e: f64 = (0..6)
        .map(|i| {
            let omega = 0.5 + 0.25 * i as f64;
            4.0 * 2.0 * omega * slowness * 0.25 / (4.0 * PI * 3.0 * 0.1)
        })
        .sum();
    let (e, b) = model.vacuum_squares();
    assert!((e - expected_e).abs() < 1e-13 * expected_e);
    assert!((b - 1.5 * expected_e).abs() < 1e-13 * expected_e);
}
