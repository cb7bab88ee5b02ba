//! Three-dimensional field on a cubic wave-vector lattice.
//!
//! Lattice points are `k = dk * (i, j, l)` with integer components in
//! `[-N, N]` and the origin removed, so the set is closed under `k -> -k`.
//! Each point carries two transverse polarizations. The continuum integral
//! `int d^3k` becomes `sum dk^3` and `a(k) -> a_k / dk^{3/2}`, giving the
//! per-mode amplitude
//!
//! ```text
//! dk^{3/2} sqrt(hbar omega_k / 2 eps) / (2 pi)^{3/2}
//! ```
//!
//! With the `e^{-i k.r} a_k` convention a `(k, lambda)` excitation travels
//! along `-k`. The periodic box of side `2 pi / dk` makes all lattice plane
//! waves orthogonal, and the spatial energy quadrature over it yields
//! `hbar omega_k` per photon with unit constant.
//!
//! Memory: the universe holds `2((2N+1)^3 - 1)` modes (248 for N = 2);
//! sparse states only store occupied tuples, but operators that sum over
//! all modes (e.g. [`crate::observables::apply_field_component`]) scale
//! with the lattice size.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QfieldError, Result};
use crate::fock::MultiModeState;
use crate::hamiltonian::{energy_expectation, EnergyReport};
use crate::medium::Medium;
use crate::modes::{ModeUniverse, Polarization};
use crate::observables::{FieldModel, ModeCoefficient, Snapshot, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    k_spacing: f64,
    half_extent: u32,
}

impl KGrid {
    pub fn new(k_spacing: f64, half_extent: u32) -> Result<Self> {
        if !(k_spacing.is_finite() && k_spacing > 0.0) {
            return Err(QfieldError::InvalidParameter(format!(
                "k_spacing must be > 0, got {k_spacing}"
            )));
        }
        if half_extent == 0 {
            return Err(QfieldError::InvalidParameter(
                "half_extent must be >= 1".into(),
            ));
        }
        Ok(Self {
            k_spacing,
            half_extent,
        })
    }

    pub fn k_spacing(&self) -> f64 {
        self.k_spacing
    }

    pub fn half_extent(&self) -> u32 {
        self.half_extent
    }

    fn side(&self) -> usize {
        2 * self.half_extent as usize + 1
    }

    pub fn point_count(&self) -> usize {
        self.side().pow(3) - 1
    }

    pub fn mode_count(&self) -> usize {
        2 * self.point_count()
    }

    /// Side of the periodic box in which all lattice plane waves are orthogonal.
    pub fn box_length(&self) -> f64 {
        2.0 * PI / self.k_spacing
    }

    /// Integer lattice point number `p` in lexicographic order.
    pub fn point(&self, p: usize) -> [i32; 3] {
        let side = self.side();
        let center = side.pow(3) / 2;
        let linear = if p >= center { p + 1 } else { p };
        let n = self.half_extent as i32;
        [
            (linear / (side * side)) as i32 - n,
            ((linear / side) % side) as i32 - n,
            (linear % side) as i32 - n,
        ]
    }

    pub fn point_index(&self, k: [i32; 3]) -> Result<usize> {
        let n = self.half_extent as i32;
        if k.iter().any(|&c| c.abs() > n) || k == [0, 0, 0] {
            return Err(QfieldError::InvalidParameter(format!(
                "lattice point {k:?} outside [-{n}, {n}]^3 minus origin"
            )));
        }
        let side = self.side();
        let linear =
            ((k[0] + n) as usize * side + (k[1] + n) as usize) * side + (k[2] + n) as usize;
        let center = side.pow(3) / 2;
        Ok(if linear > center { linear - 1 } else { linear })
    }

    pub fn points(&self) -> impl Iterator<Item = [i32; 3]> + '_ {
        (0..self.point_count()).map(|p| self.point(p))
    }

    pub fn wave_vector(&self, k: [i32; 3]) -> Vec3 {
        Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64) * self.k_spacing
    }

    /// `(lattice point, polarization)` of mode `index`.
    pub fn mode_at(&self, index: usize) -> ([i32; 3], Polarization) {
        let pol = if index & 1 == 0 {
            Polarization::One
        } else {
            Polarization::Two
        };
        (self.point(index / 2), pol)
    }
}

/// A 3D mode `(k, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeMode {
    pub k: [i32; 3],
    pub polarization: Polarization,
}

impl LatticeMode {
    pub fn new(k: [i32; 3], polarization: Polarization) -> Self {
        Self { k, polarization }
    }

    pub fn index(&self, grid: &KGrid) -> Result<usize> {
        let p = grid.point_index(self.k)?;
        Ok(2 * p + (self.polarization.number() as usize - 1))
    }

    pub fn from_index(grid: &KGrid, index: usize) -> Result<Self> {
        if index >= grid.mode_count() {
            return Err(QfieldError::ModeOutOfRange {
                index,
                count: grid.mode_count(),
            });
        }
        let (k, polarization) = grid.mode_at(index);
        Ok(Self { k, polarization })
    }

    /// `"k(1,-2,0)λ1"`
    pub fn label(&self) -> String {
        format!(
            "k({},{},{})λ{}",
            self.k[0],
            self.k[1],
            self.k[2],
            self.polarization.number()
        )
    }

    pub fn parse(label: &str) -> Result<Self> {
        let bad = || QfieldError::InvalidLabel(label.to_string());
        let rest = label.strip_prefix("k(").ok_or_else(bad)?;
        let (coords, pol) = rest.split_once(")λ").ok_or_else(bad)?;
        let parts: Vec<i32> = coords
            .split(',')
            .map(|c| c.trim().parse::<i32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if parts.len() != 3 {
            return Err(bad());
        }
        let polarization = pol
            .parse::<u8>()
            .ok()
            .and_then(Polarization::from_number)
            .ok_or_else(bad)?;
        Ok(Self {
            k: [parts[0], parts[1], parts[2]],
            polarization,
        })
    }
}

/// Deterministic transverse basis `(e1, e2)` with `(e1, e2, k_hat)`
/// right-handed: `e1 = normalize(k_hat x z)` away from the z axis, `x`
/// projected transverse to `k_hat` near it (exactly `x` on it), and
/// `e2 = k_hat x e1`.
pub fn polarization_basis(k: &Vec3) -> Result<(Vec3, Vec3)> {
    let norm = k.norm();
    if !(norm > 0.0) {
        return Err(QfieldError::ZeroWaveVector);
    }
    let k_hat = k / norm;
    let c = k_hat.cross(&Vec3::z());
    let e1 = if c.norm() > 1e-9 {
        c.normalize()
    } else {
        (Vec3::x() - k_hat * k_hat.x).normalize()
    };
    let e2 = k_hat.cross(&e1);
    Ok((e1, e2))
}

/// The 3D field of a medium on a wave-vector lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldModel3D {
    pub medium: Medium,
    pub grid: KGrid,
}

impl FieldModel3D {
    pub fn new(medium: Medium, grid: KGrid) -> Self {
        Self { medium, grid }
    }

    pub fn omega(&self, k: &Vec3) -> f64 {
        self.medium.dispersion_omega(k.norm())
    }

    /// Per-mode electric amplitude.
    pub fn amplitude(&self, k: &Vec3) -> f64 {
        let dk = self.grid.k_spacing;
        dk.powf(1.5) * (self.medium.hbar() * self.omega(k) / (2.0 * self.medium.epsilon())).sqrt()
            / (2.0 * PI).powf(1.5)
    }

    pub fn field_expectation_3d(
        &self,
        state: &MultiModeState,
        r: &Vec3,
        t: f64,
        with_squares: bool,
    ) -> Result<crate::observables::FieldSample> {
        crate::observables::field_expectation(self, state, r, t, with_squares)
    }
}

impl FieldModel for FieldModel3D {
    fn medium(&self) -> &Medium {
        &self.medium
    }

    fn universe(&self) -> ModeUniverse {
        ModeUniverse::Lattice(self.grid)
    }

    fn coefficient(&self, mode: usize, r: &Vec3) -> ModeCoefficient {
        let (kp, pol) = self.grid.mode_at(mode);
        let k = self.grid.wave_vector(kp);
        let (e1, e2) = polarization_basis(&k).expect("lattice excludes k = 0");
        let e_dir = match pol {
            Polarization::One => e1,
            Polarization::Two => e2,
        };
        let amp = self.amplitude(&k);
        let f = Complex64::new(0.0, amp) * Complex64::from_polar(1.0, -k.dot(r));
        let g = -f * self.medium.slowness();
        ModeCoefficient {
            f,
            e_dir,
            g,
            b_dir: (k / k.norm()).cross(&e_dir),
        }
    }
}

/// `sum_{k,lambda} hbar omega_k <n_{k lambda}>` plus the finite-lattice
/// zero-point energy.
pub fn hamiltonian_3d_expectation(state: &MultiModeState, medium: &Medium) -> Result<EnergyReport> {
    state.universe().lattice()?;
    energy_expectation(state, medium, true)
}

/// Central-difference divergence and gradient of both fields at the given points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResidual {
    pub max_div_e: f64,
    pub max_div_b: f64,
    pub max_grad_e: f64,
    pub max_grad_b: f64,
}

impl DivergenceResidual {
    /// `max |div F| / max |grad F|` over both fields; 0 for a zero field.
    pub fn ratio(&self) -> f64 {
        let ratio = |d: f64, g: f64| {
            if g == 0.0 {
                if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                d / g
            }
        };
        ratio(self.max_div_e, self.max_grad_e).max(ratio(self.max_div_b, self.max_grad_b))
    }
}

/// Jacobian `J[i][j] = d_i F_j` by central differences with step `h`.
pub fn fd_jacobian<F: Fn(&Vec3) -> Vec3>(field: F, r: &Vec3, h: f64) -> [[f64; 3]; 3] {
    let mut jac = [[0.0; 3]; 3];
    for (i, row) in jac.iter_mut().enumerate() {
        let mut d = Vec3::zeros();
        d[i] = h;
        let diff = (field(&(r + d)) - field(&(r - d))) / (2.0 * h);
        for (j, v) in row.iter_mut().enumerate() {
            *v = diff[j];
        }
    }
    jac
}

/// Divergence residual of `<E>` and `<B>` at time `t` over `points`,
/// central differences with step `h`.
pub fn divergence_check<M: FieldModel + ?Sized>(
    model: &M,
    state: &MultiModeState,
    points: &[Vec3],
    h: f64,
    t: f64,
) -> Result<DivergenceResidual> {
    if !(h > 0.0) {
        return Err(QfieldError::InvalidParameter("step must be > 0".into()));
    }
    let snap = Snapshot::new(model, state, t, false)?;
    let mut out = DivergenceResidual {
        max_div_e: 0.0,
        max_div_b: 0.0,
        max_grad_e: 0.0,
        max_grad_b: 0.0,
    };
    for r in points {
        let je = fd_jacobian(|p| snap.fields(p).0, r, h);
        let jb = fd_jacobian(|p| snap.fields(p).1, r, h);
        let div = |j: &[[f64; 3]; 3]| (j[0][0] + j[1][1] + j[2][2]).abs();
        let grad = |j: &[[f64; 3]; 3]| j.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        out.max_div_e = out.max_div_e.max(div(&je));
        out.max_div_b = out.max_div_b.max(div(&jb));
        out.max_grad_e = out.max_grad_e.max(grad(&je));
        out.max_grad_b = out.max_grad_b.max(grad(&jb));
    }
    Ok(out)
}
