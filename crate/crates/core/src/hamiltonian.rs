//! Free-field Hamiltonian `H = sum_m hbar omega_m a_m^dag a_m + H_ZPE` on a
//! finite mode universe.
//!
//! The Hamiltonian is diagonal in the Fock basis, so evolution is an exact
//! phase rotation of every basis amplitude. The zero-point energy is carried
//! as a separate scalar and never enters operator applications.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{MultiModeState, Occupation};
use crate::medium::Medium;
use crate::modes::ModeUniverse;

/// Normalization tolerance accepted by expectation-value routines.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `sum_m hbar omega_m <n_m>`
    pub excitation_energy: f64,
    /// `sum_m hbar omega_m / 2` over the enumerated modes (0 when not requested).
    pub zero_point_energy: f64,
    pub total: f64,
}

/// Angular frequency of every mode, indexed like the universe.
pub fn mode_frequencies(universe: &ModeUniverse, medium: &Medium) -> Vec<f64> {
    (0..universe.mode_count())
        .map(|m| universe.omega(m, medium))
        .collect()
}

fn tuple_frequency(occ: &Occupation, omegas: &[f64]) -> f64 {
    occ.iter().map(|(m, n)| omegas[m] * n as f64).sum()
}

/// Finite-grid zero-point energy: half a quantum per enumerated mode.
pub fn zero_point_energy(universe: &ModeUniverse, medium: &Medium) -> f64 {
    0.5 * medium.hbar() * mode_frequencies(universe, medium).iter().sum::<f64>()
}

/// Excitation part of `H psi`: each tuple scaled by `sum_m hbar omega_m n_m`.
pub fn apply_hamiltonian(state: &MultiModeState, medium: &Medium) -> MultiModeState {
    let omegas = mode_frequencies(state.universe(), medium);
    let hbar = medium.hbar();
    state.map_amplitudes(|occ, a| a * (hbar * tuple_frequency(occ, &omegas)))
}

pub fn energy_expectation(
    state: &MultiModeState,
    medium: &Medium,
    include_zpe: bool,
) -> Result<EnergyReport> {
    state.ensure_normalized(NORM_TOLERANCE)?;
    let omegas = mode_frequencies(state.universe(), medium);
    let excitation_energy = medium.hbar()
        * state
            .iter()
            .map(|(occ, a)| a.norm_sqr() * tuple_frequency(occ, &omegas))
            .sum::<f64>();
    let zero_point_energy = if include_zpe {
        0.5 * medium.hbar() * omegas.iter().sum::<f64>()
    } else {
        0.0
    };
    Ok(EnergyReport {
        excitation_energy,
        zero_point_energy,
        total: excitation_energy + zero_point_energy,
    })
}

/// Schrödinger-picture evolution: amplitude of each tuple times
/// `exp(-i t sum_m omega_m n_m)`.
pub fn evolve(state: &MultiModeState, medium: &Medium, t: f64) -> MultiModeState {
    let omegas = mode_frequencies(state.universe(), medium);
    state.map_amplitudes(|occ, a| {
        let phase = -tuple_frequency(occ, &omegas) * t;
        a * Complex64::from_polar(1.0, phase)
    })
}
