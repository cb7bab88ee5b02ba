//! Discretization of the photon mode continuum.
//!
//! The 1D field is labelled by direction (L/R), polarization (1/2) and a
//! positive frequency. Frequencies live on a uniform grid
//! `omega_m = omega_min + m * delta_omega`. Grid ladder operators are
//! Kronecker-normalized, `[a_m, a_n^dag] = delta_mn`, and relate to the
//! delta-normalized continuum operators through `a(omega_m) ~ a_m / sqrt(delta_omega)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QfieldError, Result};
use crate::maxwell3d::{KGrid, LatticeMode};
use crate::medium::Medium;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omega_min: f64,
    delta_omega: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, delta_omega: f64, count: usize) -> Result<Self> {
        if !(omega_min.is_finite() && omega_min > 0.0) {
            return Err(QfieldError::InvalidParameter(format!(
                "omega_min must be > 0, got {omega_min}"
            )));
        }
        if !(delta_omega.is_finite() && delta_omega > 0.0) {
            return Err(QfieldError::InvalidParameter(format!(
                "delta_omega must be > 0, got {delta_omega}"
            )));
        }
        if count == 0 {
            return Err(QfieldError::InvalidParameter("count must be >= 1".into()));
        }
        Ok(Self {
            omega_min,
            delta_omega,
            count,
        })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn omega(&self, freq_index: usize) -> f64 {
        self.omega_min + freq_index as f64 * self.delta_omega
    }

    pub fn omega_max(&self) -> f64 {
        self.omega(self.count - 1)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|m| self.omega(m))
    }

    /// Wavenumber spacing `sqrt(eps mu) * delta_omega`.
    pub fn delta_k(&self, medium: &Medium) -> f64 {
        medium.slowness() * self.delta_omega
    }

    /// Length of the periodic window over which all grid plane waves are
    /// mutually orthogonal, `D = 2 pi / delta_k`.
    pub fn orthogonality_length(&self, medium: &Medium) -> f64 {
        2.0 * std::f64::consts::PI / self.delta_k(medium)
    }

    /// True when `2 omega_min / delta_omega` is an integer, so that sums
    /// `k_m + k_n` are also multiples of `delta_k` and counter-propagating
    /// products integrate to zero over the orthogonality window.
    pub fn is_commensurate(&self) -> bool {
        let r = 2.0 * self.omega_min / self.delta_omega;
        (r - r.round()).abs() <= 1e-9 * r.max(1.0)
    }

    /// `1 / sqrt(delta_omega)`: continuum amplitude per unit grid amplitude.
    pub fn continuum_to_grid_amplitude(&self) -> f64 {
        1.0 / self.delta_omega.sqrt()
    }

    pub fn mode_count(&self) -> usize {
        4 * self.count
    }

    /// All modes in canonical order: direction, then polarization, then frequency.
    pub fn enumerate_modes(&self) -> Vec<ModeId> {
        let mut out = Vec::with_capacity(self.mode_count());
        for direction in [Direction::L, Direction::R] {
            for polarization in [Polarization::One, Polarization::Two] {
                for freq_index in 0..self.count {
                    out.push(ModeId {
                        direction,
                        polarization,
                        freq_index,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Travels towards -x.
    L,
    /// Travels towards +x.
    R,
}

impl Direction {
    /// Sign of the propagation direction along x.
    pub fn propagation_sign(self) -> f64 {
        match self {
            Direction::L => -1.0,
            Direction::R => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::L => Direction::R,
            Direction::R => Direction::L,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    One,
    Two,
}

impl Polarization {
    pub fn number(self) -> u8 {
        match self {
            Polarization::One => 1,
            Polarization::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Polarization::One),
            2 => Some(Polarization::Two),
            _ => None,
        }
    }
}

/// A 1D photon mode `(X, lambda, omega_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub direction: Direction,
    pub polarization: Polarization,
    pub freq_index: usize,
}

impl ModeId {
    pub fn new(direction: Direction, polarization: Polarization, freq_index: usize) -> Self {
        Self {
            direction,
            polarization,
            freq_index,
        }
    }

    /// Position in [`FrequencyGrid::enumerate_modes`].
    pub fn index(&self, grid: &FrequencyGrid) -> Result<usize> {
        if self.freq_index >= grid.count {
            return Err(QfieldError::ModeOutOfRange {
                index: self.freq_index,
                count: grid.count,
            });
        }
        let block = match (self.direction, self.polarization) {
            (Direction::L, Polarization::One) => 0,
            (Direction::L, Polarization::Two) => 1,
            (Direction::R, Polarization::One) => 2,
            (Direction::R, Polarization::Two) => 3,
        };
        Ok(block * grid.count + self.freq_index)
    }

    pub fn from_index(grid: &FrequencyGrid, index: usize) -> Result<Self> {
        if index >= grid.mode_count() {
            return Err(QfieldError::ModeOutOfRange {
                index,
                count: grid.mode_count(),
            });
        }
        let (block, freq_index) = (index / grid.count, index % grid.count);
        let direction = if block < 2 {
            Direction::L
        } else {
            Direction::R
        };
        let polarization = if block % 2 == 0 {
            Polarization::One
        } else {
            Polarization::Two
        };
        Ok(Self {
            direction,
            polarization,
            freq_index,
        })
    }

    /// `"L1@ω=1.5"` style label.
    pub fn label(&self, grid: &FrequencyGrid) -> String {
        format!(
            "{:?}{}@ω={}",
            self.direction,
            self.polarization.number(),
            grid.omega(self.freq_index)
        )
    }

    /// Parses `"L1@ω=1.5"` (frequency matched to the grid within 1e-9
    /// relative) or `"L1#3"` (explicit frequency index).
    pub fn parse(label: &str, grid: &FrequencyGrid) -> Result<Self> {
        let bad = || QfieldError::InvalidLabel(label.to_string());
        let mut chars = label.chars();
        let direction = match chars.next() {
            Some('L') => Direction::L,
            Some('R') => Direction::R,
            _ => return Err(bad()),
        };
        let polarization = chars
            .next()
            .and_then(|c| c.to_digit(10))
            .and_then(|d| Polarization::from_number(d as u8))
            .ok_or_else(bad)?;
        let rest = chars.as_str();
        let freq_index = if let Some(idx) = rest.strip_prefix('#') {
            let i: usize = idx.parse().map_err(|_| bad())?;
            if i >= grid.count {
                return Err(QfieldError::ModeOutOfRange {
                    index: i,
                    count: grid.count,
                });
            }
            i
        } else if let Some(w) = rest.strip_prefix("@ω=") {
            let omega: f64 = w.parse().map_err(|_| bad())?;
            let pos = (omega - grid.omega_min) / grid.delta_omega;
            let i = pos.round();
            if i < 0.0 || i >= grid.count as f64 {
                return Err(bad());
            }
            let i = i as usize;
            if (grid.omega(i) - omega).abs() > 1e-9 * omega.abs().max(grid.delta_omega) {
                return Err(bad());
            }
            i
        } else {
            return Err(bad());
        };
        Ok(Self {
            direction,
            polarization,
            freq_index,
        })
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}{}#{}",
            self.direction,
            self.polarization.number(),
            self.freq_index
        )
    }
}

/// The set of modes a Fock state is built over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeUniverse {
    Line(FrequencyGrid),
    Lattice(KGrid),
}

impl ModeUniverse {
    pub fn mode_count(&self) -> usize {
        match self {
            ModeUniverse::Line(g) => g.mode_count(),
            ModeUniverse::Lattice(g) => g.mode_count(),
        }
    }

    /// Angular frequency of mode `index`.
    pub fn omega(&self, index: usize, medium: &Medium) -> f64 {
        match self {
            ModeUniverse::Line(g) => g.omega(index % g.count),
            ModeUniverse::Lattice(g) => {
                let (k, _) = g.mode_at(index);
                medium.dispersion_omega(g.wave_vector(k).norm())
            }
        }
    }

    pub fn label(&self, index: usize) -> Result<String> {
        match self {
            ModeUniverse::Line(g) => Ok(ModeId::from_index(g, index)?.label(g)),
            ModeUniverse::Lattice(g) => Ok(LatticeMode::from_index(g, index)?.label()),
        }
    }

    pub fn parse_label(&self, label: &str) -> Result<usize> {
        match self {
            ModeUniverse::Line(g) => ModeId::parse(label, g)?.index(g),
            ModeUniverse::Lattice(g) => LatticeMode::parse(label)?.index(g),
        }
    }

    pub fn line(&self) -> Result<&FrequencyGrid> {
        match self {
            ModeUniverse::Line(g) => Ok(g),
            ModeUniverse::Lattice(_) => Err(QfieldError::WrongUniverse { expected: "1D" }),
        }
    }

    pub fn lattice(&self) -> Result<&KGrid> {
        match self {
            ModeUniverse::Lattice(g) => Ok(g),
            ModeUniverse::Line(_) => Err(QfieldError::WrongUniverse { expected: "3D" }),
        }
    }
}

impl From<FrequencyGrid> for ModeUniverse {
    fn from(g: FrequencyGrid) -> Self {
        ModeUniverse::Line(g)
    }
}

impl From<KGrid> for ModeUniverse {
    fn from(g: KGrid) -> Self {
        ModeUniverse::Lattice(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes_and_order() {
        let g = FrequencyGrid::new(1.0, 1.0, 1).unwrap();
        let labels: Vec<String> = g.enumerate_modes().iter().map(|m| m.to_string()).collect();
        assert_eq!(labels, ["L1#0", "L2#0", "R1#0", "R2#0"]);

        let g3 = FrequencyGrid::new(0.5, 0.25, 3).unwrap();
        let modes = g3.enumerate_modes();
        assert_eq!(modes.len(), 12);
        assert_eq!(modes, g3.enumerate_modes());
        assert!(modes.windows(2).all(|w| w[0] < w[1]));
        for (i, m) in modes.iter().enumerate() {
            assert_eq!(m.index(&g3).unwrap(), i);
            assert_eq!(ModeId::from_index(&g3, i).unwrap(), *m);
        }
    }

    #[test]
    fn grid_conversion_factor() {
        assert_eq!(
            FrequencyGrid::new(1.0, 1.0, 2)
                .unwrap()
                .continuum_to_grid_amplitude(),
            1.0
        );
        assert_eq!(
            FrequencyGrid::new(1.0, 0.25, 2)
                .unwrap()
                .continuum_to_grid_amplitude(),
            2.0
        );
        for dw in [0.1, 0.3, 1.7, 1e-3, 42.0] {
            let g = FrequencyGrid::new(1.0, dw, 2).unwrap();
            let s = g.continuum_to_grid_amplitude();
            assert!((s * s * dw - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn continuum_and_grid_norms_agree() {
        // sum_m dw |a(w_m)|^2 with a(w_m) = a_m / sqrt(dw) reproduces sum_m |a_m|^2
        let g = FrequencyGrid::new(0.5, 0.37, 5).unwrap();
        let coeffs = [0.3, -1.2, 2.5, 0.01, 0.7];
        let direct: f64 = coeffs.iter().map(|c| c * c).sum();
        let s = g.continuum_to_grid_amplitude();
        let continuum: f64 = coeffs
            .iter()
            .map(|c| g.delta_omega() * (c * s).powi(2))
            .sum();
        assert!((direct - continuum).abs() <= 1e-14 * direct);
    }

    #[test]
    fn frequencies_positive_increasing() {
        let g = FrequencyGrid::new(0.01, 0.5, 40).unwrap();
        let f: Vec<f64> = g.frequencies().collect();
        assert!(f[0] > 0.0);
        assert!(f.windows(2).all(|w| w[1] > w[0]));
        assert!(FrequencyGrid::new(0.0, 1.0, 1).is_err());
        assert!(FrequencyGrid::new(1.0, 0.0, 1).is_err());
        assert!(FrequencyGrid::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let g = FrequencyGrid::new(0.5, 0.1, 8).unwrap();
        for m in g.enumerate_modes() {
            assert_eq!(ModeId::parse(&m.label(&g), &g).unwrap(), m);
            assert_eq!(ModeId::parse(&m.to_string(), &g).unwrap(), m);
        }
        assert!(ModeId::parse("L1#8", &g).is_err());
        assert!(ModeId::parse("X1#0", &g).is_err());
        assert!(ModeId::parse("L3#0", &g).is_err());
        assert!(ModeId::parse("L1@ω=0.55", &g).is_err());
    }

    #[test]
    fn commensurability() {
        assert!(FrequencyGrid::new(0.5, 1.0, 8).unwrap().is_commensurate());
        assert!(FrequencyGrid::new(1.0, 1.0, 8).unwrap().is_commensurate());
        assert!(!FrequencyGrid::new(0.3, 1.0, 8).unwrap().is_commensurate());
    }
}
