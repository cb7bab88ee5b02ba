//! Homogeneous, non-dispersive, non-absorbing medium and its dispersion relation.

use serde::{Deserialize, Serialize};

use crate::error::{QfieldError, Result};

/// SI vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// SI vacuum permeability (H/m).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Reduced Planck constant (J s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Material constants shared by every other module.
///
/// Immutable once built; derived quantities such as the phase speed are
/// computed on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    epsilon: f64,
    mu: f64,
    hbar: f64,
    area: f64,
}

impl Medium {
    pub fn new(epsilon: f64, mu: f64, hbar: f64, area: f64) -> Result<Self> {
        for (name, v) in [
            ("epsilon", epsilon),
            ("mu", mu),
            ("hbar", hbar),
            ("area", area),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QfieldError::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        let m = Self {
            epsilon,
            mu,
            hbar,
            area,
        };
        let v = m.phase_speed();
        if !(v.is_finite() && v > 0.0) {
            return Err(QfieldError::InvalidParameter(format!(
                "phase speed 1/sqrt(epsilon*mu) = {v} is not finite"
            )));
        }
        Ok(m)
    }

    /// hbar = epsilon = mu = area = 1.
    pub fn natural() -> Self {
        Self {
            epsilon: 1.0,
            mu: 1.0,
            hbar: 1.0,
            area: 1.0,
        }
    }

    /// Vacuum in SI units with the given transverse area (m^2).
    pub fn si_vacuum(area: f64) -> Result<Self> {
        Self::new(EPSILON_0, MU_0, HBAR_SI, area)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// sqrt(epsilon * mu), the inverse phase speed.
    pub fn slowness(&self) -> f64 {
        (self.epsilon * self.mu).sqrt()
    }

    pub fn phase_speed(&self) -> f64 {
        1.0 / self.slowness()
    }

    /// omega = k / sqrt(epsilon mu). `k_magnitude` must be non-negative.
    pub fn dispersion_omega(&self, k_magnitude: f64) -> f64 {
        debug_assert!(k_magnitude >= 0.0, "negative wavenumber {k_magnitude}");
        k_magnitude / self.slowness()
    }

    /// k = omega sqrt(epsilon mu).
    pub fn dispersion_k(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(QfieldError::InvalidParameter(format!(
                "angular frequency must be >= 0, got {omega}"
            )));
        }
        Ok(omega * self.slowness())
    }
}

impl Default for Medium {
    fn default() -> Self {
        Self::natural()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_units_dispersion() {
        let m = Medium::natural();
        assert_eq!(m.dispersion_omega(2.0), 2.0);
        assert_eq!(m.dispersion_omega(0.0), 0.0);
        assert_eq!(m.dispersion_k(3.5).unwrap(), 3.5);
    }

    #[test]
    fn vacuum_speed_of_light() {
        let m = Medium::si_vacuum(1.0).unwrap();
        let omega = m.dispersion_omega(1.0);
        assert!((omega - 2.997_924_58e8).abs() / 2.997_924_58e8 < 1e-9);
    }

    #[test]
    fn denser_medium() {
        let m = Medium::new(4.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(m.dispersion_k(1.0).unwrap(), 2.0);
    }

    #[test]
    fn scaling_permittivity_doubles_k() {
        let a = Medium::new(1.3, 0.7, 1.0, 1.0).unwrap();
        let b = Medium::new(4.0 * 1.3, 0.7, 1.0, 1.0).unwrap();
        for omega in [0.1, 1.0, 17.0] {
            let ka = a.dispersion_k(omega).unwrap();
            let kb = b.dispersion_k(omega).unwrap();
            assert!((kb - 2.0 * ka).abs() <= 1e-14 * kb);
        }
    }

    #[test]
    fn round_trip_over_six_decades() {
        let m = Medium::new(2.5, 1.7, 1.0, 1.0).unwrap();
        for e in -3..=3 {
            for k in [10f64.powi(e), 3.3 * 10f64.powi(e)] {
                let back = m.dispersion_k(m.dispersion_omega(k)).unwrap();
                assert!((back - k).abs() <= 1e-14 * k, "{k} -> {back}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Medium::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Medium::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(Medium::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(Medium::natural().dispersion_k(-1.0).is_err());
    }
}
