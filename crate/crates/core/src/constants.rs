//! Physical constants for a monochromatic scalar beam.

use crate::error::{Result, SimError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wavelength plus the action scale; everything else is derived so the
/// dispersion bookkeeping cannot drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Action scale [J·s]. Defaults to 1 (natural units).
    pub hbar: f64,
    /// Vacuum wavelength [m].
    pub wavelength: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, wavelength: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(SimError::InvalidConstants(format!("hbar must be positive, got {hbar}")));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(SimError::InvalidConstants(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self { hbar, wavelength })
    }

    /// Wavenumber k = 2π/λ [1/m].
    #[inline]
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Total momentum p = ħk [kg·m/s] (or [1/m] in natural units).
    #[inline]
    pub fn total_momentum(&self) -> f64 {
        self.hbar * self.wavenumber()
    }

    /// Reference momentum spread ħ/d for a slit of full width d.
    #[inline]
    pub fn slit_reference_spread(&self, slit_width: f64) -> f64 {
        self.hbar / slit_width
    }
}

impl Default for PhysicalConstants {
    /// Natural units with a down-conversion wavelength of 702 nm.
    fn default() -> Self {
        Self { hbar: 1.0, wavelength: 702e-9 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_matches_wavelength() {
        let c = PhysicalConstants::default();
        // k·λ = 2π up to one rounding of the division.
        let prod = c.wavenumber() * c.wavelength;
        assert!((prod - 2.0 * PI).abs() <= 4.0 * f64::EPSILON * 2.0 * PI);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(PhysicalConstants::new(0.0, 1e-6).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::new(f64::NAN, 1e-6).is_err());
    }

    #[test]
    fn natural_units_reference_spread() {
        let c = PhysicalConstants::default();
        let d = 1.6e-4;
        assert_eq!(c.slit_reference_spread(d), 1.0 / d);
    }
}
