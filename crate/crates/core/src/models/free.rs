//! Free particle `H0 = p^2 / 2m` with plane-wave eigenfunctions.

use num_complex::Complex64;

use crate::engine::{Components, ContinuumModel, KernelShape, ZERO};
use crate::error::{invalid, Result};
use crate::spectral::PhysicalConstants;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParticle {
    pub mass: f64,
    pub constants: PhysicalConstants,
}

impl FreeParticle {
    pub fn new(mass: f64, constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        if !(mass.is_finite() && mass > 0.0) {
            return invalid(format!("mass must be finite and > 0, got {mass}"));
        }
        Ok(Self { mass, constants })
    }
}

impl ContinuumModel for FreeParticle {
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    fn eigenvalue(&self, k: f64, _t: f64) -> Result<f64> {
        let hbar = self.constants.hbar;
        Ok(hbar * hbar * k * k / (2.0 * self.mass))
    }

    /// `exp(i k x) / sqrt(2 pi)`.
    fn eigenfunction_value(&self, k: f64, _t: f64, x: f64) -> Result<Components> {
        Ok([Complex64::from_polar((2.0 * std::f64::consts::PI).sqrt().recip(), k * x), ZERO])
    }

    fn kernel_shape(&self) -> KernelShape {
        KernelShape::Vanishing
    }
}
