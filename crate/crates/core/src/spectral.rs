//! Shared domain types: unit constants, spectral bands, time windows,
//! quadrature settings and the phase record returned by the engine.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Reduced Planck constant and speed of light in the caller's unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, c: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, c: f64) -> Result<Self> {
        let constants = Self { hbar, c };
        constants.validate()?;
        Ok(constants)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return invalid(format!("hbar must be finite and > 0, got {}", self.hbar));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return invalid(format!("c must be finite and > 0, got {}", self.c));
        }
        Ok(())
    }
}

/// An interval of the continuous label `k` sampled at `n_points` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralBand {
    pub k_lo: f64,
    pub k_hi: f64,
    pub n_points: usize,
}

impl SpectralBand {
    pub fn new(k_lo: f64, k_hi: f64, n_points: usize) -> Result<Self> {
        let band = Self { k_lo, k_hi, n_points };
        band.validate()?;
        Ok(band)
    }

    /// Band of width `width` centred on `k`.
    pub fn centered(k: f64, width: f64, n_points: usize) -> Result<Self> {
        Self::new(k - 0.5 * width, k + 0.5 * width, n_points)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_lo.is_finite() && self.k_hi.is_finite()) {
            return invalid("band edges must be finite");
        }
        if self.k_lo >= self.k_hi {
            return invalid(format!("band requires k_lo < k_hi, got [{}, {}]", self.k_lo, self.k_hi));
        }
        if self.n_points < 2 {
            return invalid(format!("band requires n_points >= 2, got {}", self.n_points));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.k_hi - self.k_lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.k_lo + self.k_hi)
    }

    pub fn contains(&self, k: f64) -> bool {
        k >= self.k_lo && k <= self.k_hi
    }

    /// Evenly spaced sample points, endpoints included, ascending.
    pub fn points(&self) -> Vec<f64> {
        let step = self.width() / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.k_hi } else { self.k_lo + step * i as f64 })
            .collect()
    }
}

/// Integration limits `[t0, t1]` in time. A zero-length window is allowed and
/// represents the initial instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub t0: f64,
    pub t1: f64,
}

impl TimeWindow {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) {
            return invalid("time window bounds must be finite");
        }
        if t0 > t1 {
            return invalid(format!("time window requires t0 <= t1, got [{t0}, {t1}]"));
        }
        Ok(Self { t0, t1 })
    }

    pub fn instant(t: f64) -> Result<Self> {
        Self::new(t, t)
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn is_empty(&self) -> bool {
        self.t0 == self.t1
    }

    /// Splits at `t`, which must lie inside the window.
    pub fn split_at(&self, t: f64) -> Result<(Self, Self)> {
        if !(t >= self.t0 && t <= self.t1) {
            return invalid(format!("split point {t} outside [{}, {}]", self.t0, self.t1));
        }
        Ok((Self { t0: self.t0, t1: t }, Self { t0: t, t1: self.t1 }))
    }
}

const MAX_EXTRAPOLATION_LEVELS: usize = 12;

/// Resolution settings shared by every integral in the crate.
///
/// `*_panels`/`*_points` are panel counts of composite Gauss-Legendre rules,
/// each panel carrying `time_order` nodes. `space_truncation` is the spatial
/// half-length (for the reflectionless sweep it is the half-length `X` of the
/// potential's excursion), `kprime_truncation` the half-width `Q` of the
/// `k'` window around the target label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureScheme {
    pub time_panels: usize,
    pub time_order: usize,
    pub space_truncation: f64,
    pub space_points: usize,
    pub kprime_truncation: f64,
    pub kprime_points: usize,
    pub extrapolation_levels: usize,
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        Self {
            time_panels: 64,
            time_order: 10,
            space_truncation: 16.0,
            space_points: 256,
            kprime_truncation: 16.0,
            kprime_points: 192,
            extrapolation_levels: 2,
        }
    }
}

impl QuadratureScheme {
    pub fn validate(&self) -> Result<()> {
        if self.time_panels == 0 || self.space_points == 0 || self.kprime_points == 0 {
            return invalid("panel counts must be positive");
        }
        if !(1..=crate::quadrature::MAX_ORDER).contains(&self.time_order) {
            return invalid(format!(
                "time_order must lie in 1..={}, got {}",
                crate::quadrature::MAX_ORDER,
                self.time_order
            ));
        }
        if !(self.space_truncation.is_finite() && self.space_truncation > 0.0) {
            return invalid("space_truncation must be finite and > 0");
        }
        if !(self.kprime_truncation.is_finite() && self.kprime_truncation > 0.0) {
            return invalid("kprime_truncation must be finite and > 0");
        }
        if !(1..=MAX_EXTRAPOLATION_LEVELS).contains(&self.extrapolation_levels) {
            return invalid(format!(
                "extrapolation_levels must lie in 1..={MAX_EXTRAPOLATION_LEVELS}, got {}",
                self.extrapolation_levels
            ));
        }
        let scale = 1usize << (2 * self.extrapolation_levels);
        for (name, count) in [
            ("time_panels", self.time_panels),
            ("space_points", self.space_points),
            ("kprime_points", self.kprime_points),
        ] {
            if count.checked_mul(scale).and_then(|n| n.checked_mul(self.time_order)).is_none() {
                return invalid(format!("{name} overflows when refined {} times", self.extrapolation_levels));
            }
        }
        Ok(())
    }

    pub fn with_time_panels(mut self, panels: usize) -> Self {
        self.time_panels = panels;
        self
    }

    pub fn with_space_truncation(mut self, length: f64) -> Self {
        self.space_truncation = length;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.extrapolation_levels = levels;
        self
    }
}

/// Dynamical and geometric phases of one transported state.
///
/// Action-valued `gamma_*` and radian-valued `phase_*_rad` are both carried;
/// the radian forms are always `gamma / hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseResult {
    gamma_dynamical: f64,
    gamma_geometric: f64,
    phase_dynamical_rad: f64,
    phase_geometric_rad: f64,
    geometric_imag: f64,
    estimated_error: f64,
    evaluations: usize,
}

impl PhaseResult {
    pub fn new(
        constants: &PhysicalConstants,
        gamma_dynamical: f64,
        gamma_geometric: f64,
        geometric_imag: f64,
        estimated_error: f64,
        evaluations: usize,
    ) -> Result<Self> {
        if !(estimated_error.is_finite() && estimated_error >= 0.0) {
            return invalid(format!("estimated_error must be finite and >= 0, got {estimated_error}"));
        }
        Ok(Self {
            gamma_dynamical,
            gamma_geometric,
            phase_dynamical_rad: gamma_dynamical / constants.hbar,
            phase_geometric_rad: gamma_geometric / constants.hbar,
            geometric_imag,
            estimated_error,
            evaluations,
        })
    }

    pub fn gamma_dynamical(&self) -> f64 {
        self.gamma_dynamical
    }

    pub fn gamma_geometric(&self) -> f64 {
        self.gamma_geometric
    }

    pub fn phase_dynamical_rad(&self) -> f64 {
        self.phase_dynamical_rad
    }

    pub fn phase_geometric_rad(&self) -> f64 {
        self.phase_geometric_rad
    }

    /// Imaginary part left over by the quadrature of the geometric phase.
    pub fn geometric_imag(&self) -> f64 {
        self.geometric_imag
    }

    pub fn estimated_error(&self) -> f64 {
        self.estimated_error
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Total phase (radians) of `exp{(i/hbar)(-gamma_D + gamma_G)}`.
    pub fn total_phase_rad(&self) -> f64 {
        -self.phase_dynamical_rad + self.phase_geometric_rad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_reject_nonpositive() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::new(f64::NAN, 1.0).is_err());
        assert_eq!(PhysicalConstants::default(), PhysicalConstants::new(1.0, 1.0).unwrap());
    }

    #[test]
    fn band_invariants() {
        assert!(SpectralBand::new(1.0, 1.0, 4).is_err());
        assert!(SpectralBand::new(0.0, 1.0, 1).is_err());
        let band = SpectralBand::new(1.5, 10.0, 18).unwrap();
        let pts = band.points();
        assert_eq!(pts.len(), 18);
        assert_eq!(pts[0], 1.5);
        assert_eq!(pts[17], 10.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn window_rejects_reversed() {
        assert!(TimeWindow::new(1.0, 0.0).is_err());
        assert!(TimeWindow::instant(3.0).unwrap().is_empty());
        let (a, b) = TimeWindow::new(0.0, 2.0).unwrap().split_at(0.5).unwrap();
        assert_eq!((a.t1, b.t0), (0.5, 0.5));
    }

    #[test]
    fn scheme_validation() {
        QuadratureScheme::default().validate().unwrap();
        assert!(QuadratureScheme { time_panels: 0, ..Default::default() }.validate().is_err());
        assert!(QuadratureScheme { extrapolation_levels: 0, ..Default::default() }.validate().is_err());
        assert!(QuadratureScheme { time_panels: usize::MAX / 4, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn radian_forms_are_exact_ratios() {
        let constants = PhysicalConstants::new(0.7, 1.0).unwrap();
        let r = PhaseResult::new(&constants, 1.3, -0.4, 0.0, 1e-9, 10).unwrap();
        assert_eq!(r.phase_dynamical_rad(), 1.3 / 0.7);
        assert_eq!(r.phase_geometric_rad(), -0.4 / 0.7);
        assert!(PhaseResult::new(&constants, 0.0, 0.0, 0.0, f64::INFINITY, 0).is_err());
    }
}
