//! S-matrix layer. For a Hamiltonian `H0 + V(t)` whose interaction vanishes
//! outside a finite window, the elastic S-matrix is diagonal in `k` with the
//! eigenvalue `S_k = exp[(i / hbar) gamma_G(k)]`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::engine::{self, ContinuumModel};
use crate::error::{invalid, PhaseError, Result};
use crate::exec;
use crate::models::free::FreeParticle;
use crate::models::reflectionless::{
    reflectionless_phase_closed_form, transmission_phase_exact, ReflectionlessModel, ReflectionlessParameters,
};
use crate::spectral::{PhaseResult, PhysicalConstants, QuadratureScheme, SpectralBand, TimeWindow};

/// Tolerance for the switch-off check at the window edges.
pub const SWITCH_OFF_TOLERANCE: f64 = 1e-10;

/// Positions where the full and free eigenfunctions are compared.
pub const DEFAULT_PROBE_POINTS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

/// `H = H0 + V(t)` with `V(t) = 0` outside `window`.
#[derive(Clone)]
pub struct SplitHamiltonian {
    pub free_model: Arc<dyn ContinuumModel>,
    pub full_model: Arc<dyn ContinuumModel>,
    pub window: TimeWindow,
    pub probe_points: Vec<f64>,
}

impl std::fmt::Debug for SplitHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplitHamiltonian")
            .field("window", &self.window)
            .field("probe_points", &self.probe_points)
            .finish_non_exhaustive()
    }
}

impl SplitHamiltonian {
    pub fn new(free_model: Arc<dyn ContinuumModel>, full_model: Arc<dyn ContinuumModel>, window: TimeWindow) -> Self {
        Self { free_model, full_model, window, probe_points: DEFAULT_PROBE_POINTS.to_vec() }
    }

    /// A free particle split against itself.
    pub fn trivial(mass: f64, constants: PhysicalConstants, window: TimeWindow) -> Result<Self> {
        let free: Arc<dyn ContinuumModel> = Arc::new(FreeParticle::new(mass, constants)?);
        Ok(Self::new(free.clone(), free, window))
    }

    /// The moving reflectionless well crossing `[-half_length, half_length]`.
    pub fn reflectionless(
        params: ReflectionlessParameters,
        constants: PhysicalConstants,
        half_length: f64,
    ) -> Result<Self> {
        let window = params.crossing_window(half_length)?;
        let free = FreeParticle::new(params.mass, constants)?;
        let full = ReflectionlessModel::new(params, constants)?;
        Ok(Self::new(Arc::new(free), Arc::new(full), window))
    }

    /// Checks that at both window edges the full model has the free
    /// eigenvalue and an eigenfunction equal to the free one up to a constant
    /// unit-modulus factor on the probe points.
    pub fn validate(&self, k: f64) -> Result<()> {
        if self.probe_points.is_empty() {
            return invalid("switch-off check needs at least one probe point");
        }
        for t in [self.window.t0, self.window.t1] {
            let e_free = self.free_model.eigenvalue(k, t)?;
            let e_full = self.full_model.eigenvalue(k, t)?;
            if (e_free - e_full).abs() > SWITCH_OFF_TOLERANCE * e_free.abs().max(1.0) {
                return Err(PhaseError::InteractionNotSwitchedOff(format!(
                    "eigenvalues differ at t = {t}: {e_free} vs {e_full}"
                )));
            }
            let mut reference: Option<Complex64> = None;
            for &x in &self.probe_points {
                let free = self.free_model.eigenfunction_value(k, t, x)?;
                let full = self.full_model.eigenfunction_value(k, t, x)?;
                let (index, _) = free
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                    .expect("two components");
                let ratio = full[index] / free[index];
                let scale = free[index].norm();
                let mismatch = match reference {
                    None => (ratio.norm() - 1.0).abs(),
                    Some(r) => (0..2).map(|c| (full[c] - free[c] * r).norm() / scale).fold(0.0, f64::max),
                };
                if !(mismatch <= SWITCH_OFF_TOLERANCE) {
                    return Err(PhaseError::InteractionNotSwitchedOff(format!(
                        "eigenfunctions differ at t = {t}, x = {x} by {mismatch:e}"
                    )));
                }
                reference.get_or_insert(ratio);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrixEigenvalue {
    pub k: f64,
    pub value: Complex64,
    pub phase_rad: f64,
    pub phases: PhaseResult,
}

impl SMatrixEigenvalue {
    fn from_phase(k: f64, phases: PhaseResult) -> Self {
        let phase_rad = phases.phase_geometric_rad();
        Self { k, value: Complex64::from_polar(1.0, phase_rad), phase_rad, phases }
    }

    /// Eigenvalue of two processes run back to back at the same `k`.
    pub fn compose(&self, next: &SMatrixEigenvalue) -> Result<SMatrixEigenvalue> {
        if self.k != next.k {
            return invalid(format!("cannot compose S eigenvalues at k = {} and k = {}", self.k, next.k));
        }
        let phase_rad = self.phase_rad + next.phase_rad;
        Ok(SMatrixEigenvalue { k: self.k, value: Complex64::from_polar(1.0, phase_rad), phase_rad, phases: self.phases })
    }
}

/// `S_k = exp[(i / hbar) gamma_G(k)]` with `gamma_G` from the phase engine on
/// the full model over the interaction window.
pub fn s_matrix_eigenvalue(split: &SplitHamiltonian, k: f64, scheme: &QuadratureScheme) -> Result<SMatrixEigenvalue> {
    split.validate(k)?;
    let phases = engine::geometric_phase(split.full_model.as_ref(), k, &split.window, scheme)?;
    Ok(SMatrixEigenvalue::from_phase(k, phases))
}

/// [`s_matrix_eigenvalue`] over every point of a band, in ascending `k`.
pub fn s_matrix_sweep(split: &SplitHamiltonian, band: &SpectralBand, scheme: &QuadratureScheme) -> Result<Vec<SMatrixEigenvalue>> {
    band.validate()?;
    band.points().iter().map(|&k| s_matrix_eigenvalue(split, k, scheme)).collect()
}

/// One row of the adiabatic versus exact transmission comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionRow {
    pub k: f64,
    /// Adiabatic phase `2 k1 k / (k^2 + k1^2)`, the argument of `S_k`.
    pub delta0: f64,
    /// Exact `2 arctan(k1 / k)`, the argument of `t(k)`.
    pub delta_exact: f64,
    pub difference: f64,
}

/// Tabulates `delta0` and `delta` across a band that avoids the discrete
/// region `|k| < k1`.
pub fn transmission_comparison(params: &ReflectionlessParameters, band: &SpectralBand) -> Result<Vec<TransmissionRow>> {
    band.validate()?;
    let points = band.points();
    let offending: Vec<f64> = points.iter().copied().filter(|k| k.abs() < params.k1 || *k == 0.0).collect();
    if !offending.is_empty() {
        return Err(PhaseError::ExcludedBand { offending });
    }
    exec::try_map_ordered(&points, |&k| transmission_row(params, k))
}

/// A single row of [`transmission_comparison`], for `k > 0`.
pub fn transmission_row(params: &ReflectionlessParameters, k: f64) -> Result<TransmissionRow> {
    let delta0 = reflectionless_phase_closed_form(params, &PhysicalConstants::default(), k)?;
    let delta_exact = transmission_phase_exact(params, k)?;
    Ok(TransmissionRow { k, delta0, delta_exact, difference: delta_exact - delta0 })
}
