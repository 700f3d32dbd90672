//! Brute-force integration of `i hbar dpsi/dt = H(t/T) psi` for a 2x2
//! Hamiltonian with the classical fixed-step fourth-order Runge-Kutta scheme.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{check_finite, invalid, PhaseError, Result};
use crate::spectral::{PhysicalConstants, TimeWindow};

pub type Matrix2 = [[Complex64; 2]; 2];
pub type State2 = [Complex64; 2];

/// Largest admissible `step * ||H|| / hbar`.
pub const MAX_STEP_PHASE: f64 = 0.1;
/// Norm drift beyond which the integration is rejected.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

type HamiltonianFn = dyn Fn(f64) -> Result<Matrix2> + Send + Sync;

#[derive(Clone)]
pub struct TwoLevelSystem {
    hamiltonian: Arc<HamiltonianFn>,
    /// The path is traversed as `h(t / slowness)`.
    pub slowness: f64,
    pub constants: PhysicalConstants,
}

impl std::fmt::Debug for TwoLevelSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TwoLevelSystem").field("slowness", &self.slowness).finish_non_exhaustive()
    }
}

fn frobenius(h: &Matrix2) -> f64 {
    h.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl TwoLevelSystem {
    pub fn new<F>(hamiltonian: F, slowness: f64, constants: PhysicalConstants) -> Result<Self>
    where
        F: Fn(f64) -> Result<Matrix2> + Send + Sync + 'static,
    {
        constants.validate()?;
        if !(slowness.is_finite() && slowness > 0.0) {
            return invalid(format!("slowness must be finite and > 0, got {slowness}"));
        }
        Ok(Self { hamiltonian: Arc::new(hamiltonian), slowness, constants })
    }

    /// `H(t)`, checked for Hermiticity.
    pub fn at(&self, t: f64) -> Result<Matrix2> {
        let h = (self.hamiltonian)(t / self.slowness)?;
        let scale = frobenius(&h).max(1.0);
        check_finite(scale, "hamiltonian", || format!("t = {t}"))?;
        let defect = (h[0][1] - h[1][0].conj()).norm() + h[0][0].im.abs() + h[1][1].im.abs();
        if defect > 1e-12 * scale {
            return invalid(format!("hamiltonian is not Hermitian at t = {t} (defect {defect:e})"));
        }
        Ok(h)
    }
}

fn apply(h: &Matrix2, v: &State2, factor: Complex64) -> State2 {
    [(h[0][0] * v[0] + h[0][1] * v[1]) * factor, (h[1][0] * v[0] + h[1][1] * v[1]) * factor]
}

fn axpy(a: &State2, s: f64, b: &State2) -> State2 {
    [a[0] + b[0] * s, a[1] + b[1] * s]
}

fn norm(v: &State2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// State at `window.t1` from `initial` at `window.t0` using `ode_steps`
/// equal steps.
pub fn two_level_evolve(sys: &TwoLevelSystem, initial: State2, window: &TimeWindow, ode_steps: usize) -> Result<State2> {
    if ode_steps == 0 {
        return invalid("ode_steps must be positive");
    }
    let n0 = norm(&initial);
    if !(n0.is_finite() && n0 > 0.0) {
        return invalid("initial state must be finite and nonzero");
    }
    let dt = window.duration() / ode_steps as f64;
    let factor = Complex64::new(0.0, -1.0 / sys.constants.hbar);
    let mut psi = initial;
    for step in 0..ode_steps {
        let t = window.t0 + step as f64 * dt;
        let h0 = sys.at(t)?;
        let hm = sys.at(t + 0.5 * dt)?;
        let h1 = sys.at(t + dt)?;
        let reach = dt * frobenius(&h0).max(frobenius(&hm)).max(frobenius(&h1)) / sys.constants.hbar;
        if reach >= MAX_STEP_PHASE {
            return invalid(format!("ode_steps too few: step * |H| / hbar = {reach:.3} at t = {t}"));
        }
        let k1 = apply(&h0, &psi, factor);
        let k2 = apply(&hm, &axpy(&psi, 0.5 * dt, &k1), factor);
        let k3 = apply(&hm, &axpy(&psi, 0.5 * dt, &k2), factor);
        let k4 = apply(&h1, &axpy(&psi, dt, &k3), factor);
        for c in 0..2 {
            psi[c] += (k1[c] + (k2[c] + k3[c]) * 2.0 + k4[c]) * (dt / 6.0);
        }
    }
    let drift = (norm(&psi) - n0).abs() / n0;
    if !(drift <= MAX_NORM_DRIFT) {
        return Err(PhaseError::StepSizeInsufficient { drift });
    }
    Ok(psi)
}

/// Steps such that each one advances the phase by at most `step_phase`.
pub fn steps_for(window: &TimeWindow, max_norm: f64, hbar: f64, step_phase: f64) -> usize {
    ((window.duration() * max_norm / (hbar * step_phase)).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(e: f64) -> TwoLevelSystem {
        TwoLevelSystem::new(move |_| Ok([[c(e), c(0.0)], [c(0.0), c(-e)]]), 1.0, PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn constant_diagonal_phases() {
        let sys = diag(0.7);
        let w = TimeWindow::new(0.0, 10.0).unwrap();
        let out = two_level_evolve(&sys, [c(0.6), c(0.8)], &w, 2000).unwrap();
        assert!((out[0] - Complex64::from_polar(0.6, -7.0)).norm() < 1e-9);
        assert!((out[1] - Complex64::from_polar(0.8, 7.0)).norm() < 1e-9);
        assert!((norm(&out) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let sys = diag(1.0);
        let w = TimeWindow::new(0.0, 4.0).unwrap();
        let exact = Complex64::from_polar(1.0, -4.0);
        let e1 = (two_level_evolve(&sys, [c(1.0), c(0.0)], &w, 80).unwrap()[0] - exact).norm();
        let e2 = (two_level_evolve(&sys, [c(1.0), c(0.0)], &w, 160).unwrap()[0] - exact).norm();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 0.3 * 16.0, "ratio {ratio}");
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let sys = diag(1.0);
        let w = TimeWindow::new(0.0, 10.0).unwrap();
        assert!(two_level_evolve(&sys, [c(1.0), c(0.0)], &w, 10).is_err());
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let sys = TwoLevelSystem::new(|_| Ok([[c(1.0), c(0.5)], [c(0.0), c(-1.0)]]), 1.0, PhysicalConstants::default())
            .unwrap();
        assert!(sys.at(0.0).is_err());
    }
}
