//! The moving reflectionless well
//! `V(x; t) = -(hbar^2 k1^2 / m) sech^2(k1 (x - x0(t)))`.
//!
//! Scattering states are
//! `phi(x, k) = [i k - k1 tanh(k1 (x - x0))] e^{i k x} / (sqrt(2 pi) (k1 + i k))`.
//! Since `d phi / dt = x0' k1^2 sech^2(k1 u) e^{i k x} / (sqrt(2 pi)(k1 + i k))`
//! with `u = x - x0`, the connection kernel reduces to the Fourier transforms
//!
//! ```text
//! S(q) = int sech^2(k1 u) e^{i q u} du        = pi q / (k1^2 sinh(pi q / 2 k1))
//! T(q) = int tanh(k1 u) sech^2(k1 u) e^{i q u} du = (i q / 2 k1) S(q)
//! ```
//!
//! (the second by parts from the first), giving
//! `kernel = x0' hbar k1^2 (k + k') S(k - k') e^{i (k - k') x0} / (4 pi (k1 - i k')(k1 + i k))`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::engine::{self, Components, ContinuumModel, KernelShape, ZERO};
use crate::error::{invalid, PhaseError, Result};
use crate::path::{solve_monotone, RealPath};
use crate::quadrature::richardson_extrapolate;
use crate::spectral::{PhaseResult, PhysicalConstants, QuadratureScheme, TimeWindow};

/// Monotone well position with access to its inverse.
pub trait SweepPath: RealPath {
    fn time_at(&self, x0: f64) -> Result<f64>;
}

/// `x0(t) = start + speed * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSweep {
    pub start: f64,
    pub speed: f64,
}

impl RealPath for UniformSweep {
    fn value(&self, t: f64) -> f64 {
        self.start + self.speed * t
    }
    fn derivative(&self, _t: f64) -> f64 {
        self.speed
    }
}

impl SweepPath for UniformSweep {
    fn time_at(&self, x0: f64) -> Result<f64> {
        if self.speed == 0.0 {
            return invalid("a static well never reaches another position");
        }
        Ok((x0 - self.start) / self.speed)
    }
}

/// `x0(t) = speed * t + wobble * sin(2 pi t / period)`, monotone while
/// `|wobble| * 2 pi / period < |speed|`. A reparametrization of
/// [`UniformSweep`] with the same crossing endpoints whenever the crossing
/// times are multiples of `period`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WobblySweep {
    pub speed: f64,
    pub wobble: f64,
    pub period: f64,
}

impl WobblySweep {
    pub fn new(speed: f64, wobble: f64, period: f64) -> Result<Self> {
        if !(period > 0.0 && (wobble * 2.0 * PI / period).abs() < speed.abs()) {
            return invalid("wobbly sweep is not monotone");
        }
        Ok(Self { speed, wobble, period })
    }
}

impl RealPath for WobblySweep {
    fn value(&self, t: f64) -> f64 {
        self.speed * t + self.wobble * (2.0 * PI * t / self.period).sin()
    }
    fn derivative(&self, t: f64) -> f64 {
        self.speed + self.wobble * 2.0 * PI / self.period * (2.0 * PI * t / self.period).cos()
    }
}

impl SweepPath for WobblySweep {
    fn time_at(&self, x0: f64) -> Result<f64> {
        let guess = x0 / self.speed;
        let pad = self.wobble.abs() / self.speed.abs() + 1.0;
        solve_monotone(self, x0, guess - pad, guess + pad)
    }
}

#[derive(Clone)]
pub struct ReflectionlessParameters {
    pub k1: f64,
    pub mass: f64,
    pub x0_path: Arc<dyn SweepPath>,
}

impl std::fmt::Debug for ReflectionlessParameters {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReflectionlessParameters")
            .field("k1", &self.k1)
            .field("mass", &self.mass)
            .finish_non_exhaustive()
    }
}

impl ReflectionlessParameters {
    pub fn new(k1: f64, mass: f64, x0_path: Arc<dyn SweepPath>) -> Result<Self> {
        if !(k1.is_finite() && k1 > 0.0) {
            return invalid(format!("k1 must be finite and > 0, got {k1}"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return invalid(format!("mass must be finite and > 0, got {mass}"));
        }
        Ok(Self { k1, mass, x0_path })
    }

    /// Well swept with unit speed in the direction of increasing `x0`.
    pub fn uniform(k1: f64, mass: f64) -> Result<Self> {
        Self::new(k1, mass, Arc::new(UniformSweep { start: 0.0, speed: 1.0 }))
    }

    /// Same well swept in the opposite direction.
    pub fn reversed(k1: f64, mass: f64) -> Result<Self> {
        Self::new(k1, mass, Arc::new(UniformSweep { start: 0.0, speed: -1.0 }))
    }

    /// Time window over which the well crosses `[-half_length, half_length]`.
    pub fn crossing_window(&self, half_length: f64) -> Result<TimeWindow> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return invalid("crossing half-length must be finite and > 0");
        }
        let a = self.x0_path.time_at(-half_length)?;
        let b = self.x0_path.time_at(half_length)?;
        TimeWindow::new(a.min(b), a.max(b))
    }

    /// Energy of the single bound state, `-hbar^2 k1^2 / 2m`.
    pub fn bound_state_energy(&self, constants: &PhysicalConstants) -> f64 {
        -constants.hbar * constants.hbar * self.k1 * self.k1 / (2.0 * self.mass)
    }
}

/// `x / sinh(x)`, stable for small and large `|x|`.
fn x_over_sinh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        1.0 - a * a / 6.0
    } else {
        2.0 * a * (-a).exp() / -(-2.0 * a).exp_m1()
    }
}

/// `int sech^2(k1 u) e^{i q u} du`, with the `q -> 0` limit `2 / k1`.
pub fn sech_sq_transform(k1: f64, q: f64) -> f64 {
    2.0 / k1 * x_over_sinh(PI * q / (2.0 * k1))
}

/// `int tanh(k1 u) sech^2(k1 u) e^{i q u} du`.
pub fn tanh_sech_sq_transform(k1: f64, q: f64) -> Complex64 {
    Complex64::new(0.0, q / (2.0 * k1) * sech_sq_transform(k1, q))
}

#[derive(Debug, Clone)]
pub struct ReflectionlessModel {
    pub params: ReflectionlessParameters,
    pub constants: PhysicalConstants,
}

impl ReflectionlessModel {
    pub fn new(params: ReflectionlessParameters, constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        Ok(Self { params, constants })
    }

    pub fn k1(&self) -> f64 {
        self.params.k1
    }

    /// `psi(x)` of the scattering state for a well at `x0`.
    pub fn reflectionless_eigenfunction(&self, k: f64, t: f64, x: f64) -> Result<Complex64> {
        if k == 0.0 {
            return Err(PhaseError::ThresholdState);
        }
        let k1 = self.params.k1;
        let x0 = self.params.x0_path.value(t);
        let amplitude = Complex64::new(-k1 * (k1 * (x - x0)).tanh(), k);
        Ok(amplitude * Complex64::from_polar(1.0, k * x) / (Complex64::new(k1, k) * (2.0 * PI).sqrt()))
    }

    /// The bound state `sqrt(k1 / 2) sech(k1 (x - x0))`.
    pub fn bound_state(&self, t: f64, x: f64) -> f64 {
        let k1 = self.params.k1;
        (0.5 * k1).sqrt() / (k1 * (x - self.params.x0_path.value(t))).cosh()
    }

    /// `K(q; k, k')` such that the kernel density per unit `x0` is
    /// `K e^{i q x0}`.
    pub fn kernel_amplitude(&self, k_prime: f64, k: f64) -> Complex64 {
        let k1 = self.params.k1;
        let q = k - k_prime;
        let spatial = Complex64::new(0.0, -k_prime) * sech_sq_transform(k1, q) - tanh_sech_sq_transform(k1, q) * k1;
        // i hbar * spatial * k1^2 / (2 pi (k1 - i k') (k1 + i k))
        Complex64::new(0.0, self.constants.hbar) * spatial * (k1 * k1)
            / (Complex64::new(k1, -k_prime) * Complex64::new(k1, k) * (2.0 * PI))
    }

    pub fn connection_kernel_smooth(&self, k_prime: f64, k: f64, t: f64) -> Result<Complex64> {
        if k == 0.0 || k_prime == 0.0 {
            return Err(PhaseError::ThresholdState);
        }
        self.connection_kernel(k_prime, k, t)
    }

    /// Geometric phase of a crossing over `x0 in [-X, X]` with
    /// `X = scheme.space_truncation * 2^j`, `j < extrapolation_levels`,
    /// extrapolated in `1/X`. Panel counts are doubled together with `X`.
    pub fn sweep_phase(&self, k: f64, scheme: &QuadratureScheme) -> Result<PhaseResult> {
        scheme.validate()?;
        let mut estimates = Vec::with_capacity(scheme.extrapolation_levels);
        let mut last = None;
        let mut evaluations = 0;
        for level in 0..scheme.extrapolation_levels {
            let scale = 1usize << level;
            let refined = QuadratureScheme {
                space_truncation: scheme.space_truncation * scale as f64,
                time_panels: scheme.time_panels * scale,
                kprime_points: scheme.kprime_points * scale,
                ..*scheme
            };
            let r = self.truncated_sweep(k, &refined)?;
            evaluations += r.evaluations;
            estimates.push(r.value);
            last = Some(r);
        }
        let last = last.expect("at least one level");
        let (value, error) = if estimates.len() >= 2 {
            let e = richardson_extrapolate(&estimates, 2.0, 1)?;
            (e.value, e.error.max(last.error))
        } else {
            (estimates[0], last.error)
        };
        if value.im.abs() > engine::reality_tolerance(value.re) {
            return Err(PhaseError::NotSelfAdjoint { real: value.re, imag: value.im });
        }
        PhaseResult::new(&self.constants, last.gamma_dynamical, value.re, value.im, error, evaluations)
    }

    /// Complex phase of a single crossing over `[-X, X]`,
    /// `X = scheme.space_truncation`, without extrapolation or reality check.
    pub fn truncated_sweep(&self, k: f64, scheme: &QuadratureScheme) -> Result<engine::RawPhase> {
        if k == 0.0 {
            return Err(PhaseError::ThresholdState);
        }
        let window = self.params.crossing_window(scheme.space_truncation)?;
        engine::geometric_phase_complex(self, k, &window, scheme)
    }

    /// Resolution that follows the `e^{i q x0}` oscillation over a crossing of
    /// half-length `half_length`, about two panels per period in both `x0`
    /// and `k'`, with `k'` truncated at `16 k1`.
    pub fn recommended_scheme(&self, half_length: f64) -> QuadratureScheme {
        let q = 16.0 * self.params.k1;
        let panels = ((2.0 * q * half_length / PI).ceil() as usize).max(8);
        QuadratureScheme {
            time_panels: panels,
            time_order: 10,
            space_truncation: half_length,
            space_points: 256,
            kprime_truncation: q,
            kprime_points: panels,
            extrapolation_levels: 2,
        }
    }
}

impl ContinuumModel for ReflectionlessModel {
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    fn eigenvalue(&self, k: f64, _t: f64) -> Result<f64> {
        let hbar = self.constants.hbar;
        Ok(hbar * hbar * k * k / (2.0 * self.params.mass))
    }

    fn eigenfunction_value(&self, k: f64, t: f64, x: f64) -> Result<Components> {
        Ok([self.reflectionless_eigenfunction(k, t, x)?, ZERO])
    }

    fn kernel_shape(&self) -> KernelShape {
        KernelShape::Smooth
    }

    fn sweep_coordinate(&self, t: f64) -> Result<f64> {
        Ok(self.params.x0_path.value(t))
    }

    fn sweep_rate(&self, t: f64) -> Result<f64> {
        Ok(self.params.x0_path.derivative(t))
    }

    fn kernel_density(&self, k_prime: f64, k: f64, s: f64) -> Result<Complex64> {
        Ok(self.kernel_amplitude(k_prime, k) * Complex64::from_polar(1.0, (k - k_prime) * s))
    }
}

/// `gamma_G(k; +inf) = 2 hbar k1 k / (k^2 + k1^2)`.
pub fn reflectionless_phase_closed_form(params: &ReflectionlessParameters, constants: &PhysicalConstants, k: f64) -> Result<f64> {
    if k == 0.0 {
        return Err(PhaseError::ThresholdState);
    }
    let k1 = params.k1;
    Ok(2.0 * constants.hbar * k1 * k / (k * k + k1 * k1))
}

/// Exact transmission phase `delta = 2 arctan(k1 / k)`.
pub fn transmission_phase_exact(params: &ReflectionlessParameters, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return invalid(format!("exact transmission phase requires k > 0, got {k}"));
    }
    Ok(2.0 * (params.k1 / k).atan())
}

/// Ratio of the asymptotic amplitude on the far side of the well to the
/// incident one, `(i k - k1) / (i k + k1)`.
pub fn asymptotic_amplitude_ratio(k1: f64, k: f64) -> Complex64 {
    Complex64::new(-k1, k) / Complex64::new(k1, k)
}
