//! The phase engine: dynamical phase, generalized geometric phase, the
//! adiabatic coefficient and evolved state, and eigendifferential norms,
//! all written against the [`ContinuumModel`] interface.

use num_complex::Complex64;

use crate::error::{check_finite, invalid, PhaseError, Result};
use crate::exec;
use crate::quadrature::{self, richardson_extrapolate, GaussLegendre};
use crate::spectral::{PhaseResult, PhysicalConstants, QuadratureScheme, TimeWindow};

/// Spatial components of an eigenfunction value; models with a single
/// component leave the second entry zero.
pub type Components = [Complex64; 2];

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// How the connection kernel `<phi(k';t)| i hbar d/dt |phi(k;t)>` depends on `k'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelShape {
    /// Eigenfunctions do not depend on time.
    Vanishing,
    /// `delta(k' - k) * a(k, t)` with `a` from [`ContinuumModel::diagonal_connection`].
    Diagonal,
    /// `ds/dt * density(k', k, s(t))`, smooth in `k'`, where `s` is a
    /// monotone sweep coordinate.
    Smooth,
}

/// A Hamiltonian family `H(X(t))` with a continuous, nondegenerate spectrum
/// labelled by a real `k`.
pub trait ContinuumModel: Send + Sync {
    fn constants(&self) -> PhysicalConstants;

    fn spatial_components(&self) -> usize {
        1
    }

    fn eigenvalue(&self, k: f64, t: f64) -> Result<f64>;

    /// Delta-normalized eigenfunction value at position `x`.
    fn eigenfunction_value(&self, k: f64, t: f64, x: f64) -> Result<Components>;

    fn kernel_shape(&self) -> KernelShape;

    fn has_closed_form_connection(&self) -> bool {
        true
    }

    /// Coefficient `a(k, t)` of a diagonal kernel.
    fn diagonal_connection(&self, _k: f64, _t: f64) -> Result<Complex64> {
        Err(PhaseError::Unsupported("diagonal connection"))
    }

    /// Monotone coordinate `s(t)` along which a smooth kernel is integrated.
    fn sweep_coordinate(&self, _t: f64) -> Result<f64> {
        Err(PhaseError::Unsupported("sweep coordinate"))
    }

    fn sweep_rate(&self, _t: f64) -> Result<f64> {
        Err(PhaseError::Unsupported("sweep rate"))
    }

    /// Smooth-kernel density per unit sweep coordinate.
    fn kernel_density(&self, _k_prime: f64, _k: f64, _s: f64) -> Result<Complex64> {
        Err(PhaseError::Unsupported("kernel density"))
    }

    /// The kernel as an ordinary function of `(k', k, t)`. Not defined for
    /// diagonal kernels, which are distributions in `k'`.
    fn connection_kernel(&self, k_prime: f64, k: f64, t: f64) -> Result<Complex64> {
        match self.kernel_shape() {
            KernelShape::Vanishing => Ok(ZERO),
            KernelShape::Smooth => {
                let s = self.sweep_coordinate(t)?;
                Ok(self.kernel_density(k_prime, k, s)? * self.sweep_rate(t)?)
            }
            KernelShape::Diagonal => Err(PhaseError::Unsupported(
                "diagonal kernel is proportional to delta(k' - k); use diagonal_connection",
            )),
        }
    }
}

impl<M: ContinuumModel + ?Sized> ContinuumModel for &M {
    fn constants(&self) -> PhysicalConstants {
        (**self).constants()
    }
    fn spatial_components(&self) -> usize {
        (**self).spatial_components()
    }
    fn eigenvalue(&self, k: f64, t: f64) -> Result<f64> {
        (**self).eigenvalue(k, t)
    }
    fn eigenfunction_value(&self, k: f64, t: f64, x: f64) -> Result<Components> {
        (**self).eigenfunction_value(k, t, x)
    }
    fn kernel_shape(&self) -> KernelShape {
        (**self).kernel_shape()
    }
    fn has_closed_form_connection(&self) -> bool {
        (**self).has_closed_form_connection()
    }
    fn diagonal_connection(&self, k: f64, t: f64) -> Result<Complex64> {
        (**self).diagonal_connection(k, t)
    }
    fn sweep_coordinate(&self, t: f64) -> Result<f64> {
        (**self).sweep_coordinate(t)
    }
    fn sweep_rate(&self, t: f64) -> Result<f64> {
        (**self).sweep_rate(t)
    }
    fn kernel_density(&self, k_prime: f64, k: f64, s: f64) -> Result<Complex64> {
        (**self).kernel_density(k_prime, k, s)
    }
    fn connection_kernel(&self, k_prime: f64, k: f64, t: f64) -> Result<Complex64> {
        (**self).connection_kernel(k_prime, k, t)
    }
}

/// `gamma_D(k; t) = int_{t0}^{t} E(k; t') dt'`.
pub fn dynamical_phase(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<f64> {
    scheme.validate()?;
    let value = quadrature::integrate(
        |t| {
            let e = model.eigenvalue(k, t)?;
            check_finite(e, "eigenvalue", || format!("t = {t}"))?;
            Ok(Complex64::new(e, 0.0))
        },
        window.t0,
        window.t1,
        scheme.time_panels,
        scheme.time_order,
    )?;
    Ok(value.re)
}

/// Reality tolerance for the geometric phase.
pub fn reality_tolerance(real: f64) -> f64 {
    1e-6 * real.abs().max(1.0)
}

struct Quadrature {
    value: Complex64,
    error: f64,
    evaluations: usize,
}

/// Generalized geometric phase
/// `gamma_G(k; t) = int dt' int dk' <phi(k';t')| i hbar d/dt' |phi(k;t')>`.
///
/// Diagonal kernels collapse the `k'` integral analytically. Smooth kernels
/// are integrated over the sweep coordinate first and then over
/// `|k' - k| <= scheme.kprime_truncation`. The error estimate compares against
/// the same rule with every panel count halved.
pub fn geometric_phase(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<PhaseResult> {
    let raw = geometric_phase_complex(model, k, window, scheme)?;
    if raw.value.im.abs() > reality_tolerance(raw.value.re) {
        return Err(PhaseError::NotSelfAdjoint { real: raw.value.re, imag: raw.value.im });
    }
    PhaseResult::new(&model.constants(), raw.gamma_dynamical, raw.value.re, raw.value.im, raw.error, raw.evaluations)
}

/// Geometric phase before the reality check, for truncated or partial
/// sweeps whose imaginary part is a genuine truncation effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPhase {
    pub gamma_dynamical: f64,
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

pub fn geometric_phase_complex(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<RawPhase> {
    scheme.validate()?;
    let gamma_dynamical = dynamical_phase(model, k, window, scheme)?;
    if window.is_empty() {
        return Ok(RawPhase { gamma_dynamical: 0.0, value: ZERO, error: 0.0, evaluations: 0 });
    }
    let q = match model.kernel_shape() {
        KernelShape::Vanishing => Quadrature { value: ZERO, error: 0.0, evaluations: 0 },
        KernelShape::Diagonal => diagonal_route(model, k, window, scheme)?,
        KernelShape::Smooth => smooth_route(model, k, window, scheme)?,
    };
    check_finite(q.value.re, "geometric phase", || format!("k = {k}"))?;
    check_finite(q.value.im, "geometric phase", || format!("k = {k}"))?;
    Ok(RawPhase { gamma_dynamical, value: q.value, error: q.error, evaluations: q.evaluations })
}

fn error_floor(value: Complex64) -> f64 {
    64.0 * f64::EPSILON * value.norm().max(1.0)
}

fn diagonal_route(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<Quadrature> {
    let integrand = |t: f64| model.diagonal_connection(k, t);
    let fine = quadrature::integrate(integrand, window.t0, window.t1, scheme.time_panels, scheme.time_order)?;
    let coarse = if scheme.time_panels >= 2 {
        quadrature::integrate(integrand, window.t0, window.t1, scheme.time_panels / 2, scheme.time_order)?
    } else {
        quadrature::integrate(integrand, window.t0, window.t1, 1, (scheme.time_order / 2).max(1))?
    };
    Ok(Quadrature {
        value: fine,
        error: (fine - coarse).norm().max(error_floor(fine)),
        evaluations: scheme.time_panels * scheme.time_order,
    })
}

fn smooth_double_integral(
    model: &dyn ContinuumModel,
    k: f64,
    s0: f64,
    s1: f64,
    kprime_half_width: f64,
    kprime_panels: usize,
    s_panels: usize,
    order: usize,
) -> Result<Complex64> {
    let gl = GaussLegendre::new(order)?;
    let s_rule = gl.composite(s0, s1, s_panels);
    let k_rule = gl.composite(k - kprime_half_width, k + kprime_half_width, kprime_panels);
    let inner = exec::map_ordered(&k_rule.nodes, |&kp| -> Result<Complex64> {
        let mut acc = ZERO;
        for (&s, &w) in s_rule.nodes.iter().zip(&s_rule.weights) {
            let v = model.kernel_density(kp, k, s)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(PhaseError::NonFinite { quantity: "kernel", location: format!("k' = {kp}, s = {s}") });
            }
            acc += v * w;
        }
        Ok(acc)
    });
    let mut total = ZERO;
    for (v, w) in inner.into_iter().zip(&k_rule.weights) {
        total += v? * *w;
    }
    Ok(total)
}

fn smooth_route(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<Quadrature> {
    // The sweep coordinate must be monotone for the substitution t -> s.
    let probe = GaussLegendre::new(scheme.time_order)?.composite(window.t0, window.t1, scheme.time_panels);
    let mut sign = 0.0;
    for &t in &probe.nodes {
        let rate = model.sweep_rate(t)?;
        check_finite(rate, "sweep rate", || format!("t = {t}"))?;
        if rate != 0.0 {
            if sign != 0.0 && rate.signum() != sign {
                return invalid(format!("sweep coordinate is not monotone on [{}, {}]", window.t0, window.t1));
            }
            sign = rate.signum();
        }
    }
    let s0 = model.sweep_coordinate(window.t0)?;
    let s1 = model.sweep_coordinate(window.t1)?;
    let q = scheme.kprime_truncation;
    let fine = smooth_double_integral(model, k, s0, s1, q, scheme.kprime_points, scheme.time_panels, scheme.time_order)?;
    let coarse = smooth_double_integral(
        model,
        k,
        s0,
        s1,
        q,
        (scheme.kprime_points / 2).max(1),
        (scheme.time_panels / 2).max(1),
        scheme.time_order,
    )?;
    Ok(Quadrature {
        value: fine,
        error: (fine - coarse).norm().max(error_floor(fine)),
        evaluations: scheme.kprime_points * scheme.time_panels * scheme.time_order * scheme.time_order,
    })
}

/// The adiabatic coefficient `C(k'; t) = delta(k' - k) * phase_total`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticCoefficient {
    pub k: f64,
    pub window: TimeWindow,
    pub phase_total: Complex64,
    /// The coefficient carries a `delta(k' - k)` factor.
    pub delta_support: bool,
    pub phases: PhaseResult,
}

fn unit_phase(rad: f64) -> Complex64 {
    Complex64::from_polar(1.0, rad)
}

pub fn adiabatic_coefficient(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<AdiabaticCoefficient> {
    let phases = geometric_phase(model, k, window, scheme)?;
    Ok(AdiabaticCoefficient {
        k,
        window: *window,
        phase_total: unit_phase(phases.total_phase_rad()),
        delta_support: true,
        phases,
    })
}

/// `exp{(i/hbar)[-gamma_D + gamma_G]} |phi(k; t)>` at the end of the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedState {
    pub k: f64,
    pub t: f64,
    pub phase: PhaseResult,
    pub factor: Complex64,
}

impl EvolvedState {
    pub fn value(&self, model: &dyn ContinuumModel, x: f64) -> Result<Components> {
        let phi = model.eigenfunction_value(self.k, self.t, x)?;
        Ok([phi[0] * self.factor, phi[1] * self.factor])
    }
}

pub fn evolved_state(
    model: &dyn ContinuumModel,
    k: f64,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<EvolvedState> {
    let coefficient = adiabatic_coefficient(model, k, window, scheme)?;
    Ok(EvolvedState { k, t: window.t1, phase: coefficient.phases, factor: coefficient.phase_total })
}

/// Eigendifferential `|delta phi(k; t)> = int_k^{k + delta_k} |phi(k'; t)> dk'`.
#[derive(Clone, Copy)]
pub struct Eigendifferential<'a> {
    pub model: &'a dyn ContinuumModel,
    pub k: f64,
    pub delta_k: f64,
    pub t: f64,
}

impl<'a> Eigendifferential<'a> {
    pub fn new(model: &'a dyn ContinuumModel, k: f64, delta_k: f64, t: f64) -> Result<Self> {
        if !(delta_k.is_finite() && delta_k > 0.0) {
            return invalid(format!("delta_k must be finite and > 0, got {delta_k}"));
        }
        Ok(Self { model, k, delta_k, t })
    }

    /// Value at `x`; the band quadrature is refined with `|x|` to follow the
    /// `exp(i k' x)` oscillation across the band.
    pub fn value(&self, x: f64, order: usize) -> Result<Components> {
        let panels = (self.delta_k * x.abs() / std::f64::consts::PI).ceil() as usize + 2;
        let rule = GaussLegendre::new(order)?.composite(self.k, self.k + self.delta_k, panels);
        let mut acc = [ZERO; 2];
        for (&kp, &w) in rule.nodes.iter().zip(&rule.weights) {
            let phi = self.model.eigenfunction_value(kp, self.t, x)?;
            acc[0] += phi[0] * w;
            acc[1] += phi[1] * w;
        }
        Ok(acc)
    }
}

/// `<delta phi(k;t)|delta phi(k;t)>`, by direct spatial quadrature of the
/// eigendifferential's squared modulus on `[-L, L]` with
/// `L = space_truncation * 2^j`, `j < extrapolation_levels`, followed by
/// Richardson extrapolation in `1/L`.
pub fn eigendifferential_norm(
    model: &dyn ContinuumModel,
    k: f64,
    delta_k: f64,
    t: f64,
    scheme: &QuadratureScheme,
) -> Result<f64> {
    scheme.validate()?;
    let packet = Eigendifferential::new(model, k, delta_k, t)?;
    let gl = GaussLegendre::new(scheme.time_order)?;
    let order = scheme.time_order;
    let components = model.spatial_components().clamp(1, 2);
    let norm_on = |half_length: f64, panels: usize| -> Result<f64> {
        let rule = gl.composite(-half_length, half_length, panels);
        let values = exec::map_ordered(&rule.nodes, |&x| -> Result<f64> {
            let v = packet.value(x, order)?;
            let density: f64 = v[..components].iter().map(|c| c.norm_sqr()).sum();
            check_finite(density, "eigendifferential overlap", || format!("x = {x}"))
        });
        let mut sum = 0.0;
        for (v, w) in values.into_iter().zip(&rule.weights) {
            sum += v? * w;
        }
        Ok(sum)
    };
    let mut estimates = Vec::with_capacity(scheme.extrapolation_levels);
    for level in 0..scheme.extrapolation_levels {
        let scale = 1usize << level;
        let l = scheme.space_truncation * scale as f64;
        estimates.push(Complex64::new(norm_on(l, scheme.space_points * scale)?, 0.0));
    }
    if estimates.len() == 1 {
        return Ok(estimates[0].re);
    }
    Ok(richardson_extrapolate(&estimates, 2.0, 1)?.value.re)
}

/// A model whose eigenfunctions are all multiplied by one global phase
/// `exp(i alpha)`. Connections are unchanged.
pub struct GlobalPhase<M> {
    pub inner: M,
    pub alpha: f64,
}

impl<M: ContinuumModel> ContinuumModel for GlobalPhase<M> {
    fn constants(&self) -> PhysicalConstants {
        self.inner.constants()
    }
    fn spatial_components(&self) -> usize {
        self.inner.spatial_components()
    }
    fn eigenvalue(&self, k: f64, t: f64) -> Result<f64> {
        self.inner.eigenvalue(k, t)
    }
    fn eigenfunction_value(&self, k: f64, t: f64, x: f64) -> Result<Components> {
        let phase = unit_phase(self.alpha);
        let v = self.inner.eigenfunction_value(k, t, x)?;
        Ok([v[0] * phase, v[1] * phase])
    }
    fn kernel_shape(&self) -> KernelShape {
        self.inner.kernel_shape()
    }
    fn has_closed_form_connection(&self) -> bool {
        self.inner.has_closed_form_connection()
    }
    fn diagonal_connection(&self, k: f64, t: f64) -> Result<Complex64> {
        self.inner.diagonal_connection(k, t)
    }
    fn sweep_coordinate(&self, t: f64) -> Result<f64> {
        self.inner.sweep_coordinate(t)
    }
    fn sweep_rate(&self, t: f64) -> Result<f64> {
        self.inner.sweep_rate(t)
    }
    fn kernel_density(&self, k_prime: f64, k: f64, s: f64) -> Result<Complex64> {
        self.inner.kernel_density(k_prime, k, s)
    }
}
