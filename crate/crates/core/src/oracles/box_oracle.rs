//! Periodic-box regularization of the continuum. Box modes are Kronecker
//! normalized, so `int dk' <phi(k')|...|phi(k)>` over a band becomes a plain
//! sum over the modes inside it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::engine::{Components, GlobalPhase, ZERO};
use crate::error::{invalid, PhaseError, Result};
use crate::exec;
use crate::models::dirac::DiracModel;
use crate::models::free::FreeParticle;
use crate::models::reflectionless::ReflectionlessModel;
use crate::quadrature::GaussLegendre;
use crate::spectral::{PhysicalConstants, QuadratureScheme, SpectralBand, TimeWindow};

/// Fewest modes a band must hold before a box sum is attempted.
pub const MIN_BAND_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDiscretization {
    pub box_length: f64,
    /// Mode indices run over `-n_modes..=n_modes`.
    pub n_modes: usize,
    /// Uniform grid points across the box for spatial inner products.
    pub grid_points: usize,
}

impl BoxDiscretization {
    pub fn new(box_length: f64, n_modes: usize, grid_points: usize) -> Result<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return invalid(format!("box length must be finite and > 0, got {box_length}"));
        }
        if n_modes == 0 || grid_points < 2 {
            return invalid("a box needs at least one mode and two grid points");
        }
        Ok(Self { box_length, n_modes, grid_points })
    }

    /// Box whose modes reach `k_max` and whose grid spacing is at most `dx`.
    pub fn covering(box_length: f64, k_max: f64, dx: f64) -> Result<Self> {
        let n_modes = (k_max.abs() * box_length / (2.0 * PI)).ceil() as usize + 2;
        let grid_points = (box_length / dx).ceil() as usize;
        Self::new(box_length, n_modes, grid_points)
    }

    pub fn mode_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn grid_spacing(&self) -> f64 {
        self.box_length / self.grid_points as f64
    }

    /// Grid `x_j = -L/2 + j dx`, `j < grid_points`.
    pub fn grid(&self) -> Vec<f64> {
        let dx = self.grid_spacing();
        (0..self.grid_points).map(|j| -0.5 * self.box_length + j as f64 * dx).collect()
    }

    /// Folds `x` into `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.box_length;
        x - l * ((x + 0.5 * l) / l).floor()
    }

    pub fn covers(&self, band: &SpectralBand, hbar: f64) -> bool {
        self.n_modes as f64 * self.mode_spacing() * hbar >= band.k_lo.abs().max(band.k_hi.abs())
    }
}

/// A model that can be placed in a periodic box.
pub trait BoxModes: Send + Sync {
    fn constants(&self) -> PhysicalConstants;

    /// Quantized labels of the box modes at time `t`, ascending.
    fn quantized_labels(&self, grid: &BoxDiscretization, t: f64) -> Result<Vec<f64>>;

    /// A box mode at `x` in `[-L/2, L/2)`, up to normalization. Must be smooth
    /// in `t` for fixed `x`.
    fn box_mode(&self, grid: &BoxDiscretization, k: f64, t: f64, x: f64) -> Result<Components>;
}

impl BoxModes for FreeParticle {
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }
    fn quantized_labels(&self, grid: &BoxDiscretization, _t: f64) -> Result<Vec<f64>> {
        let n = grid.n_modes as i64;
        Ok((-n..=n).map(|j| j as f64 * grid.mode_spacing()).collect())
    }
    fn box_mode(&self, _grid: &BoxDiscretization, k: f64, _t: f64, x: f64) -> Result<Components> {
        Ok([Complex64::from_polar(1.0, k * x), ZERO])
    }
}

impl BoxModes for DiracModel {
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }
    fn quantized_labels(&self, grid: &BoxDiscretization, _t: f64) -> Result<Vec<f64>> {
        let n = grid.n_modes as i64;
        let dk = self.constants.hbar * grid.mode_spacing();
        Ok((-n..=n).map(|j| j as f64 * dk).collect())
    }
    fn box_mode(&self, _grid: &BoxDiscretization, k: f64, t: f64, z: f64) -> Result<Components> {
        let spinor = self.dirac_eigensystem(k, t)?.spinor;
        let wave = Complex64::from_polar(1.0, k * z / self.constants.hbar);
        Ok([spinor[0] * wave, spinor[1] * wave])
    }
}

/// Periodic continuation of the scattering states: with `u` the wrapped
/// distance to the well, `(i k - k1 tanh(k1 u)) e^{i k (u + x0)}` is
/// continuous across the box edge when `k L + 2 arctan(k1 / k) = 2 pi n`.
impl BoxModes for ReflectionlessModel {
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    fn quantized_labels(&self, grid: &BoxDiscretization, _t: f64) -> Result<Vec<f64>> {
        let k1 = self.k1();
        let l = grid.box_length;
        if l * k1 <= 2.0 {
            return invalid("box too small for the well: need L k1 > 2");
        }
        let mut labels = Vec::with_capacity(2 * grid.n_modes);
        for n in 1..=grid.n_modes {
            let target = 2.0 * PI * n as f64;
            let mut k = target / l;
            for _ in 0..100 {
                let h = k * l + 2.0 * (k1 / k).atan() - target;
                let step = h / (l - 2.0 * k1 / (k * k + k1 * k1));
                k -= step;
                if step.abs() <= 4.0 * f64::EPSILON * k.abs() {
                    break;
                }
            }
            labels.push(k);
        }
        // The phase shift is odd in k, so the negative branch mirrors the positive one.
        let mut all: Vec<f64> = labels.iter().rev().map(|k| -k).collect();
        all.extend(labels);
        Ok(all)
    }

    fn box_mode(&self, grid: &BoxDiscretization, k: f64, t: f64, x: f64) -> Result<Components> {
        let k1 = self.k1();
        let x0 = self.params.x0_path.value(t);
        let u = grid.wrap(x - x0);
        let amplitude = Complex64::new(-k1 * (k1 * u).tanh(), k);
        Ok([amplitude * Complex64::from_polar(1.0, k * (u + x0)), ZERO])
    }
}

impl<M: BoxModes> BoxModes for GlobalPhase<M> {
    fn constants(&self) -> PhysicalConstants {
        self.inner.constants()
    }
    fn quantized_labels(&self, grid: &BoxDiscretization, t: f64) -> Result<Vec<f64>> {
        self.inner.quantized_labels(grid, t)
    }
    fn box_mode(&self, grid: &BoxDiscretization, k: f64, t: f64, x: f64) -> Result<Components> {
        let v = self.inner.box_mode(grid, k, t, x)?;
        let p = Complex64::from_polar(1.0, self.alpha);
        Ok([v[0] * p, v[1] * p])
    }
}

type Sampled = Vec<Components>;

fn sample_normalized(model: &dyn BoxModes, grid: &BoxDiscretization, xs: &[f64], k: f64, t: f64) -> Result<Sampled> {
    let mut values = Vec::with_capacity(xs.len());
    let mut norm = 0.0;
    for &x in xs {
        let v = model.box_mode(grid, k, t, x)?;
        norm += v[0].norm_sqr() + v[1].norm_sqr();
        values.push(v);
    }
    let scale = (norm * grid.grid_spacing()).sqrt();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(PhaseError::NonFinite { quantity: "box-mode norm", location: format!("k = {k}, t = {t}") });
    }
    for v in &mut values {
        v[0] /= scale;
        v[1] /= scale;
    }
    Ok(values)
}

fn inner_product(a: &Sampled, b: &Sampled, dx: f64) -> Complex64 {
    let mut acc = ZERO;
    for (u, v) in a.iter().zip(b) {
        acc += u[0].conj() * v[0] + u[1].conj() * v[1];
    }
    acc * dx
}

/// Discrete geometric phase of one box mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxPhase {
    /// Label of the transported mode, the one nearest the band center.
    pub k: f64,
    /// `int dt sum_n w_n <n| i hbar d/dt |m>`, in action units.
    pub gamma: f64,
    pub imag: f64,
    /// Modes entering the sum.
    pub modes: usize,
}

/// Box-sum estimate of the geometric phase of the mode nearest the band
/// center. The sum runs over modes symmetric about it that lie inside the
/// band, with half weight on the outermost pair. Time derivatives are
/// five-point central differences of the numerically normalized modes.
pub fn box_berry_phase(
    model: &dyn BoxModes,
    band: &SpectralBand,
    grid: &BoxDiscretization,
    window: &TimeWindow,
    scheme: &QuadratureScheme,
) -> Result<BoxPhase> {
    band.validate()?;
    scheme.validate()?;
    let constants = model.constants();
    if !grid.covers(band, constants.hbar) {
        return invalid("box modes do not cover the band");
    }
    let labels = model.quantized_labels(grid, window.t0)?;
    let inside: Vec<f64> = labels.iter().copied().filter(|k| band.contains(*k)).collect();
    if inside.len() < MIN_BAND_MODES {
        return Err(PhaseError::UnderResolved { modes: inside.len(), required: MIN_BAND_MODES });
    }
    let center = band.center();
    let m = (0..inside.len())
        .min_by(|&a, &b| (inside[a] - center).abs().total_cmp(&(inside[b] - center).abs()))
        .expect("non-empty");
    let half = m.min(inside.len() - 1 - m);
    if half == 0 {
        return Err(PhaseError::UnderResolved { modes: 1, required: MIN_BAND_MODES });
    }
    let used = &inside[m - half..=m + half];
    let k_target = inside[m];
    if window.is_empty() {
        return Ok(BoxPhase { k: k_target, gamma: 0.0, imag: 0.0, modes: used.len() });
    }

    let xs = grid.grid();
    let dx = grid.grid_spacing();
    let rule = GaussLegendre::new(scheme.time_order)?.composite(window.t0, window.t1, scheme.time_panels);
    let h = 1e-3 * window.duration() / rule.len() as f64;
    let hbar = constants.hbar;
    let per_node = exec::map_ordered(&rule.nodes, |&t| -> Result<Complex64> {
        let stencil = [-2.0, -1.0, 1.0, 2.0].map(|j| sample_normalized(model, grid, &xs, k_target, t + j * h));
        let [m2, m1, p1, p2] = stencil;
        let (m2, m1, p1, p2) = (m2?, m1?, p1?, p2?);
        let derivative: Sampled = (0..xs.len())
            .map(|i| {
                let d = |c: usize| ((p1[i][c] - m1[i][c]) * 8.0 - (p2[i][c] - m2[i][c])) / (12.0 * h);
                [d(0), d(1)]
            })
            .collect();
        let mut acc = ZERO;
        for (j, &kn) in used.iter().enumerate() {
            let weight = if j == 0 || j == used.len() - 1 { 0.5 } else { 1.0 };
            let bra = sample_normalized(model, grid, &xs, kn, t)?;
            acc += inner_product(&bra, &derivative, dx) * weight;
        }
        Ok(acc * Complex64::new(0.0, hbar))
    });
    let mut total = ZERO;
    for (v, w) in per_node.into_iter().zip(&rule.weights) {
        total += v? * *w;
    }
    Ok(BoxPhase { k: k_target, gamma: total.re, imag: total.im, modes: used.len() })
}

/// Time panels that follow the beat between the modes of a band when the
/// well crosses the whole box once.
pub fn box_time_panels(grid: &BoxDiscretization, band: &SpectralBand) -> usize {
    ((grid.box_length * band.width() / PI).ceil() as usize).max(16)
}

/// Weight of a test state captured by the box continuum plus the bound
/// state, against its own norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    pub continuum: f64,
    pub bound: f64,
    pub norm: f64,
}

impl Completeness {
    pub fn defect(&self) -> f64 {
        (self.continuum + self.bound - self.norm).abs()
    }
}

pub fn box_completeness<F>(model: &ReflectionlessModel, grid: &BoxDiscretization, t: f64, packet: F) -> Result<Completeness>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let xs = grid.grid();
    let dx = grid.grid_spacing();
    let values: Sampled = xs.iter().map(|&x| [packet(x), ZERO]).collect();
    let norm = inner_product(&values, &values, dx).re;
    let labels = model.quantized_labels(grid, t)?;
    let weights = exec::try_map_ordered(&labels, |&k| {
        let mode = sample_normalized(model, grid, &xs, k, t)?;
        Ok::<f64, PhaseError>(inner_product(&mode, &values, dx).norm_sqr())
    })?;
    let x0 = model.params.x0_path.value(t);
    let overlap: Complex64 = xs
        .iter()
        .zip(&values)
        .map(|(&x, v)| v[0] * model.bound_state(t, x0 + grid.wrap(x - x0)))
        .sum::<Complex64>()
        * dx;
    Ok(Completeness { continuum: weights.iter().sum(), bound: overlap.norm_sqr(), norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::reflectionless::ReflectionlessParameters;
    use std::sync::Arc;

    fn static_well() -> ReflectionlessModel {
        let path = crate::models::reflectionless::UniformSweep { start: 0.0, speed: 0.0 };
        let p = ReflectionlessParameters::new(1.0, 1.0, Arc::new(path)).unwrap();
        ReflectionlessModel::new(p, PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn quantization_condition() {
        let m = static_well();
        let grid = BoxDiscretization::new(100.0, 30, 1000).unwrap();
        let labels = m.quantized_labels(&grid, 0.0).unwrap();
        assert_eq!(labels.len(), 60);
        for (n, &k) in labels[30..].iter().enumerate() {
            let h = k * 100.0 + 2.0 * (1.0 / k).atan() - 2.0 * PI * (n + 1) as f64;
            assert!(h.abs() < 1e-10);
        }
        assert!(labels.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn modes_are_continuous_at_the_edge() {
        let m = static_well();
        let grid = BoxDiscretization::new(60.0, 10, 600).unwrap();
        let k = m.quantized_labels(&grid, 0.0).unwrap()[13];
        let a = m.box_mode(&grid, k, 0.0, 30.0 - 1e-9).unwrap()[0];
        let b = m.box_mode(&grid, k, 0.0, -30.0).unwrap()[0];
        assert!((a - b).norm() < 1e-7);
    }

    #[test]
    fn modes_are_orthonormal() {
        let m = static_well();
        let grid = BoxDiscretization::new(80.0, 12, 800).unwrap();
        let xs = grid.grid();
        let labels = m.quantized_labels(&grid, 0.0).unwrap();
        let a = sample_normalized(&m, &grid, &xs, labels[14], 0.0).unwrap();
        let b = sample_normalized(&m, &grid, &xs, labels[15], 0.0).unwrap();
        let c = sample_normalized(&m, &grid, &xs, labels[9], 0.0).unwrap();
        assert!((inner_product(&a, &a, grid.grid_spacing()) - 1.0).norm() < 1e-12);
        assert!(inner_product(&a, &b, grid.grid_spacing()).norm() < 1e-10);
        assert!(inner_product(&a, &c, grid.grid_spacing()).norm() < 1e-10);
    }

    #[test]
    fn free_box_phase_vanishes() {
        let m = FreeParticle::new(1.0, PhysicalConstants::default()).unwrap();
        let grid = BoxDiscretization::new(200.0, 60, 400).unwrap();
        let band = SpectralBand::centered(1.0, 0.4, 2).unwrap();
        let window = TimeWindow::new(0.0, 5.0).unwrap();
        let r = box_berry_phase(&m, &band, &grid, &window, &QuadratureScheme::default().with_time_panels(4)).unwrap();
        assert!(r.gamma.abs() < 1e-20);
        assert!(r.modes >= MIN_BAND_MODES);
    }

    #[test]
    fn narrow_band_is_rejected() {
        let m = FreeParticle::new(1.0, PhysicalConstants::default()).unwrap();
        let grid = BoxDiscretization::new(20.0, 10, 100).unwrap();
        let band = SpectralBand::centered(1.0, 0.4, 2).unwrap();
        let window = TimeWindow::new(0.0, 1.0).unwrap();
        let err = box_berry_phase(&m, &band, &grid, &window, &QuadratureScheme::default()).unwrap_err();
        assert!(matches!(err, PhaseError::UnderResolved { .. }));
    }

    #[test]
    fn completeness_with_bound_state() {
        let m = static_well();
        let grid = BoxDiscretization::covering(120.0, 8.0, 0.1).unwrap();
        let c = box_completeness(&m, &grid, 0.0, |x| {
            Complex64::from_polar((-(x - 0.5) * (x - 0.5) / 2.0).exp(), 1.0 * x)
        })
        .unwrap();
        assert!(c.bound > 0.1);
        assert!(c.defect() < 1e-4 * c.norm, "{c:?}");
    }
}
