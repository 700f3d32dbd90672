//! Split-step Fourier propagation of a narrow wave packet through a static
//! sech^2 well. The transmitted packet is compared with the same packet
//! propagated freely, and the argument of their overlap estimates the exact
//! transmission phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, PhaseError, Result};
use crate::models::reflectionless::ReflectionlessParameters;
use crate::spectral::PhysicalConstants;

/// Periodic grid and time stepping for the propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketGrid {
    pub length: f64,
    pub points: usize,
    pub time_step: f64,
    /// Initial packet center, on the incident side of the well.
    pub start: f64,
    pub duration: f64,
}

impl WavepacketGrid {
    /// Grid for a packet at `k0` with momentum width `k0 / 10` that starts
    /// `distance` before the well and ends as far beyond it.
    pub fn for_packet(k0: f64, mass: f64, hbar: f64, distance: f64) -> Result<Self> {
        if !(k0 > 0.0 && distance > 0.0) {
            return invalid("wavepacket grid needs k0 > 0 and distance > 0");
        }
        let velocity = hbar * k0 / mass;
        let duration = 2.0 * distance / velocity;
        let sigma_x = 5.0 / k0;
        let spread = sigma_x * (1.0 + (hbar * duration / (2.0 * mass * sigma_x * sigma_x)).powi(2)).sqrt();
        let length = 2.0 * (distance + 8.0 * spread);
        let dx_max = 0.1_f64.min(PI / (8.0 * k0));
        let points = ((length / dx_max).ceil() as usize).next_power_of_two();
        Ok(Self { length, points, time_step: 0.05 / (hbar * k0 * k0 / mass).max(1.0), start: -distance, duration })
    }

    fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.time_step > 0.0 && self.duration > 0.0) || self.points < 16 {
            return invalid("invalid wavepacket grid");
        }
        if self.start.abs() >= 0.5 * self.length {
            return invalid("packet starts outside the grid");
        }
        Ok(())
    }
}

struct Propagator {
    dx: f64,
    xs: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Propagator {
    fn new(grid: &WavepacketGrid) -> Self {
        let n = grid.points;
        let dx = grid.length / n as f64;
        let xs = (0..n).map(|j| -0.5 * grid.length + j as f64 * dx).collect();
        let wavenumbers = (0..n)
            .map(|j| {
                let j = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * j / grid.length
            })
            .collect();
        let mut planner = FftPlanner::new();
        Self { dx, xs, wavenumbers, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    fn kinetic(&self, psi: &mut [Complex64], dt: f64, mass: f64, hbar: f64) {
        self.forward.process(psi);
        let scale = 1.0 / psi.len() as f64;
        for (z, &q) in psi.iter_mut().zip(&self.wavenumbers) {
            *z *= Complex64::from_polar(scale, -hbar * q * q * dt / (2.0 * mass));
        }
        self.inverse.process(psi);
    }
}

/// Fraction of the norm in the outer tenth of the grid, five percent per side.
fn edge_weight(psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let band = n / 20;
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let edge: f64 = psi[..band].iter().chain(&psi[n - band..]).map(|z| z.norm_sqr()).sum();
    edge / total
}

/// Estimate of `delta(k0)` for a Gaussian packet of momentum width
/// `packet_width` through the static well at the origin.
pub fn wavepacket_transmission_phase(
    params: &ReflectionlessParameters,
    constants: &PhysicalConstants,
    k0: f64,
    packet_width: f64,
    grid: &WavepacketGrid,
) -> Result<f64> {
    wavepacket_phase_with_depth(params, constants, k0, packet_width, grid, 1.0)
}

/// As [`wavepacket_transmission_phase`] with the well depth scaled by
/// `depth` (zero turns the potential off).
pub fn wavepacket_phase_with_depth(
    params: &ReflectionlessParameters,
    constants: &PhysicalConstants,
    k0: f64,
    packet_width: f64,
    grid: &WavepacketGrid,
    depth: f64,
) -> Result<f64> {
    grid.validate()?;
    if !(k0 > 0.0 && packet_width > 0.0 && packet_width <= 0.1 * k0 + 1e-15) {
        return invalid("packet must satisfy 0 < width <= k0 / 10");
    }
    let prop = Propagator::new(grid);
    let (hbar, mass, k1) = (constants.hbar, params.mass, params.k1);
    if prop.dx * k0.max(k1) > PI / 4.0 {
        return invalid("grid does not resolve k0 and k1");
    }
    let sigma_x = 0.5 / packet_width;
    let initial: Vec<Complex64> = prop
        .xs
        .iter()
        .map(|&x| {
            let d = x - grid.start;
            Complex64::from_polar((-d * d / (4.0 * sigma_x * sigma_x)).exp(), k0 * x)
        })
        .collect();
    if edge_weight(&initial) > 1e-10 {
        return Err(PhaseError::PacketAtBoundary { edge_weight: edge_weight(&initial) });
    }

    let steps = (grid.duration / grid.time_step).ceil() as usize;
    let dt = grid.duration / steps as f64;
    let depth_scale = depth * hbar * hbar * k1 * k1 / mass;
    let half_kick: Vec<Complex64> = prop
        .xs
        .iter()
        .map(|&x| {
            let v = -depth_scale / (k1 * x).cosh().powi(2);
            Complex64::from_polar(1.0, -v * dt / (2.0 * hbar))
        })
        .collect();

    let mut scattered = initial.clone();
    for _ in 0..steps {
        scattered.iter_mut().zip(&half_kick).for_each(|(z, p)| *z *= p);
        prop.kinetic(&mut scattered, dt, mass, hbar);
        scattered.iter_mut().zip(&half_kick).for_each(|(z, p)| *z *= p);
    }
    let mut free = initial;
    prop.kinetic(&mut free, grid.duration, mass, hbar);

    for psi in [&scattered, &free] {
        let w = edge_weight(psi);
        if w > 1e-8 {
            return Err(PhaseError::PacketAtBoundary { edge_weight: w });
        }
    }
    let overlap: Complex64 = free.iter().zip(&scattered).map(|(a, b)| a.conj() * b).sum::<Complex64>() * prop.dx;
    Ok(overlap.arg())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_potential_no_phase() {
        let p = ReflectionlessParameters::uniform(1.0, 1.0).unwrap();
        let c = PhysicalConstants::default();
        let grid = WavepacketGrid::for_packet(2.0, 1.0, 1.0, 40.0).unwrap();
        let d = wavepacket_phase_with_depth(&p, &c, 2.0, 0.2, &grid, 0.0).unwrap();
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn wide_packet_is_rejected() {
        let p = ReflectionlessParameters::uniform(1.0, 1.0).unwrap();
        let grid = WavepacketGrid::for_packet(1.0, 1.0, 1.0, 40.0).unwrap();
        assert!(wavepacket_transmission_phase(&p, &PhysicalConstants::default(), 1.0, 0.5, &grid).is_err());
    }
}
