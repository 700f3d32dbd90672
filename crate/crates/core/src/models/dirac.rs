//! Dirac particle in a slowly varying, spatially uniform electromagnetic
//! field, reduced per momentum `k` and sigma^3 sector to a 2x2 problem.
//!
//! With `g(k; t) = f(t) - k` the reduced Hamiltonian is
//! `[[m c^2, -s c g], [-s c g*, -m c^2]]` with eigenvalues
//! `+/- hbar omega = +/- c sqrt(m^2 c^2 + |g|^2)`. Plane-wave factors
//! `exp(i k z / hbar) / sqrt(2 pi hbar)` do not depend on time, so the
//! connection kernel is diagonal in `k`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::engine::{Components, ContinuumModel, KernelShape};
use crate::error::{check_finite, invalid, PhaseError, Result};
use crate::path::{ComplexPath, FnPath, RealPath};
use crate::quadrature;
use crate::spectral::{PhysicalConstants, QuadratureScheme, TimeWindow};

/// Which eigenvalue `+/- hbar omega` is transported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Upper => Branch::Lower,
            Branch::Lower => Branch::Upper,
        }
    }
}

/// Eigenvalue of sigma^3 selecting the 2x2 block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sigma3Sector {
    #[default]
    Plus,
    Minus,
}

impl Sigma3Sector {
    pub fn sign(self) -> f64 {
        match self {
            Sigma3Sector::Plus => 1.0,
            Sigma3Sector::Minus => -1.0,
        }
    }
}

const CLOSURE_TOLERANCE: f64 = 1e-12;

#[derive(Clone)]
pub struct DiracParameters {
    pub mass_path: Arc<dyn RealPath>,
    pub coupling_path: Arc<dyn ComplexPath>,
    pub sector: Sigma3Sector,
    pub branch: Branch,
}

impl DiracParameters {
    pub fn new(
        mass_path: Arc<dyn RealPath>,
        coupling_path: Arc<dyn ComplexPath>,
        sector: Sigma3Sector,
        branch: Branch,
    ) -> Self {
        Self { mass_path, coupling_path, sector, branch }
    }

    pub fn with_branch(&self, branch: Branch) -> Self {
        Self { branch, ..self.clone() }
    }

    /// Whether `(Re f, Im f, m)` returns to its starting point over `window`.
    pub fn is_closed(&self, window: &TimeWindow) -> bool {
        let (f0, f1) = (self.coupling_path.value(window.t0), self.coupling_path.value(window.t1));
        let (m0, m1) = (self.mass_path.value(window.t0), self.mass_path.value(window.t1));
        (f0 - f1).norm() <= CLOSURE_TOLERANCE * f0.norm().max(1.0)
            && (m0 - m1).abs() <= CLOSURE_TOLERANCE * m0.abs().max(1.0)
    }
}

impl std::fmt::Debug for DiracParameters {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiracParameters")
            .field("sector", &self.sector)
            .field("branch", &self.branch)
            .finish_non_exhaustive()
    }
}

/// Instantaneous `g = f - k` and `omega` for one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracMode {
    pub k: f64,
    pub g: Complex64,
    pub omega: f64,
}

/// Energy, reduced spinor and plane-wave normalization of one eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracEigensystem {
    pub energy: f64,
    /// Coefficients of `|1>` and `|2>`.
    pub spinor: [Complex64; 2],
    /// Prefactor of `exp(i k z / hbar)`.
    pub plane_wave_norm: f64,
    pub k: f64,
}

#[derive(Debug, Clone)]
pub struct DiracModel {
    pub params: DiracParameters,
    pub constants: PhysicalConstants,
}

impl DiracModel {
    pub fn new(params: DiracParameters, constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        Ok(Self { params, constants })
    }

    fn mass(&self, t: f64) -> Result<f64> {
        let m = self.params.mass_path.value(t);
        if !(m.is_finite() && m > 0.0) {
            return invalid(format!("mass must be > 0, got m({t}) = {m}"));
        }
        Ok(m)
    }

    pub fn mode(&self, k: f64, t: f64) -> Result<DiracMode> {
        let m = self.mass(t)?;
        let c = self.constants.c;
        let g = self.params.coupling_path.value(t) - k;
        let omega = c * (m * m * c * c + g.norm_sqr()).sqrt() / self.constants.hbar;
        Ok(DiracMode { k, g, omega: check_finite(omega, "omega", || format!("t = {t}"))? })
    }

    /// `m c^2 -/+ hbar omega` for the selected branch and the normalization
    /// denominator `(m c^2 -/+ hbar omega)^2 + |g|^2 c^2`.
    fn spinor_denominator(&self, k: f64, t: f64) -> Result<(DiracMode, f64, f64)> {
        let mode = self.mode(k, t)?;
        let c = self.constants.c;
        let rest = self.mass(t)? * c * c;
        let hw = self.constants.hbar * mode.omega;
        let g2c2 = mode.g.norm_sqr() * c * c;
        let shifted = match self.params.branch {
            // m c^2 - hbar omega without cancellation.
            Branch::Upper => -g2c2 / (rest + hw),
            Branch::Lower => rest + hw,
        };
        let denominator = shifted * shifted + g2c2;
        if denominator <= f64::MIN_POSITIVE || denominator <= 1e-28 * (rest * rest + hw * hw) {
            return Err(PhaseError::GaugeSingularity { t });
        }
        Ok((mode, shifted, denominator))
    }

    pub fn dirac_eigensystem(&self, k: f64, t: f64) -> Result<DiracEigensystem> {
        let (mode, shifted, denominator) = self.spinor_denominator(k, t)?;
        let c = self.constants.c;
        let s = self.params.sector.sign();
        let norm = denominator.sqrt();
        let spinor = [mode.g * (c * s / norm), Complex64::new(shifted / norm, 0.0)];
        Ok(DiracEigensystem {
            energy: self.params.branch.sign() * self.constants.hbar * mode.omega,
            spinor,
            plane_wave_norm: (2.0 * PI * self.constants.hbar).sqrt().recip(),
            k,
        })
    }

    /// Diagonal connection
    /// `a(k, t) = (i hbar c^2 / 2) (g* g' - g'* g) / ((m c^2 -/+ hbar omega)^2 + |g|^2 c^2)`.
    pub fn dirac_connection(&self, k: f64, t: f64) -> Result<f64> {
        let (mode, _, denominator) = self.spinor_denominator(k, t)?;
        let c = self.constants.c;
        let dg = self.params.coupling_path.derivative(t);
        let numerator = mode.g.conj() * dg - dg.conj() * mode.g;
        let value = Complex64::new(0.0, 0.5 * self.constants.hbar * c * c) * numerator / denominator;
        check_finite(value.re, "connection", || format!("t = {t}"))?;
        if value.im.abs() > 1e-12 * value.re.abs().max(1.0) {
            return Err(PhaseError::NotSelfAdjoint { real: value.re, imag: value.im });
        }
        Ok(value.re)
    }

    /// Reduced 2x2 Hamiltonian of the selected sigma^3 sector.
    pub fn reduced_hamiltonian(&self, k: f64, t: f64) -> Result<[[Complex64; 2]; 2]> {
        let m = self.mass(t)?;
        let c = self.constants.c;
        let s = self.params.sector.sign();
        let g = self.params.coupling_path.value(t) - k;
        let rest = Complex64::new(m * c * c, 0.0);
        let off = -g * (s * c);
        Ok([[rest, off], [off.conj(), -rest]])
    }
}

impl ContinuumModel for DiracModel {
    fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    fn spatial_components(&self) -> usize {
        2
    }

    fn eigenvalue(&self, k: f64, t: f64) -> Result<f64> {
        let mode = self.mode(k, t)?;
        Ok(self.params.branch.sign() * self.constants.hbar * mode.omega)
    }

    fn eigenfunction_value(&self, k: f64, t: f64, z: f64) -> Result<Components> {
        let eig = self.dirac_eigensystem(k, t)?;
        let wave = Complex64::from_polar(eig.plane_wave_norm, k * z / self.constants.hbar);
        Ok([eig.spinor[0] * wave, eig.spinor[1] * wave])
    }

    fn kernel_shape(&self) -> KernelShape {
        KernelShape::Diagonal
    }

    fn diagonal_connection(&self, k: f64, t: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.dirac_connection(k, t)?, 0.0))
    }
}

/// Spherical coordinates of the circuit as seen from `(k, 0, 0)`:
/// `(Re f - k) c = hbar omega sin(theta) cos(phi)`,
/// `Im f c = hbar omega sin(theta) sin(phi)`, `m c^2 = hbar omega cos(theta)`.
#[derive(Clone)]
pub struct SphericalPath {
    pub omega: Arc<dyn RealPath>,
    pub theta: Arc<dyn RealPath>,
    pub phi: Arc<dyn RealPath>,
}

impl std::fmt::Debug for SphericalPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphericalPath").finish_non_exhaustive()
    }
}

impl SphericalPath {
    /// Constant-`theta` circle traversed once, uniformly, over `[0, period]`.
    pub fn cone(omega: f64, theta: f64, period: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return invalid(format!("theta must lie in (0, pi), got {theta}"));
        }
        if !(omega > 0.0 && period > 0.0) {
            return invalid("cone requires omega > 0 and period > 0");
        }
        let rate = 2.0 * PI / period;
        Ok(Self {
            omega: Arc::new(crate::path::Constant(omega)),
            theta: Arc::new(crate::path::Constant(theta)),
            phi: Arc::new(crate::path::Linear { start: 0.0, rate }),
        })
    }

    /// Mass and coupling paths reproducing this circuit around momentum `k`.
    pub fn to_parameters(
        &self,
        k: f64,
        constants: &PhysicalConstants,
        sector: Sigma3Sector,
        branch: Branch,
    ) -> DiracParameters {
        let (hbar, c) = (constants.hbar, constants.c);
        let (w1, th1) = (self.omega.clone(), self.theta.clone());
        let (w2, th2) = (self.omega.clone(), self.theta.clone());
        let mass = FnPath::new(
            move |t: f64| hbar * w1.value(t) * th1.value(t).cos() / (c * c),
            move |t: f64| {
                let (w, th) = (w2.value(t), th2.value(t));
                hbar * (w2.derivative(t) * th.cos() - w * th.sin() * th2.derivative(t)) / (c * c)
            },
        );
        let (w3, th3, ph3) = (self.omega.clone(), self.theta.clone(), self.phi.clone());
        let (w4, th4, ph4) = (self.omega.clone(), self.theta.clone(), self.phi.clone());
        let coupling = FnPath::new(
            move |t: f64| k + Complex64::from_polar(hbar * w3.value(t) * th3.value(t).sin() / c, ph3.value(t)),
            move |t: f64| {
                let (w, th) = (w4.value(t), th4.value(t));
                let radial = w4.derivative(t) * th.sin() + w * th.cos() * th4.derivative(t);
                let angular = w * th.sin() * ph4.derivative(t);
                Complex64::new(radial, angular) * Complex64::from_polar(hbar / c, ph4.value(t))
            },
        );
        DiracParameters::new(Arc::new(mass), Arc::new(coupling), sector, branch)
    }

    fn check_closed(&self, window: &TimeWindow) -> Result<()> {
        let (a, b) = (window.t0, window.t1);
        let close = |x: f64, y: f64| (x - y).abs() <= CLOSURE_TOLERANCE * x.abs().max(1.0);
        if !close(self.omega.value(a), self.omega.value(b)) {
            return Err(PhaseError::OpenCircuit("omega differs at the window ends".into()));
        }
        if !close(self.theta.value(a), self.theta.value(b)) {
            return Err(PhaseError::OpenCircuit("theta differs at the window ends".into()));
        }
        let turns = (self.phi.value(b) - self.phi.value(a)) / (2.0 * PI);
        if (turns - turns.round()).abs() > CLOSURE_TOLERANCE * turns.abs().max(1.0) {
            return Err(PhaseError::OpenCircuit(format!("phi advances by {turns} turns")));
        }
        Ok(())
    }
}

/// Solid angle `Omega = oint (1 - cos theta) dphi` of a closed circuit.
pub fn solid_angle(path: &SphericalPath, window: &TimeWindow, scheme: &QuadratureScheme) -> Result<f64> {
    scheme.validate()?;
    path.check_closed(window)?;
    let value = quadrature::integrate(
        |t| {
            let th = path.theta.value(t);
            if !(th > 0.0 && th < PI) || path.omega.value(t) <= 0.0 {
                return invalid(format!("spherical path leaves theta in (0, pi), omega > 0 at t = {t}"));
            }
            Ok(Complex64::new((1.0 - th.cos()) * path.phi.derivative(t), 0.0))
        },
        window.t0,
        window.t1,
        scheme.time_panels,
        scheme.time_order,
    )?;
    Ok(value.re)
}

/// `-(hbar / 2) Omega`, the closed-circuit geometric phase.
pub fn solid_angle_phase(omega_solid: f64, constants: &PhysicalConstants) -> f64 {
    -0.5 * constants.hbar * omega_solid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{Constant, ConstantComplex};

    fn static_model(m: f64, f: Complex64, branch: Branch) -> DiracModel {
        let params = DiracParameters::new(Arc::new(Constant(m)), Arc::new(ConstantComplex(f)), Sigma3Sector::Plus, branch);
        DiracModel::new(params, PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn energy_by_substitution() {
        let model = static_model(1.0, Complex64::new(0.0, 0.0), Branch::Upper);
        let eig = model.dirac_eigensystem(1.0, 0.0).unwrap();
        assert!((eig.energy - 2f64.sqrt()).abs() < 1e-15);
        let lower = model.params.with_branch(Branch::Lower);
        let lower = DiracModel::new(lower, PhysicalConstants::default()).unwrap();
        assert!((lower.eigenvalue(1.0, 0.0).unwrap() + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn north_pole_singularity() {
        // g = 0: k equals the real coupling.
        let upper = static_model(1.0, Complex64::new(0.5, 0.0), Branch::Upper);
        assert!(matches!(upper.dirac_eigensystem(0.5, 0.0), Err(PhaseError::GaugeSingularity { .. })));
        assert!(matches!(upper.dirac_connection(0.5, 0.0), Err(PhaseError::GaugeSingularity { .. })));
        let lower = static_model(1.0, Complex64::new(0.5, 0.0), Branch::Lower);
        let eig = lower.dirac_eigensystem(0.5, 0.0).unwrap();
        assert!(eig.spinor[0].norm() < 1e-15);
        assert!((eig.spinor[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((eig.energy + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spinor_solves_reduced_hamiltonian() {
        for branch in [Branch::Upper, Branch::Lower] {
            for sector in [Sigma3Sector::Plus, Sigma3Sector::Minus] {
                let params = DiracParameters::new(
                    Arc::new(Constant(0.8)),
                    Arc::new(ConstantComplex(Complex64::new(0.3, -1.1))),
                    sector,
                    branch,
                );
                let model = DiracModel::new(params, PhysicalConstants::new(1.3, 0.9).unwrap()).unwrap();
                let eig = model.dirac_eigensystem(0.7, 0.0).unwrap();
                let h = model.reduced_hamiltonian(0.7, 0.0).unwrap();
                for row in 0..2 {
                    let hv = h[row][0] * eig.spinor[0] + h[row][1] * eig.spinor[1];
                    assert!((hv - eig.spinor[row] * eig.energy).norm() < 1e-13, "{branch:?} {sector:?}");
                }
            }
        }
    }

    #[test]
    fn static_coupling_has_no_connection() {
        let model = static_model(1.0, Complex64::new(0.2, 0.4), Branch::Upper);
        assert_eq!(model.dirac_connection(1.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn rotating_coupling_connection() {
        // g = r e^{i phi(t)}, constant r: numerator 2 i r^2 phi', connection
        // -hbar c^2 r^2 phi' / D.
        let (r, rate, m) = (0.6, 0.25, 0.9);
        let k = 0.4;
        let coupling = FnPath::new(
            move |t: f64| k + Complex64::from_polar(r, rate * t),
            move |t: f64| Complex64::new(0.0, rate) * Complex64::from_polar(r, rate * t),
        );
        let params = DiracParameters::new(Arc::new(Constant(m)), Arc::new(coupling), Sigma3Sector::Plus, Branch::Lower);
        let model = DiracModel::new(params, PhysicalConstants::default()).unwrap();
        let hw = (m * m + r * r).sqrt();
        let d = (m + hw).powi(2) + r * r;
        let expected = -r * r * rate / d;
        assert!((model.dirac_connection(k, 1.7).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn solid_angle_of_cones() {
        let s = QuadratureScheme::default();
        let w = TimeWindow::new(0.0, 10.0).unwrap();
        let half = SphericalPath::cone(1.0, PI / 2.0, 10.0).unwrap();
        assert!((solid_angle(&half, &w, &s).unwrap() - 2.0 * PI).abs() < 1e-12);
        let third = SphericalPath::cone(1.0, PI / 3.0, 10.0).unwrap();
        assert!((solid_angle(&third, &w, &s).unwrap() - PI).abs() < 1e-12);
        let tiny = SphericalPath::cone(1.0, 1e-4, 10.0).unwrap();
        assert!(solid_angle(&tiny, &w, &s).unwrap() < 1e-7);
        assert!(SphericalPath::cone(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn open_circuit_rejected() {
        let s = QuadratureScheme::default();
        let path = SphericalPath::cone(1.0, 1.0, 10.0).unwrap();
        let err = solid_angle(&path, &TimeWindow::new(0.0, 7.0).unwrap(), &s).unwrap_err();
        assert!(matches!(err, PhaseError::OpenCircuit(_)));
    }

    #[test]
    fn spherical_parameters_reproduce_coordinates() {
        let constants = PhysicalConstants::new(1.0, 2.0).unwrap();
        let path = SphericalPath::cone(1.5, 0.8, 4.0).unwrap();
        let params = path.to_parameters(0.3, &constants, Sigma3Sector::Plus, Branch::Lower);
        let model = DiracModel::new(params.clone(), constants).unwrap();
        let t = 1.1;
        let mode = model.mode(0.3, t).unwrap();
        assert!((mode.omega - 1.5).abs() < 1e-13);
        let phi = 2.0 * PI * t / 4.0;
        assert!((mode.g * 2.0 - Complex64::from_polar(1.5 * 0.8f64.sin(), phi)).norm() < 1e-13);
        assert!(params.is_closed(&TimeWindow::new(0.0, 4.0).unwrap()));
        assert!(!params.is_closed(&TimeWindow::new(0.0, 3.0).unwrap()));
        // Analytic derivatives agree with central differences.
        let h = 1e-6;
        let fd = (params.coupling_path.value(t + h) - params.coupling_path.value(t - h)) / (2.0 * h);
        assert!((fd - params.coupling_path.derivative(t)).norm() < 1e-8);
    }
}
