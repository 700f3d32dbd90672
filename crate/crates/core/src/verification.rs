//! Acceptance checks, each reporting a measured value against its target. The same
//! functions back the `verify` command line and the acceptance test target.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use crate::engine::{self, ContinuumModel, GlobalPhase, KernelShape};
use crate::error::Result;
use crate::models::dirac::{solid_angle, solid_angle_phase, Branch, DiracModel, Sigma3Sector, SphericalPath};
use crate::models::reflectionless::{
    reflectionless_phase_closed_form, ReflectionlessModel, ReflectionlessParameters,
};
use crate::oracles::box_oracle::{box_berry_phase, box_time_panels, BoxDiscretization};
use crate::oracles::kernel_quad::kernel_x_quadrature;
use crate::oracles::two_level::{steps_for, two_level_evolve, TwoLevelSystem};
use crate::oracles::wavepacket::{wavepacket_transmission_phase, WavepacketGrid};
use crate::quadrature::richardson_extrapolate;
use crate::scattering::{s_matrix_eigenvalue, transmission_comparison, SplitHamiltonian};
use crate::spectral::{PhysicalConstants, QuadratureScheme, SpectralBand, TimeWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fast,
    Full,
}

/// Deliberate defects used to confirm that a check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Flips the sign of the Dirac connection numerator.
    DiracConnectionSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub name: &'static str,
    pub measured: f64,
    pub target: f64,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} {}: measured {:.3e} vs target {:.3e} ({:.2} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub tier: Tier,
    pub criteria: Vec<CriterionReport>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

fn timed<F>(name: &'static str, time_limit: f64, f: F) -> CriterionReport
where
    F: FnOnce() -> Result<(f64, f64, bool, String)>,
{
    let start = Instant::now();
    let outcome = f();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((measured, target, passed, mut detail)) => {
            let in_time = seconds < time_limit;
            if !in_time {
                detail.push_str(&format!(" exceeded {time_limit} s"));
            }
            CriterionReport { name, measured, target, passed: passed && in_time, detail, seconds }
        }
        Err(e) => CriterionReport {
            name,
            measured: f64::NAN,
            target: f64::NAN,
            passed: false,
            detail: format!("error: {e}"),
            seconds,
        },
    }
}

/// Half-length of the crossing and plain test resolution for the
/// reflectionless well with `k1 = 1`.
pub const REFLECTIONLESS_HALF_LENGTH: f64 = 16.0;

fn unit_well(k1: f64) -> Result<ReflectionlessModel> {
    ReflectionlessModel::new(ReflectionlessParameters::uniform(k1, 1.0)?, PhysicalConstants::default())
}

/// Numeric smooth-kernel phase against the closed form at `k in {1, 2, 5}`.
pub fn reflectionless_closed_form() -> CriterionReport {
    timed("reflectionless closed form", 60.0, || {
        let model = unit_well(1.0)?;
        let scheme = model.recommended_scheme(REFLECTIONLESS_HALF_LENGTH);
        let mut worst: f64 = 0.0;
        let mut rows = Vec::new();
        for k in [1.0, 2.0, 5.0] {
            let numeric = model.sweep_phase(k, &scheme)?.gamma_geometric();
            let exact = reflectionless_phase_closed_form(&model.params, &model.constants, k)?;
            worst = worst.max((numeric - exact).abs());
            rows.push(format!("k={k}: {numeric:.10}"));
        }
        let target = 1e-3;
        Ok((worst, target, worst < target, format!("[{}; k=0.5 lies in the bound region and is skipped]", rows.join(", "))))
    })
}

/// Sign-flipped connection, for mutation checks.
struct FlippedConnection(DiracModel);

impl ContinuumModel for FlippedConnection {
    fn constants(&self) -> PhysicalConstants {
        self.0.constants
    }
    fn spatial_components(&self) -> usize {
        2
    }
    fn eigenvalue(&self, k: f64, t: f64) -> Result<f64> {
        self.0.eigenvalue(k, t)
    }
    fn eigenfunction_value(&self, k: f64, t: f64, x: f64) -> Result<engine::Components> {
        self.0.eigenfunction_value(k, t, x)
    }
    fn kernel_shape(&self) -> KernelShape {
        KernelShape::Diagonal
    }
    fn diagonal_connection(&self, k: f64, t: f64) -> Result<Complex64> {
        Ok(-self.0.diagonal_connection(k, t)?)
    }
}

/// Dirac model driven around a cone of half-angle `theta` once over `[0, period]`.
pub fn cone_model(theta: f64, omega: f64, period: f64, constants: PhysicalConstants, branch: Branch) -> Result<(DiracModel, SphericalPath)> {
    let path = SphericalPath::cone(omega, theta, period)?;
    let params = path.to_parameters(0.0, &constants, Sigma3Sector::Plus, branch);
    Ok((DiracModel::new(params, constants)?, path))
}

pub fn dirac_solid_angle(mutation: Mutation) -> CriterionReport {
    timed("dirac solid-angle identity", 10.0, || {
        let constants = PhysicalConstants::default();
        let scheme = QuadratureScheme::default();
        let window = TimeWindow::new(0.0, 1.0)?;
        let mut worst: f64 = 0.0;
        for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
            let (model, path) = cone_model(theta, 1.0, 1.0, constants, Branch::Lower)?;
            let gamma = match mutation {
                Mutation::None => engine::geometric_phase(&model, 0.0, &window, &scheme)?,
                Mutation::DiracConnectionSign => engine::geometric_phase(&FlippedConnection(model), 0.0, &window, &scheme)?,
            }
            .gamma_geometric();
            let omega_solid = solid_angle(&path, &window, &scheme)?;
            let closed = -0.5 * constants.hbar * 2.0 * PI * (1.0 - theta.cos());
            debug_assert!((solid_angle_phase(omega_solid, &constants) - closed).abs() < 1e-9);
            worst = worst.max((gamma - closed).abs());
        }
        let target = 1e-4 * constants.hbar;
        Ok((worst, target, worst < target, "theta in {pi/6, pi/3, pi/2}".into()))
    })
}

/// Slowness of the shorter two-level run.
pub const TWO_LEVEL_SLOWNESS: f64 = 200.0;

/// Geometric phase extracted from brute-force evolution around the cone at
/// `theta` with `hbar omega = 1`, and its distance to `-Omega / 2`.
pub fn two_level_geometric_phase(theta: f64, slowness: f64) -> Result<(f64, f64)> {
    let constants = PhysicalConstants::default();
    let (model, _) = cone_model(theta, 1.0, 1.0, constants, Branch::Lower)?;
    let start = model.dirac_eigensystem(0.0, 0.0)?;
    let end = model.dirac_eigensystem(0.0, 1.0)?;
    let norm = model.reduced_hamiltonian(0.0, 0.0)?.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let sys = TwoLevelSystem::new(move |s| model.reduced_hamiltonian(0.0, s), slowness, constants)?;
    let window = TimeWindow::new(0.0, slowness)?;
    let steps = steps_for(&window, norm, constants.hbar, 0.02);
    let psi = two_level_evolve(&sys, start.spinor, &window, steps)?;
    let projection = end.spinor[0].conj() * psi[0] + end.spinor[1].conj() * psi[1];
    // gamma_D = E T with E = -hbar omega on the lower branch.
    let gamma_d = start.energy * slowness;
    let target = -0.5 * 2.0 * PI * (1.0 - theta.cos());
    let mut geometric = projection.arg() + gamma_d / constants.hbar;
    geometric -= 2.0 * PI * ((geometric - target) / (2.0 * PI)).round();
    Ok((geometric, (geometric - target).abs()))
}

pub fn two_level_oracle() -> CriterionReport {
    timed("two-level adiabatic oracle", 60.0, || {
        let theta = PI / 3.0;
        let (_, e1) = two_level_geometric_phase(theta, TWO_LEVEL_SLOWNESS)?;
        let (_, e2) = two_level_geometric_phase(theta, 2.0 * TWO_LEVEL_SLOWNESS)?;
        let passed = e2 < 0.6 * e1 && e2 < 0.02;
        Ok((e2, 0.02, passed, format!("eps(T={TWO_LEVEL_SLOWNESS}) = {e1:.3e}, eps(2T) = {e2:.3e}, ratio {:.3}", e2 / e1)))
    })
}

/// Box sum for the well at `k = k1 = 1` in a box of length `l`, the well
/// crossing the whole box once.
pub fn box_phase_reflectionless(l: f64) -> Result<f64> {
    let model = unit_well(1.0)?;
    let band = SpectralBand::centered(1.0, 0.4, 2)?;
    let grid = BoxDiscretization::covering(l, 1.3, 0.25)?;
    let window = model.params.crossing_window(0.5 * l)?;
    let scheme = QuadratureScheme { time_panels: box_time_panels(&grid, &band) / 2, ..QuadratureScheme::default() };
    Ok(box_berry_phase(&model, &band, &grid, &window, &scheme)?.gamma)
}

pub fn box_oracle_convergence() -> CriterionReport {
    timed("box-oracle convergence", 120.0, || {
        let values: Vec<f64> = [200.0, 400.0, 800.0].into_iter().map(box_phase_reflectionless).collect::<Result<_>>()?;
        let estimates: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let extrapolated = richardson_extrapolate(&estimates, 2.0, 1)?.value.re;
        let error = (extrapolated - 1.0).abs();
        Ok((error, 2e-3, error < 2e-3, format!("L=200,400,800: {values:.6?} -> {extrapolated:.6}")))
    })
}

pub fn s_matrix_layer() -> CriterionReport {
    timed("s-matrix layer", 60.0, || {
        let model = unit_well(1.0)?;
        let split = SplitHamiltonian::reflectionless(model.params.clone(), model.constants, REFLECTIONLESS_HALF_LENGTH)?;
        let scheme = model.recommended_scheme(REFLECTIONLESS_HALF_LENGTH);
        let (mut unitarity, mut identity, mut delta0): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for k in SpectralBand::new(1.0, 5.0, 5)?.points() {
            let s = s_matrix_eigenvalue(&split, k, &scheme)?;
            let engine = engine::geometric_phase(&model, k, &split.window, &scheme)?;
            unitarity = unitarity.max((s.value.norm() - 1.0).abs());
            identity = identity.max((s.value.arg() - engine.phase_geometric_rad()).abs());
            let d0 = reflectionless_phase_closed_form(&model.params, &model.constants, k)?;
            delta0 = delta0.max((s.phase_rad - d0).abs());
        }
        let passed = unitarity < 1e-10 && identity < 1e-14 && delta0 < 1e-3;
        Ok((delta0, 1e-3, passed, format!("||S|-1| = {unitarity:.1e}, |arg S - gamma/hbar| = {identity:.1e}")))
    })
}

pub fn phase_gap_table() -> CriterionReport {
    timed("phase-gap table", 10.0, || {
        let params = ReflectionlessParameters::uniform(2f64.sqrt(), 1.0)?;
        let rows = transmission_comparison(&params, &SpectralBand::new(1.5, 10.0, 86)?)?;
        let ordered = rows.iter().all(|r| r.delta_exact > r.delta0 && r.delta0 > 0.0);
        let max_at_first = rows.iter().all(|r| r.difference <= rows[0].difference);
        let at = |k: f64| {
            rows.iter().min_by(|a, b| (a.k - k).abs().total_cmp(&(b.k - k).abs())).expect("rows").difference
        };
        let ratio = at(5.0) / at(10.0);
        let deviation = (ratio / 8.0 - 1.0).abs();
        let passed = ordered && max_at_first && deviation < 0.2;
        Ok((deviation, 0.2, passed, format!("d(5)/d(10) = {ratio:.3} vs 8, ordering {ordered}, max at k=1.5 {max_at_first}")))
    })
}

pub fn kernel_certification() -> CriterionReport {
    timed("kernel certification", 30.0, || {
        let model = unit_well(1.0)?;
        let t = 0.3;
        let mut worst: f64 = 0.0;
        for q in [0.5, 1.0, 2.0] {
            for k in [0.7, 1.3, 2.9] {
                let closed = model.connection_kernel_smooth(k - q, k, t)?;
                let direct = kernel_x_quadrature(&model, k - q, k, t, 80.0, 8000)?;
                worst = worst.max((closed - direct).norm());
            }
        }
        Ok((worst, 1e-8, worst < 1e-8, "q in {0.5, 1, 2}, k in {0.7, 1.3, 2.9}".into()))
    })
}

pub fn wavepacket_oracle() -> CriterionReport {
    timed("wavepacket oracle", 600.0, || {
        let params = ReflectionlessParameters::uniform(1.0, 1.0)?;
        let constants = PhysicalConstants::default();
        let grid = WavepacketGrid::for_packet(1.0, 1.0, 1.0, 150.0)?;
        let delta = wavepacket_transmission_phase(&params, &constants, 1.0, 0.1, &grid)?;
        let error = (delta - PI / 2.0).abs();
        Ok((error, 0.05, error < 0.05, format!("delta = {delta:.5}")))
    })
}

/// Eigendifferential normalization plus additivity and gauge invariance of the phase.
pub fn property_suite() -> CriterionReport {
    timed("property suites", 60.0, || {
        let mut notes = Vec::new();
        let delta_k = 0.1;
        let scheme = QuadratureScheme { space_truncation: 20.0 * PI / delta_k, space_points: 512, ..QuadratureScheme::default() };
        let well = unit_well(1.0)?;
        let (dirac, _) = cone_model(PI / 3.0, 1.0, 1.0, PhysicalConstants::default(), Branch::Lower)?;
        let mut worst: f64 = 0.0;
        for (label, model) in [("reflectionless", &well as &dyn ContinuumModel), ("dirac", &dirac)] {
            let n = engine::eigendifferential_norm(model, 1.0, delta_k, 0.0, &scheme)?;
            let rel = (n / delta_k - 1.0).abs();
            notes.push(format!("{label} norm/dk-1 = {rel:.1e}"));
            worst = worst.max(rel / 1e-3);
        }

        let window = TimeWindow::new(0.0, 1.0)?;
        let (a, b) = window.split_at(0.37)?;
        let fine = QuadratureScheme::default();
        let whole = engine::geometric_phase(&dirac, 0.0, &window, &fine)?.gamma_geometric();
        let parts = engine::geometric_phase(&dirac, 0.0, &a, &fine)?.gamma_geometric()
            + engine::geometric_phase(&dirac, 0.0, &b, &fine)?.gamma_geometric();
        let additivity = (whole - parts).abs();
        notes.push(format!("additivity {additivity:.1e}"));
        worst = worst.max(additivity / 1e-10);

        let grid = BoxDiscretization::covering(200.0, 2.0, 0.5)?;
        let band = SpectralBand::centered(0.0, 0.4, 2)?;
        let coarse = QuadratureScheme::default().with_time_panels(8);
        let plain = box_berry_phase(&dirac, &band, &grid, &window, &coarse)?.gamma;
        let shifted = box_berry_phase(&GlobalPhase { inner: dirac.clone(), alpha: 1.234 }, &band, &grid, &window, &coarse)?.gamma;
        let invariance = (plain - shifted).abs();
        notes.push(format!("global phase {invariance:.1e}"));
        worst = worst.max(invariance / 1e-10);
        Ok((worst, 1.0, worst < 1.0, notes.join(", ")))
    })
}

pub fn verify_with(tier: Tier, mutation: Mutation) -> VerificationReport {
    let mut criteria = vec![
        reflectionless_closed_form(),
        dirac_solid_angle(mutation),
        two_level_oracle(),
        box_oracle_convergence(),
        s_matrix_layer(),
        phase_gap_table(),
        kernel_certification(),
        property_suite(),
    ];
    if tier == Tier::Full {
        criteria.push(wavepacket_oracle());
    }
    VerificationReport { tier, criteria }
}

pub fn verify(tier: Tier) -> VerificationReport {
    verify_with(tier, Mutation::None)
}
