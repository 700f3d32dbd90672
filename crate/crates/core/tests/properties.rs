use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use geophase::engine::{geometric_phase, ContinuumModel, GlobalPhase};
use geophase::models::dirac::{Branch, DiracModel, DiracParameters, Sigma3Sector};
use geophase::models::reflectionless::{
    asymptotic_amplitude_ratio, ReflectionlessModel, ReflectionlessParameters, WobblySweep,
};
use geophase::path::{ConstantComplex, FnPath, Linear};
use geophase::verification::cone_model;
use geophase::{PhysicalConstants, QuadratureScheme, TimeWindow};

fn dirac_static(mass: f64, f: Complex64, branch: Branch, sector: Sigma3Sector) -> DiracModel {
    let params = DiracParameters::new(Arc::new(Linear { start: mass, rate: 0.0 }), Arc::new(ConstantComplex(f)), sector, branch);
    DiracModel::new(params, PhysicalConstants::default()).unwrap()
}

fn well(k1: f64) -> ReflectionlessModel {
    ReflectionlessModel::new(ReflectionlessParameters::uniform(k1, 1.0).unwrap(), PhysicalConstants::default()).unwrap()
}

/// Single-level smooth-kernel scheme for a crossing of half-length `x`.
fn quick_scheme(model: &ReflectionlessModel, x: f64) -> QuadratureScheme {
    model.recommended_scheme(x).with_levels(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dirac_spinor_is_a_normalized_eigenvector(
        mass in 0.1f64..3.0, re in -2.0f64..2.0, im in -2.0f64..2.0, k in -2.0f64..2.0,
        upper in any::<bool>(), plus in any::<bool>(),
    ) {
        let branch = if upper { Branch::Upper } else { Branch::Lower };
        let sector = if plus { Sigma3Sector::Plus } else { Sigma3Sector::Minus };
        let m = dirac_static(mass, Complex64::new(re, im), branch, sector);
        prop_assume!((Complex64::new(re, im) - k).norm() > 1e-3);
        let e = m.dirac_eigensystem(k, 0.0).unwrap();
        let v = e.spinor;
        prop_assert!((v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs() < 1e-12);
        let h = m.reduced_hamiltonian(k, 0.0).unwrap();
        for row in 0..2 {
            let hv = h[row][0] * v[0] + h[row][1] * v[1];
            prop_assert!((hv - v[row] * e.energy).norm() < 1e-12 * e.energy.abs().max(1.0));
        }
    }

    #[test]
    fn dirac_connection_is_translation_covariant(shift in -3.0f64..3.0, theta in 0.3f64..1.5, t in 0.0f64..1.0) {
        let (plain, _) = cone_model(theta, 1.0, 1.0, PhysicalConstants::default(), Branch::Lower).unwrap();
        let p = plain.params.clone();
        let coupling = p.coupling_path.clone();
        let coupling_rate = p.coupling_path.clone();
        let moved = FnPath::new(move |t| coupling.value(t) + shift, move |t| coupling_rate.derivative(t));
        let shifted = DiracModel::new(
            DiracParameters::new(p.mass_path.clone(), Arc::new(moved), p.sector, p.branch),
            PhysicalConstants::default(),
        ).unwrap();
        let a = plain.dirac_connection(0.0, t).unwrap();
        let b = shifted.dirac_connection(shift, t).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn reflectionless_ratio_has_unit_modulus(k1 in 0.01f64..10.0, k in -50.0f64..50.0) {
        prop_assume!(k != 0.0);
        prop_assert!((asymptotic_amplitude_ratio(k1, k).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reflectionless_kernel_is_hermitian(k in -4.0f64..4.0, kp in -4.0f64..4.0, t in -5.0f64..5.0) {
        prop_assume!(k.abs() > 1e-3 && kp.abs() > 1e-3);
        let m = well(1.2);
        let a = m.connection_kernel_smooth(kp, k, t).unwrap();
        let b = m.connection_kernel_smooth(k, kp, t).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn dirac_phase_is_additive(split in 0.05f64..0.95, theta in 0.3f64..1.5) {
        let (m, _) = cone_model(theta, 1.0, 1.0, PhysicalConstants::default(), Branch::Lower).unwrap();
        let window = TimeWindow::new(0.0, 1.0).unwrap();
        let (a, b) = window.split_at(split).unwrap();
        let scheme = QuadratureScheme::default();
        let whole = geometric_phase(&m, 0.0, &window, &scheme).unwrap().gamma_geometric();
        let first = geometric_phase(&m, 0.0, &a, &scheme).unwrap().gamma_geometric();
        let second = geometric_phase(&m, 0.0, &b, &scheme).unwrap().gamma_geometric();
        prop_assert!((whole - first - second).abs() < 1e-10);
    }

    #[test]
    fn global_phase_leaves_phases_unchanged(alpha in -10.0f64..10.0, theta in 0.3f64..1.5) {
        let (m, _) = cone_model(theta, 1.0, 1.0, PhysicalConstants::default(), Branch::Lower).unwrap();
        let window = TimeWindow::new(0.0, 1.0).unwrap();
        let scheme = QuadratureScheme::default();
        let plain = geometric_phase(&m, 0.0, &window, &scheme).unwrap();
        let shifted = GlobalPhase { inner: m.clone(), alpha };
        let moved = geometric_phase(&shifted, 0.0, &window, &scheme).unwrap();
        prop_assert_eq!(plain, moved);
        let a = m.eigenfunction_value(0.3, 0.2, 1.0).unwrap();
        let b = shifted.eigenfunction_value(0.3, 0.2, 1.0).unwrap();
        prop_assert!((b[0] - a[0] * Complex64::from_polar(1.0, alpha)).norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reflectionless_phase_is_odd_in_k(k in 0.3f64..4.0) {
        let m = well(1.0);
        let scheme = quick_scheme(&m, 16.0);
        let plus = m.sweep_phase(k, &scheme).unwrap().gamma_geometric();
        let minus = m.sweep_phase(-k, &scheme).unwrap().gamma_geometric();
        prop_assert!((plus + minus).abs() < 1e-12);
    }

    #[test]
    fn reflectionless_phase_is_reparametrization_invariant(wobble in -0.14f64..0.14, period in 1.0f64..3.0) {
        let m = well(1.0);
        let scheme = quick_scheme(&m, 16.0);
        let path = WobblySweep::new(1.0, wobble * period, period).unwrap();
        let other = ReflectionlessModel::new(
            ReflectionlessParameters::new(1.0, 1.0, Arc::new(path)).unwrap(),
            PhysicalConstants::default(),
        ).unwrap();
        let a = m.sweep_phase(1.5, &scheme).unwrap().gamma_geometric();
        let b = other.sweep_phase(1.5, &scheme).unwrap().gamma_geometric();
        prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn reflectionless_sweep_converges_in_x() {
    let m = well(1.0);
    let exact = 1.0;
    let errors: Vec<f64> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&x| (m.truncated_sweep(1.0, &quick_scheme(&m, x)).unwrap().value - exact).norm())
        .collect();
    assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
    assert!(errors[2] < 1e-3);
}

#[test]
fn reversed_sweep_flips_the_phase() {
    let c = PhysicalConstants::default();
    let fwd = well(1.0);
    let back = ReflectionlessModel::new(ReflectionlessParameters::reversed(1.0, 1.0).unwrap(), c).unwrap();
    let scheme = quick_scheme(&fwd, 16.0);
    let a = fwd.sweep_phase(2.0, &scheme).unwrap().gamma_geometric();
    let b = back.sweep_phase(2.0, &scheme).unwrap().gamma_geometric();
    assert!((a - 0.8).abs() < 1e-6);
    assert!((a + b).abs() < 1e-12);
}

#[test]
fn dirac_cone_phase_matches_half_solid_angle() {
    let window = TimeWindow::new(0.0, 1.0).unwrap();
    for theta in [0.2, PI / 4.0, 1.2, 1.5] {
        let (m, _) = cone_model(theta, 1.0, 1.0, PhysicalConstants::default(), Branch::Lower).unwrap();
        let gamma = geometric_phase(&m, 0.0, &window, &QuadratureScheme::default()).unwrap().gamma_geometric();
        assert!((gamma + PI * (1.0 - theta.cos())).abs() < 1e-10);
    }
}
