//! Direct spatial quadrature of `int phi*(k', x) i hbar d/dt phi(k, x) dx`
//! for the moving reflectionless well, using only the eigenfunction itself
//! and a five-point difference in `t`.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::models::reflectionless::ReflectionlessModel;
use crate::quadrature;

/// Gauss-Legendre order per panel.
const ORDER: usize = 10;

/// `points` nodes are spread over `[x0 - L/2, x0 + L/2]`, where the kernel
/// integrand is at least `sech^2(k1 L / 2)` below its peak outside.
pub fn kernel_x_quadrature(
    model: &ReflectionlessModel,
    k_prime: f64,
    k: f64,
    t: f64,
    truncation: f64,
    points: usize,
) -> Result<Complex64> {
    let k1 = model.k1();
    let tail = (0.5 * k1 * truncation).cosh().powi(-2);
    if !(tail < 1e-12) {
        return invalid(format!("truncation {truncation} too small: sech^2(k1 L / 2) = {tail:e}"));
    }
    if points < ORDER {
        return invalid(format!("need at least {ORDER} quadrature points"));
    }
    let path = &model.params.x0_path;
    let x0 = path.value(t);
    let h = 1e-3 / (k1 * path.derivative(t).abs()).max(1.0);
    let hbar = model.constants.hbar;
    let integrand = |x: f64| -> Result<Complex64> {
        let bra = model.reflectionless_eigenfunction(k_prime, t, x)?.conj();
        let f = |dt: f64| model.reflectionless_eigenfunction(k, t + dt, x);
        let dphi = ((f(h)? - f(-h)?) * 8.0 - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h);
        Ok(bra * dphi * Complex64::new(0.0, hbar))
    };
    let half = 0.5 * truncation;
    quadrature::integrate(integrand, x0 - half, x0 + half, points.div_ceil(ORDER), ORDER)
}
