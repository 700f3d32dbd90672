//! Parameter paths `t -> X(t)` supplied as (value, derivative) pairs.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// A real parameter with an analytic time derivative.
pub trait RealPath: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// A complex parameter with an analytic time derivative.
pub trait ComplexPath: Send + Sync {
    fn value(&self, t: f64) -> Complex64;
    fn derivative(&self, t: f64) -> Complex64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl RealPath for Constant {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantComplex(pub Complex64);

impl ComplexPath for ConstantComplex {
    fn value(&self, _t: f64) -> Complex64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// `start + rate * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub start: f64,
    pub rate: f64,
}

impl RealPath for Linear {
    fn value(&self, t: f64) -> f64 {
        self.start + self.rate * t
    }
    fn derivative(&self, _t: f64) -> f64 {
        self.rate
    }
}

/// A path built from two closures.
pub struct FnPath<V, D> {
    value: V,
    derivative: D,
}

impl<V, D> FnPath<V, D> {
    pub fn new(value: V, derivative: D) -> Self {
        Self { value, derivative }
    }
}

impl<V, D> RealPath for FnPath<V, D>
where
    V: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

impl<V, D> ComplexPath for FnPath<V, D>
where
    V: Fn(f64) -> Complex64 + Send + Sync,
    D: Fn(f64) -> Complex64 + Send + Sync,
{
    fn value(&self, t: f64) -> Complex64 {
        (self.value)(t)
    }
    fn derivative(&self, t: f64) -> Complex64 {
        (self.derivative)(t)
    }
}

/// Solves `path(t) = target` for `t` in `[lo, hi]` on a strictly monotone
/// path by bisection.
pub fn solve_monotone(path: &dyn RealPath, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (path.value(a) - target, path.value(b) - target);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return invalid(format!("target {target} not bracketed by path on [{lo}, {hi}]"));
    }
    let increasing = fb > fa;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = path.value(mid) - target;
        if fm == 0.0 || (b - a).abs() <= f64::EPSILON * mid.abs().max(1.0) {
            return Ok(mid);
        }
        if (fm > 0.0) == increasing {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_inverts_cubic() {
        let p = FnPath::new(|t: f64| t * t * t + t, |t: f64| 3.0 * t * t + 1.0);
        let t = solve_monotone(&p, 10.0, 0.0, 5.0).unwrap();
        assert!((RealPath::value(&p, t) - 10.0).abs() < 1e-12);
        assert!(solve_monotone(&p, 1e3, 0.0, 1.0).is_err());
        let down = Linear { start: 3.0, rate: -2.0 };
        assert!((solve_monotone(&down, -1.0, 0.0, 10.0).unwrap() - 2.0).abs() < 1e-12);
    }
}
