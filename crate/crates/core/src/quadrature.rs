//! Composite Gauss-Legendre quadrature and Richardson extrapolation.

use num_complex::Complex64;

use crate::error::{check_finite, invalid, PhaseError, Result};
use crate::exec;
use crate::spectral::{QuadratureScheme, TimeWindow};

pub const MAX_ORDER: usize = 64;

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&order) {
            return invalid(format!("Gauss-Legendre order must lie in 1..={MAX_ORDER}, got {order}"));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights of the composite rule on `[a, b]` with `panels`
    /// equal panels. `b < a` is allowed and yields negative weights.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> CompositeRule {
        let panels = panels.max(1);
        let n = self.order();
        let mut nodes = Vec::with_capacity(panels * n);
        let mut weights = Vec::with_capacity(panels * n);
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let hi = if p + 1 == panels { b } else { lo + width };
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        CompositeRule { nodes, weights }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A concrete set of quadrature nodes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to a fallible complex integrand. Node values are
    /// computed (possibly in parallel) and then summed in ascending order.
    pub fn try_integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64> + Sync + Send,
    {
        let values = exec::map_ordered(&self.nodes, |&x| {
            let v = f(x)?;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(PhaseError::NonFinite { quantity: "integrand", location: format!("node {x}") })
            }
        });
        let mut sum = Complex64::new(0.0, 0.0);
        for (v, w) in values.into_iter().zip(&self.weights) {
            sum += v? * *w;
        }
        Ok(sum)
    }

    /// Sequential, real-valued variant for cheap inner loops.
    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Composite Gauss-Legendre integral of `f` over `window` with
/// `scheme.time_panels` panels of `scheme.time_order` nodes.
pub fn gauss_legendre_integrate<F>(f: F, window: &TimeWindow, scheme: &QuadratureScheme) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    integrate(|t| Ok(f(t)), window.t0, window.t1, scheme.time_panels, scheme.time_order)
}

/// Composite Gauss-Legendre integral of a fallible integrand over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, panels: usize, order: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = GaussLegendre::new(order)?.composite(a, b, panels);
    rule.try_integrate(f)
}

/// Output of [`richardson_extrapolate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub error: f64,
}

/// Richardson (Neville) tableau over estimates computed at resolutions
/// refined by `ratio` each step, assuming an error expansion in powers
/// `leading_order, leading_order + 1, ...` of the step. The error estimate is
/// the distance between the last two diagonal entries.
pub fn richardson_extrapolate(estimates: &[Complex64], ratio: f64, leading_order: u32) -> Result<Extrapolated> {
    if estimates.len() < 2 {
        return invalid(format!("richardson extrapolation needs >= 2 estimates, got {}", estimates.len()));
    }
    if !(ratio.is_finite() && ratio > 1.0) {
        return invalid(format!("refinement ratio must exceed 1, got {ratio}"));
    }
    let n = estimates.len();
    let mut previous: Vec<Complex64> = estimates.to_vec();
    let mut diagonal = vec![estimates[0]];
    for column in 1..n {
        let factor = ratio.powi((leading_order as i32) + column as i32 - 1);
        let current: Vec<Complex64> = (column..n)
            .map(|i| {
                let fine = previous[i - column + 1];
                let coarse = previous[i - column];
                fine + (fine - coarse) / (factor - 1.0)
            })
            .collect();
        diagonal.push(current[0]);
        previous = current;
    }
    let value = diagonal[n - 1];
    let error = check_finite((diagonal[n - 1] - diagonal[n - 2]).norm(), "extrapolation error", || {
        "richardson tableau".to_string()
    })?;
    Ok(Extrapolated { value, error })
}
