//! Gauss-Legendre panels and adaptive bisection for oscillatory integrands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Points per panel used throughout the crate.
pub const PANEL_ORDER: usize = 15;

/// Hard cap on panel evaluations per adaptive integral.
pub const PANEL_BUDGET: usize = 1 << 16;

/// Per-panel accept threshold for the bisection test.
pub const PANEL_TOL: f64 = 1e-12;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Nodes and weights by Newton iteration on the Legendre recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n {
            // Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-17 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // guess ordering is descending in x; store ascending
            nodes[n - 1 - i] = lit(x);
            weights[n - 1 - i] = lit(w);
        }
        GaussLegendre { nodes, weights }
    }

    /// Apply the rule to `f` over `[lo, hi]`.
    pub fn integrate<F>(&self, lo: T, hi: T, mut f: F) -> Complex<T>
    where
        F: FnMut(T) -> Complex<T>,
    {
        let half = lit::<T>(0.5);
        let mid = (lo + hi) * half;
        let rad = (hi - lo) * half;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + rad * x) * w;
        }
        acc * rad
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Gauss-Legendre over `[lo, hi]`.
///
/// The interval is pre-split into panels no wider than `max_width` (so the
/// rule resolves the fastest oscillation present), then panels are bisected
/// until coarse and refined values agree to `PANEL_TOL`, within a global
/// budget of `PANEL_BUDGET` rule applications. Returns the integral and the
/// accumulated error estimate; fails with the achieved estimate when the
/// budget cannot certify `target`.
pub fn adaptive<T, F>(rule: &GaussLegendre<T>, lo: T, hi: T, max_width: T, target: f64, f: &F) -> Result<(Complex<T>, f64)>
where
    T: Scalar,
    F: Fn(T) -> Complex<T>,
{
    if hi <= lo {
        return Ok((Complex::new(T::zero(), T::zero()), 0.0));
    }
    let span = hi - lo;
    let width = max_width.min(span).max(span * lit(1e-12));
    let count_t = (span / width).ceil();
    let count = count_t.to_usize().unwrap_or(usize::MAX);
    if count == 0 || count > PANEL_BUDGET {
        return Err(Error::QuadratureNonConvergence {
            achieved: f64::INFINITY,
            requested: target,
        });
    }

    // (lo, hi, value, inherited error hint)
    let mut stack: Vec<(T, T, Complex<T>, f64)> = Vec::with_capacity(count);
    let step = span / lit(count as f64);
    for i in 0..count {
        let a = lo + step * lit(i as f64);
        let b = if i + 1 == count { hi } else { lo + step * lit((i + 1) as f64) };
        stack.push((a, b, rule.integrate(a, b, f), f64::INFINITY));
    }
    let mut evals = count;

    let mut total = Complex::new(T::zero(), T::zero());
    let mut achieved = 0.0f64;
    let panel_tol = PANEL_TOL.max(T::epsilon().to_f64().unwrap_or(f64::EPSILON) * 16.0);

    while let Some((a, b, coarse, hint)) = stack.pop() {
        let width_tiny = (b - a).to_f64().unwrap_or(0.0) < 1e-14 * (1.0 + a.abs().max(b.abs()).to_f64().unwrap_or(0.0));
        if evals + 2 > PANEL_BUDGET || width_tiny {
            total = total + coarse;
            achieved += hint.min(1.0);
            continue;
        }
        let mid = (a + b) * lit(0.5);
        let left = rule.integrate(a, mid, f);
        let right = rule.integrate(mid, b, f);
        evals += 2;
        let fine = left + right;
        let diff = (coarse - fine).norm().to_f64().unwrap_or(f64::INFINITY);
        if diff <= panel_tol {
            total = total + fine;
            achieved += diff;
        } else {
            stack.push((a, mid, left, diff));
            stack.push((mid, b, right, diff));
        }
    }

    if achieved > target {
        return Err(Error::QuadratureNonConvergence {
            achieved,
            requested: target,
        });
    }
    Ok((total, achieved))
}
