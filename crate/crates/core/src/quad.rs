//! Gauss–Legendre rules and double-exponential quadrature on half lines.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that a quadrature rule can accumulate.
pub trait Scalar: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let theta = std::f64::consts::PI * (4.0 * i as f64 + 3.0) / (4.0 * nf + 2.0);
        let mut z = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = wi;
        w[i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre nodes and weights on `[lo, hi]` split into equal panels.
pub fn composite_gauss_legendre(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let width = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lo + width * p as f64;
        let half = width / 2.0;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(a + half * (xi + 1.0));
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule over arbitrary panel breakpoints.
pub fn gauss_legendre_on_breaks(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(breaks.len().saturating_sub(1) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let half = (pair[1] - pair[0]) / 2.0;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(pair[0] + half * (xi + 1.0));
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

pub fn integrate_gl<T: Scalar, F: FnMut(f64) -> T>(mut f: F, lo: f64, hi: f64, panels: usize, order: usize) -> T {
    let (x, w) = composite_gauss_legendre(lo, hi, panels, order);
    x.iter().zip(&w).fold(T::default(), |acc, (&xi, &wi)| acc + f(xi) * wi)
}

/// Integrates `f` over `(0, inf)` with the exp-sinh substitution `x = scale * exp(pi/2 sinh t)`.
///
/// Returns the estimate and the difference between the last two levels.
pub fn exp_sinh<T: Scalar, F: FnMut(f64) -> T>(mut f: F, scale: f64, rel_tol: f64) -> Result<(T, f64)> {
    const T_LO: f64 = -4.5;
    const T_HI: f64 = 3.6;
    let mut term = |t: f64| -> T {
        let s = FRAC_PI_2 * t.sinh();
        let x = scale * s.exp();
        if x == 0.0 || !x.is_finite() {
            return T::default();
        }
        let v = f(x);
        let w = x * FRAC_PI_2 * t.cosh();
        if v.magnitude() == 0.0 {
            T::default()
        } else {
            v * w
        }
    };
    let mut h = 0.5;
    let mut sum = T::default();
    let mut k = (T_LO / h).ceil() as i64;
    while (k as f64) * h <= T_HI {
        sum = sum + term(k as f64 * h);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..9 {
        h /= 2.0;
        let mut k = (T_LO / h).ceil() as i64;
        if k % 2 == 0 {
            k += 1;
        }
        while (k as f64) * h <= T_HI {
            sum = sum + term(k as f64 * h);
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).magnitude();
        estimate = next;
        if diff <= rel_tol * estimate.magnitude() || diff < 1e-300 {
            return Ok((estimate, diff));
        }
    }
    Err(Error::Convergence(format!(
        "exp-sinh rule did not reach relative tolerance {rel_tol:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules_match_closed_forms() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-16);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1usize, 4, 7, 16, 33, 64] {
            let (x, w) = gauss_legendre(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            assert!(w.iter().all(|&v| v > 0.0));
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn composite_rule_integrates_smooth_function() {
        let got: f64 = integrate_gl(|x: f64| x.cos(), 0.0, 10.0, 20, 8);
        assert!((got - 10f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn exp_sinh_handles_endpoint_singularity() {
        // integral of x^{-1/2} e^{-x} over (0, inf) is sqrt(pi)
        let (v, _) = exp_sinh(|x: f64| x.powf(-0.5) * (-x).exp(), 1.0, 1e-13).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exp_sinh_complex_oscillatory_damped() {
        // integral of e^{(-1+2i)x} over (0, inf) is 1/(1-2i)
        let (v, _) = exp_sinh(|x: f64| Complex64::new(-x, 2.0 * x).exp(), 0.5, 1e-13).unwrap();
        let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, -2.0);
        assert!((v - exact).norm() < 1e-12);
    }
}
