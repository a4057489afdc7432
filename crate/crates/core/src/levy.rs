//! Symmetric `a`-stable densities, their characteristic functions, and the kernels
//! `K_h` and `1/(sigma - i t)` behind the endpoint counterexamples.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::bessel;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::params::{sphere_area, DispersionParams};
use crate::quad::{exp_sinh, gauss_legendre, gauss_legendre_on_breaks};

/// Largest `|x|` accepted by [`stable_density`].
pub const MAX_RADIUS: f64 = 1.0e3;

/// `f_a(t, x) = t^{-d/a} f_a(t^{-1/a} x)` with `f_a = F^{-1}[e^{-|xi|^a}]` on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableDensitySpec {
    a: f64,
    d: usize,
    t: f64,
}

impl StableDensitySpec {
    pub fn new(a: f64, d: usize, t: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 2.0) {
            return Err(Error::Domain(format!("stability index a = {a} must lie in (0, 2]")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("time scale t = {t} must be positive")));
        }
        Ok(Self { a, d, t })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `f_a(t, x)`.
pub fn stable_density(spec: &StableDensitySpec, x: &[f64]) -> Result<f64> {
    if x.len() != spec.d {
        return Err(Error::Mismatch(format!("point has {} coordinates, expected {}", x.len(), spec.d)));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("point must be finite".into()));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r > MAX_RADIUS {
        return Err(Error::Range(format!("|x| = {r} exceeds {MAX_RADIUS}")));
    }
    let scale = spec.t.powf(-1.0 / spec.a);
    if spec.a == 2.0 {
        // Gaussian: product of one-dimensional saddle-point integrals
        let g: f64 = x.iter().map(|&v| gaussian_saddle(v * scale)).product();
        return Ok(scale.powi(spec.d as i32) * g);
    }
    Ok(scale.powi(spec.d as i32) * radial_density(spec.a, spec.d, r * scale)?)
}

/// `(1/2pi) int e^{i y xi} e^{-xi^2} d xi` along `Im xi = y/2`.
fn gaussian_saddle(y: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(48);
    // int_R e^{-s^2} ds on [-7, 7] as two panels
    let half: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| {
            let s = 3.5 * (x + 1.0);
            3.5 * w * (-s * s).exp()
        })
        .sum();
    (-y * y / 4.0).exp() * 2.0 * half / (2.0 * PI)
}

/// Unit-time radial profile `f_a(R)` for `a < 2`.
pub(crate) fn radial_density(a: f64, d: usize, r: f64) -> Result<f64> {
    if d == 1 {
        return rotated_line_density(a, r);
    }
    if let Some(v) = tail_series(a, d, r).map(|s| s.value) {
        return Ok(v);
    }
    Ok(bessel_density(a, d, r))
}

/// `(1/pi) Re int_0^inf e^{i x xi - xi^a} d xi` on the ray `arg xi = pi / (2(1+a))`.
fn rotated_line_density(a: f64, x: f64) -> Result<f64> {
    let theta = PI / (2.0 * (1.0 + a));
    let dir = Complex64::from_polar(1.0, theta);
    let dir_a = Complex64::from_polar(1.0, a * theta);
    let i = Complex64::new(0.0, 1.0);
    let integrand = |r: f64| (i * x * r * dir - dir_a * r.powf(a)).exp() * dir;
    let scale = 1.0 / (1.0 + x * theta.sin());
    let (v, _) = exp_sinh(integrand, scale, 1e-13).or_else(|_| exp_sinh(integrand, scale, 1e-10))?;
    Ok(v.re / PI)
}

/// Truncated large-radius expansion `f_a(R) = sum_k c_k R^{-(k a + d)}`.
#[derive(Debug, Clone)]
pub(crate) struct TailSeries {
    pub value: f64,
    pub coeffs: Vec<f64>,
}

/// `c_k = (-1)^{k+1} 2^{ka} Gamma((ka+d)/2) Gamma(ka/2+1) sin(pi k a / 2) / (k! pi^{d/2+1})`.
pub(crate) fn tail_coefficient(a: f64, d: usize, k: usize) -> (f64, f64) {
    let ka = k as f64 * a;
    let ln_mag = ka * std::f64::consts::LN_2 + ln_gamma((ka + d as f64) / 2.0) + ln_gamma(ka / 2.0 + 1.0)
        - ln_gamma(k as f64 + 1.0)
        - (d as f64 / 2.0 + 1.0) * PI.ln();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    (ln_mag, sign * (PI * ka / 2.0).sin())
}

/// The expansion at `r`, or `None` when it does not settle to near machine precision
/// without cancellation.
pub(crate) fn tail_series(a: f64, d: usize, r: f64) -> Option<TailSeries> {
    if a >= 2.0 || r <= 0.0 {
        return None;
    }
    let ln_r = r.ln();
    let mut sum = 0.0;
    let mut largest = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut coeffs = Vec::new();
    for k in 1..=400usize {
        let (ln_mag, sine) = tail_coefficient(a, d, k);
        let mag = (ln_mag - (k as f64 * a + d as f64) * ln_r).exp();
        if mag > prev && k > 3 {
            return None;
        }
        prev = mag;
        largest = largest.max(mag);
        coeffs.push(ln_mag.exp() * sine);
        sum += mag * sine;
        if k >= 2 && mag <= 1e-16 * sum.abs() {
            return (largest <= 10.0 * sum.abs() && sum > 0.0).then_some(TailSeries { value: sum, coeffs });
        }
    }
    None
}

/// `(2 pi)^{-d/2} R^{-nu} int_0^inf J_nu(R rho) rho^{d/2} e^{-rho^a} d rho`, `nu = (d-2)/2`.
fn bessel_density(a: f64, d: usize, r: f64) -> f64 {
    let nu = (d as f64 - 2.0) / 2.0;
    let half_d = d as f64 / 2.0;
    let mut top: f64 = 50f64.powf(1.0 / a);
    for _ in 0..4 {
        top = (50.0 + half_d * top.max(1.0).ln()).powf(1.0 / a);
    }
    let mut breaks: Vec<f64> = (0..=40).rev().map(|m| 0.5f64.powi(m)).collect();
    let width = if r > 0.0 { (PI / (2.0 * r)).min(0.5) } else { 0.5 };
    let panels = ((top - 1.0) / width).ceil().max(1.0) as usize;
    breaks.extend((1..=panels).map(|p| 1.0 + (top - 1.0) * p as f64 / panels as f64));
    let (nodes, weights) = gauss_legendre_on_breaks(&breaks, 10);
    let ln_gamma_nu = ln_gamma(nu + 1.0);
    let kernel = |rho: f64| {
        if r == 0.0 {
            (nu * (rho / 2.0).ln() - ln_gamma_nu).exp()
        } else {
            bessel::j_unchecked(nu, r * rho) * r.powf(-nu)
        }
    };
    let sum: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&rho, &w)| w * kernel(rho) * rho.powf(half_d) * (-rho.powf(a)).exp())
        .sum();
    (2.0 * PI).powf(-half_d) * sum
}

/// `Gamma(d/2) (2/z)^nu J_nu(z)`: the Fourier transform of the normalized surface measure.
fn spherical_kernel(d: usize, z: f64) -> f64 {
    if d == 1 {
        return z.cos();
    }
    let nu = (d as f64 - 2.0) / 2.0;
    if z == 0.0 {
        return 1.0;
    }
    if z < 1e-3 {
        // two series terms suffice below 1e-3
        return 1.0 - z * z / (4.0 * (nu + 1.0));
    }
    (ln_gamma(nu + 1.0) + nu * (2.0 / z).ln()).exp() * bessel::j_unchecked(nu, z)
}

/// `int_{R^d} e^{i eta x} f_a(t, x) dx`, computed from the density itself.
///
/// The integral runs over `|x| <= X` by Gauss–Legendre and beyond `X` through the tail
/// expansion of the density, integrated termwise.
pub fn characteristic_check(spec: &StableDensitySpec, eta: &[f64]) -> Result<Complex64> {
    if eta.len() != spec.d {
        return Err(Error::Mismatch(format!("frequency has {} coordinates, expected {}", eta.len(), spec.d)));
    }
    let kappa = eta.iter().map(|v| v * v).sum::<f64>().sqrt() * spec.t.powf(1.0 / spec.a);
    if !kappa.is_finite() {
        return Err(Error::InvalidInput("frequency must be finite".into()));
    }
    let (a, d) = (spec.a, spec.d);
    let reach = if a == 2.0 {
        40.0
    } else {
        // smallest radius where the tail expansion takes over
        [20.0, 50.0, 100.0, 200.0, 500.0, MAX_RADIUS]
            .into_iter()
            .find(|&x| tail_series(a, d, x).is_some())
            .unwrap_or(MAX_RADIUS)
    };
    let area = sphere_area(d);

    // geometric panels resolve the narrow peak of small-index densities
    let cap = if kappa > 0.0 { PI / (2.0 * kappa) } else { f64::INFINITY };
    let mut breaks = vec![0.0, 2f64.powi(-30)];
    while *breaks.last().expect("nonempty") < reach {
        let y = *breaks.last().expect("nonempty");
        let step = if y < 1.0 { y } else { (0.1 * y).max(0.25) };
        breaks.push((y + step.min(cap)).min(reach));
    }
    let (nodes, weights) = gauss_legendre_on_breaks(&breaks, 8);
    let values: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&r| {
            let f = if a == 2.0 { gaussian_radial(d, r) } else { radial_density(a, d, r)? };
            Ok(f * r.powi(d as i32 - 1) * spherical_kernel(d, kappa * r))
        })
        .collect();
    let mut core = 0.0;
    for (v, w) in values.into_iter().zip(&weights) {
        core += w * v?;
    }
    let mut total = area * core;

    if a < 2.0 {
        let series = tail_series(a, d, reach)
            .ok_or_else(|| Error::Convergence(format!("tail expansion unusable at radius {reach}")))?;
        let mut tail = 0.0;
        if kappa == 0.0 {
            for (k, c) in series.coeffs.iter().enumerate() {
                let ka = (k + 1) as f64 * a;
                tail += c * reach.powf(-ka) / ka;
            }
        } else if d == 1 {
            for (k, c) in series.coeffs.iter().enumerate() {
                tail += c * cosine_tail(kappa, reach, (k + 1) as f64 * a + 1.0)?;
            }
        } else {
            // the kernel decays like (kappa R)^{-(d-1)/2}; the remainder past 2e4 is dropped
            let far = 2.0e4f64.max(20.0 * reach);
            let panels = (((far - reach) * kappa / (PI / 2.0)).ceil() as usize).max(64);
            let tb: Vec<f64> = (0..=panels).map(|p| reach + (far - reach) * p as f64 / panels as f64).collect();
            let (tn, tw) = gauss_legendre_on_breaks(&tb, 8);
            let kern: Vec<f64> = tn.par_iter().map(|&r| spherical_kernel(d, kappa * r)).collect();
            for (k, c) in series.coeffs.iter().enumerate() {
                let ka = (k + 1) as f64 * a;
                let s: f64 = tn.iter().zip(&tw).zip(&kern).map(|((r, w), kv)| w * r.powf(-ka - 1.0) * kv).sum();
                tail += c * s;
            }
        }
        total += area * tail;
    }
    Ok(Complex64::new(total, 0.0))
}

/// Batch form of [`characteristic_check`], evaluated in parallel.
pub fn characteristic_check_batch(spec: &StableDensitySpec, etas: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    etas.par_iter().map(|eta| characteristic_check(spec, eta)).collect()
}

fn gaussian_radial(d: usize, r: f64) -> f64 {
    gaussian_saddle(r) * gaussian_saddle(0.0).powi(d as i32 - 1)
}

/// `int_X^inf cos(kappa y) y^{-s} dy` along the vertical ray `y = X + i u`.
fn cosine_tail(kappa: f64, reach: f64, s: f64) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let start = Complex64::from_polar(1.0, kappa * reach);
    let f = |u: f64| (-kappa * u).exp() * Complex64::new(reach, u).powf(-s);
    let (v, _) = exp_sinh(f, 1.0 / kappa, 1e-12)?;
    Ok((i * start * v).re)
}

/// `h_eps` with `h^(xi) = e^{-eps^2 |xi|^2 / 2}`, a unit-mass Gaussian approximating `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaApproximant {
    eps: f64,
}

impl DeltaApproximant {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("width {eps} must be positive")));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn hat(&self, rho: f64) -> f64 {
        (-self.eps * self.eps * rho * rho / 2.0).exp()
    }
}

/// Radial integrand of `K^_h(tau)` in `rho`, including the sphere area and `rho^{d-1}`.
pub fn k_hat_integrand(h: &DeltaApproximant, params: &DispersionParams, tau: f64, rho: f64) -> f64 {
    let (a, d) = (params.a(), params.d() as f64);
    let ra = rho.powf(a);
    let num = ra * (1.0 + rho * rho).powf((a - d) / 2.0);
    let den = (tau - ra).powi(2) + ra * ra;
    sphere_area(params.d()) * rho.powf(d - 1.0) * num / den * h.hat(rho)
}

fn k_hat_on_panels(h: &DeltaApproximant, params: &DispersionParams, tau: f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let breaks: Vec<f64> = (0..=panels).map(|p| lo + (hi - lo) * p as f64 / panels as f64).collect();
    let (nodes, weights) = gauss_legendre_on_breaks(&breaks, 16);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&u, &w)| {
            let rho = u.exp();
            w * rho * k_hat_integrand(h, params, tau, rho)
        })
        .sum()
}

/// `K^_h(tau)` together with the value one panel-halving coarser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KhatEstimate {
    pub value: f64,
    pub coarse: f64,
}

/// `K^_h(tau) = int |xi|^a <xi>^{a-d} / ((tau - |xi|^a)^2 + |xi|^{2a}) h^(xi) d xi` with unit constant.
pub fn k_hat(h: &DeltaApproximant, params: &DispersionParams, tau: f64) -> Result<f64> {
    Ok(k_hat_estimate(h, params, tau)?.value)
}

pub fn k_hat_estimate(h: &DeltaApproximant, params: &DispersionParams, tau: f64) -> Result<KhatEstimate> {
    let (a, d) = (params.a(), params.d());
    if d <= params.d_a() || (d as f64) <= a {
        return Err(Error::Precondition(format!("need d > d_a and d > a, got d = {d}, a = {a}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("tau = {tau} must be nonnegative")));
    }
    // log variable u = ln rho; lower end drops rho^{d-a} / 2 below 1e-16
    let lo = (1e-16f64).ln() / (d as f64 - a);
    let hi = ((80.0f64).sqrt() / h.eps).max(2.0).ln();
    let mut panels = ((hi - lo) / 0.25).ceil() as usize;
    let mut prev = k_hat_on_panels(h, params, tau, lo, hi, panels);
    for _ in 0..5 {
        panels *= 2;
        let next = k_hat_on_panels(h, params, tau, lo, hi, panels);
        if (next - prev).abs() <= 1e-12 * next.abs() {
            return Ok(KhatEstimate { value: next, coarse: prev });
        }
        prev = next;
    }
    let last = k_hat_on_panels(h, params, tau, lo, hi, panels * 2);
    if (last - prev).abs() <= 1e-6 * last.abs() {
        return Ok(KhatEstimate { value: last, coarse: prev });
    }
    Err(Error::Convergence(format!("K^_h({tau}) unresolved: refinements differ by {:.2e}", (last - prev).abs())))
}

/// `K^_h(0)` against `log(1/eps)` with a least-squares line.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceScan {
    pub rows: Vec<(f64, f64)>,
    pub fit: LinearFit,
    /// Values and fit one quadrature refinement coarser.
    pub coarse: Vec<f64>,
    pub coarse_fit: LinearFit,
}

pub fn divergence_scan(params: &DispersionParams, eps_list: &[f64]) -> Result<DivergenceScan> {
    if eps_list.is_empty() {
        return Err(Error::InvalidInput("empty width list".into()));
    }
    let lo = eps_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps_list.iter().cloned().fold(0.0, f64::max);
    if lo != hi && (hi / lo).log2() < 3.0 {
        return Err(Error::Precondition(format!("widths span {:.2} octaves, need 3", (hi / lo).log2())));
    }
    let est: Vec<KhatEstimate> =
        eps_list.par_iter().map(|&e| k_hat_estimate(&DeltaApproximant::new(e)?, params, 0.0)).collect::<Result<_>>()?;
    let xs: Vec<f64> = eps_list.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = est.iter().map(|k| k.value).collect();
    let coarse: Vec<f64> = est.iter().map(|k| k.coarse).collect();
    Ok(DivergenceScan {
        fit: linear_fit(&xs, &ys),
        coarse_fit: linear_fit(&xs, &coarse),
        rows: eps_list.iter().copied().zip(ys).collect(),
        coarse,
    })
}

/// `phi^ = |xi|^alpha sigma^gamma e^{-sigma|xi|^a/2}`, `psi^ = |xi|^beta sigma^{-gamma} e^{-sigma|xi|^a/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair {
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// `c_d = a (2 pi)^d / |S^{d-1}|`.
pub fn kernel_constant(params: &DispersionParams) -> f64 {
    params.a() * (2.0 * PI).powi(params.d() as i32) / sphere_area(params.d())
}

/// `(e^{itD^a} phi | psi)` by radial quadrature, next to `c_d^{-1} / (sigma - i t)`.
pub fn closed_form_k(params: &DispersionParams, pair: &KernelPair, t: f64) -> Result<(Complex64, Complex64)> {
    let (a, d) = (params.a(), params.d() as f64);
    if ((pair.alpha + pair.beta) - (a - d)).abs() > 1e-12 {
        return Err(Error::InvalidPair(format!(
            "alpha + beta = {} but a - d = {}",
            pair.alpha + pair.beta,
            a - d
        )));
    }
    if pair.alpha <= -d || pair.beta <= -d {
        return Err(Error::InvalidPair(format!("alpha = {}, beta = {} must exceed -d", pair.alpha, pair.beta)));
    }
    if !(pair.sigma > 0.0) || !t.is_finite() || !pair.gamma.is_finite() {
        return Err(Error::InvalidInput("sigma must be positive and t, gamma finite".into()));
    }
    let s = pair.sigma;
    let phi = |r: f64| r.powf(pair.alpha) * s.powf(pair.gamma) * (-s * r.powf(a) / 2.0).exp();
    let psi = |r: f64| r.powf(pair.beta) * s.powf(-pair.gamma) * (-s * r.powf(a) / 2.0).exp();
    let integrand = |r: f64| Complex64::from_polar(phi(r) * psi(r) * r.powf(d - 1.0), t * r.powf(a));
    let (v, _) = exp_sinh(integrand, s.powf(-1.0 / a), 1e-12).or_else(|_| exp_sinh(integrand, s.powf(-1.0 / a), 1e-9))?;
    let numeric = v * sphere_area(params.d()) * (2.0 * PI).powf(-d);
    let analytic = Complex64::new(1.0, 0.0) / (Complex64::new(s, -t) * kernel_constant(params));
    Ok((numeric, analytic))
}
