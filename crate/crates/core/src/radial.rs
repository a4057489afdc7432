//! Radial reductions of the propagator per spherical-harmonic degree.
//!
//! For a degree-`k` component with frequency profile `h`, the solution's radial factor is
//! `T_a^nu(h)(t, r) = r^{-(d-2)/2} int_0^inf e^{i t rho^a} J_nu(r rho) rho^{(-d+1+a)/2} h(rho) d rho`
//! with `nu = (d - 2 + 2k) / 2`.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::bessel::{self, MAX_ARG, MAX_ORDER};
use crate::cutoff::{band_edges, chi};
use crate::error::{Error, Result};
use crate::params::DispersionParams;
use crate::quad::composite_gauss_legendre;
use crate::trials::{self, UNIT_BAND};

/// `n(k) = C(d+k-1, k) - C(d+k-3, k-2)`: dimension of degree-`k` harmonics on `S^{d-1}`.
pub fn harmonic_count(d: usize, k: usize) -> u128 {
    let first = binomial(d as i64 + k as i64 - 1, k as i64);
    let second = if k < 2 { 0 } else { binomial(d as i64 + k as i64 - 3, k as i64 - 2) };
    first - second
}

fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Degree `k` on `S^{d-1}` with Bessel order `nu = (d - 2 + 2k)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    d: usize,
    k: usize,
}

impl HarmonicIndex {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("spherical harmonics need d >= 2, got {d}")));
        }
        Ok(Self { d, k })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn nu(&self) -> f64 {
        (self.d as f64 - 2.0 + 2.0 * self.k as f64) / 2.0
    }

    pub fn multiplicity(&self) -> u128 {
        harmonic_count(self.d, self.k)
    }
}

/// Complex samples of a radial frequency profile with quadrature weights for `int_0^inf d rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Complex64>,
}

impl RadialProfile {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() || nodes.len() != values.len() {
            return Err(Error::Mismatch("nodes, weights and values must share a nonzero length".into()));
        }
        if nodes[0] <= 0.0 || nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidInput("profile nodes must be positive and strictly increasing".into()));
        }
        if weights.iter().any(|w| *w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidInput("profile weights must be positive".into()));
        }
        Ok(Self { nodes, weights, values })
    }

    /// Samples `f` on a composite Gauss–Legendre rule over `[lo, hi]`.
    pub fn gauss<F: Fn(f64) -> Complex64>(lo: f64, hi: f64, panels: usize, order: usize, f: F) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || panels == 0 || order == 0 {
            return Err(Error::InvalidInput(format!("bad profile band [{lo}, {hi}]")));
        }
        let (nodes, weights) = composite_gauss_legendre(lo, hi, panels, order);
        let values = nodes.iter().map(|&r| f(r)).collect();
        Self::new(nodes, weights, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.nodes.clone(), self.weights.clone(), values)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// `(int |h|^2 d rho)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.weights.iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt()
    }

    fn largest_gap(&self) -> f64 {
        let interior = self.nodes.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
        interior.max(self.nodes[0].min(self.weights[0]))
    }
}

/// Panel count keeping each panel within a quarter period of `e^{i t rho^a}` at `|t| = t_max`
/// and half a period of `J_nu(r rho)` at `r = r_max`.
pub fn oscillation_panels(lo: f64, hi: f64, a: f64, t_max: f64, r_max: f64) -> usize {
    let slope = a * t_max.abs() * if a >= 1.0 { hi.powf(a - 1.0) } else { lo.powf(a - 1.0) };
    let by_time = (hi - lo) * slope / std::f64::consts::FRAC_PI_2;
    let by_radius = (hi - lo) * r_max / std::f64::consts::PI;
    by_time.max(by_radius).ceil().max(1.0) as usize
}

fn check_order(nu: f64) -> Result<()> {
    if !nu.is_finite() || !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::Range(format!("Bessel order {nu} outside [0, {MAX_ORDER}]")));
    }
    Ok(())
}

fn check_resolution(h: &RadialProfile, a: f64, times: &[f64], radii: &[f64]) -> Result<()> {
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let r_max = radii.iter().fold(0.0f64, |m, r| m.max(*r));
    let hi = *h.nodes.last().expect("nonempty");
    let lo = h.nodes[0];
    let slope = a * t_max * if a >= 1.0 { hi.powf(a - 1.0) } else { lo.powf(a - 1.0) } + r_max;
    if h.largest_gap() * slope > std::f64::consts::FRAC_PI_2 {
        return Err(Error::Resolution(format!(
            "node spacing {:.3e} cannot resolve phase rate {slope:.3e}",
            h.largest_gap()
        )));
    }
    if r_max * hi > MAX_ARG {
        return Err(Error::Range(format!("Bessel argument {} exceeds {MAX_ARG}", r_max * hi)));
    }
    Ok(())
}

/// `J_nu(r_i rho_n)` for every radius and node.
pub fn bessel_matrix(nu: f64, radii: &[f64], nodes: &[f64]) -> Array2<f64> {
    let rows: Vec<Vec<f64>> = radii
        .par_iter()
        .map(|&r| nodes.iter().map(|&rho| bessel::j_unchecked(nu, r * rho)).collect())
        .collect();
    let mut m = Array2::zeros((radii.len(), nodes.len()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    m
}

/// `J_{mu + n}(r_i rho_j)` for `n = 0..=n_max`, one backward recurrence per argument.
pub fn bessel_tables(mu: f64, n_max: usize, radii: &[f64], nodes: &[f64]) -> Vec<Array2<f64>> {
    let rows: Vec<Vec<Vec<f64>>> = radii
        .par_iter()
        .map(|&r| nodes.iter().map(|&rho| bessel::sequence_unchecked(mu, n_max, r * rho)).collect())
        .collect();
    let mut out = vec![Array2::zeros((radii.len(), nodes.len())); n_max + 1];
    for (i, row) in rows.into_iter().enumerate() {
        for (j, seq) in row.into_iter().enumerate() {
            for (n, v) in seq.into_iter().enumerate() {
                out[n][[i, j]] = v;
            }
        }
    }
    out
}

/// `U[t, r] = sum_n e^{i t rho_n^a} g_n B[r, n]` as two real matrix products.
pub fn oscillatory_sum(a: f64, times: &[f64], nodes: &[f64], g: &[Complex64], kernel: &Array2<f64>) -> Array2<Complex64> {
    let nt = times.len();
    let nn = nodes.len();
    let mut er = Array2::<f64>::zeros((nt, nn));
    let mut ei = Array2::<f64>::zeros((nt, nn));
    let powers: Vec<f64> = nodes.iter().map(|r| r.powf(a)).collect();
    for (i, &t) in times.iter().enumerate() {
        for n in 0..nn {
            let z = Complex64::from_polar(1.0, t * powers[n]) * g[n];
            er[[i, n]] = z.re;
            ei[[i, n]] = z.im;
        }
    }
    let kt = kernel.t();
    let ur = er.dot(&kt);
    let ui = ei.dot(&kt);
    let mut out = Array2::<Complex64>::zeros((nt, kernel.nrows()));
    ndarray::Zip::from(&mut out).and(&ur).and(&ui).for_each(|o, &re, &im| *o = Complex64::new(re, im));
    out
}

fn reduced_weights(h: &RadialProfile, params: &DispersionParams) -> Vec<Complex64> {
    let p = (-(params.d() as f64) + 1.0 + params.a()) / 2.0;
    h.nodes.iter().zip(&h.weights).zip(&h.values).map(|((r, w), v)| v * (w * r.powf(p))).collect()
}

/// `T_a^nu(h)` on a `(time, radius)` lattice.
pub fn t_a_nu(h: &RadialProfile, params: &DispersionParams, nu: f64, times: &[f64], radii: &[f64]) -> Result<Array2<Complex64>> {
    check_order(nu)?;
    let d = params.d();
    for &r in radii {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidInput(format!("radius {r} must be nonnegative")));
        }
        if r == 0.0 && d > 2 {
            return Err(Error::SingularPrefactor { d });
        }
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("times must be finite".into()));
    }
    check_resolution(h, params.a(), times, radii)?;
    let g = reduced_weights(h, params);
    let kernel = bessel_matrix(nu, radii, &h.nodes);
    let mut u = oscillatory_sum(params.a(), times, &h.nodes, &g, &kernel);
    let power = -(d as f64 - 2.0) / 2.0;
    for (j, &r) in radii.iter().enumerate() {
        let s = if power == 0.0 { 1.0 } else { r.powf(power) };
        u.column_mut(j).mapv_inplace(|v| v * s);
    }
    Ok(u)
}

/// `T_a^nu` of a profile given as a function on `[lo, hi]`, with the quadrature refined once.
///
/// Returns the refined matrix and the max-norm relative change under panel doubling.
pub fn t_a_nu_refined<F: Fn(f64) -> Complex64>(
    profile: F,
    band: (f64, f64),
    params: &DispersionParams,
    nu: f64,
    times: &[f64],
    radii: &[f64],
    order: usize,
) -> Result<(Array2<Complex64>, f64)> {
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let r_max = radii.iter().fold(0.0f64, |m, r| m.max(*r));
    let panels = oscillation_panels(band.0, band.1, params.a(), t_max, r_max);
    let coarse = t_a_nu(&RadialProfile::gauss(band.0, band.1, panels, order, &profile)?, params, nu, times, radii)?;
    let fine = t_a_nu(&RadialProfile::gauss(band.0, band.1, 2 * panels, order, &profile)?, params, nu, times, radii)?;
    let scale = fine.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let diff = coarse.iter().zip(fine.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let drift = if scale > 0.0 { diff / scale } else { 0.0 };
    if drift > 1e-4 {
        return Err(Error::Resolution(format!("refinement disagreement {drift:.2e} exceeds 1e-4")));
    }
    Ok((fine, drift))
}

/// Radii sampling the support annulus of `chi_j` with at least 64 points.
pub fn annulus_radii(j: i32) -> Vec<f64> {
    let (lo, hi) = band_edges(j);
    let n = ((8.0 * (hi - lo)).ceil() as usize).max(64);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Trapezoid weights for possibly nonuniform sample times.
pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for i in 1..n {
        let h = times[i] - times[i - 1];
        w[i - 1] += h / 2.0;
        w[i] += h / 2.0;
    }
    w
}

/// `||S_j^nu h||_{L_t^2 L_r^inf}` where
/// `S_j^nu h = chi_j(r) int e^{i t rho^a} J_nu(r rho) rho^{(-d+1+a)/2} chi_0(rho) h(rho) d rho`.
pub fn s_nu_j(h: &RadialProfile, params: &DispersionParams, nu: f64, j: i32, times: &[f64]) -> Result<f64> {
    check_order(nu)?;
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidInput("times must be strictly increasing".into()));
    }
    let radii = annulus_radii(j);
    check_resolution(h, params.a(), times, &radii)?;
    let localized: Vec<Complex64> = h.values.iter().zip(&h.nodes).map(|(v, &r)| v * chi(0, r)).collect();
    let g = reduced_weights(&h.with_values(localized)?, params);
    let mut kernel = bessel_matrix(nu, &radii, &h.nodes);
    for (i, &r) in radii.iter().enumerate() {
        let c = chi(j, r);
        kernel.row_mut(i).mapv_inplace(|v| v * c);
    }
    let u = oscillatory_sum(params.a(), times, &h.nodes, &g, &kernel);
    let w = trapezoid_weights(times);
    let sum: f64 = u
        .rows()
        .into_iter()
        .zip(&w)
        .map(|(row, wt)| {
            let m = row.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            wt * m * m
        })
        .sum();
    Ok(sum.sqrt())
}

/// Upper bound `sqrt(2T) * (x/2)^nu / Gamma(nu+1) * ||rho^p chi_0||_2` on `||S_j^nu h|| / ||h||_2`
/// for `nu >= x^2/4`-type arguments, with `x = (8/5)^2 2^j` the largest Bessel argument.
pub fn s_nu_j_tail_bound(params: &DispersionParams, nu: f64, j: i32, t_max: f64) -> f64 {
    let x = band_edges(j).1 * UNIT_BAND.1;
    let p = (-(params.d() as f64) + 1.0 + params.a()) / 2.0;
    let weight = UNIT_BAND.1.powf(p).max(UNIT_BAND.0.powf(p)) * (UNIT_BAND.1 - UNIT_BAND.0).sqrt();
    let series = (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)).exp() * (1.0 + x * x / (4.0 * (nu + 1.0)));
    (2.0 * t_max).sqrt() * series * weight
}

/// Smallest order on the lattice `nu_0 + k` beyond which [`s_nu_j_tail_bound`] stays below `tol`.
pub fn collapse_order(params: &DispersionParams, nu0: f64, j: i32, t_max: f64, tol: f64) -> Option<f64> {
    let x = band_edges(j).1 * UNIT_BAND.1;
    let mut nu = nu0;
    while nu <= MAX_ORDER {
        if nu + 1.0 > x * x / 4.0 && s_nu_j_tail_bound(params, nu, j, t_max) <= tol {
            return Some(nu);
        }
        nu += 1.0;
    }
    None
}

/// How random trial profiles are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialSpace {
    /// Independent complex Gaussians at each node.
    NodeGaussian,
    /// `chi_0` times a random combination of the first `modes` Fourier modes of the unit band.
    BandLimited { modes: usize },
}

/// Largest `op(h) / ||h||_2` over `trials` seeded random profiles on the template's nodes.
///
/// `op` returns the norm of the operator's output; the result lower-bounds the operator norm.
pub fn operator_norm_lower_bound<F>(template: &RadialProfile, space: TrialSpace, trials: usize, seed: u64, mut op: F) -> Result<f64>
where
    F: FnMut(&RadialProfile) -> Result<f64>,
{
    if trials < 8 {
        return Err(Error::Precondition(format!("need at least 8 trials, got {trials}")));
    }
    let mut rng = trials::rng(seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let values = match space {
            TrialSpace::NodeGaussian => trials::complex_gaussians(&mut rng, template.len()),
            TrialSpace::BandLimited { modes } => {
                let c = trials::complex_gaussians(&mut rng, modes);
                template.nodes.iter().map(|&r| trials::band_limited(&c, r)).collect()
            }
        };
        let h = template.with_values(values)?;
        let norm = h.l2_norm();
        if norm == 0.0 {
            continue;
        }
        let unit = h.scaled(Complex64::new(1.0 / norm, 0.0));
        best = best.max(op(&unit)?);
    }
    Ok(best)
}
