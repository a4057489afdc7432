//! Bessel functions of the first kind `J_nu(x)` for real `nu >= 0`, `x >= 0`.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: f64 = 200.0;
/// Largest supported argument.
pub const MAX_ARG: f64 = 1.0e4;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_FLOOR: f64 = 25.0;
const RESCALE: f64 = 1.0e250;

/// `J_nu(r)` inside the envelope `0 <= nu <= 200`, `0 <= r <= 1e4`.
pub fn bessel_j(nu: f64, r: f64) -> Result<f64> {
    if !nu.is_finite() || !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::Range(format!("Bessel order {nu} outside [0, {MAX_ORDER}]")));
    }
    if !r.is_finite() || !(0.0..=MAX_ARG).contains(&r) {
        return Err(Error::Range(format!("Bessel argument {r} outside [0, {MAX_ARG}]")));
    }
    Ok(j_unchecked(nu, r))
}

pub(crate) fn j_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT.max(nu / 2.0) {
        return series(nu, x);
    }
    if x >= ASYMPTOTIC_FLOOR {
        if let Some(v) = hankel_asymptotic(nu, x) {
            return v;
        }
    }
    let base = nu.fract();
    let n = (nu - base).round() as usize;
    *miller_sequence(base, n, x).last().expect("sequence is nonempty")
}

/// `J_{mu + n}(x)` for `n = 0..=n_max` from one backward recurrence.
pub fn bessel_j_sequence(mu: f64, n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !mu.is_finite() || mu < 0.0 || mu + n_max as f64 > MAX_ORDER {
        return Err(Error::Range(format!(
            "orders {mu}..{} outside [0, {MAX_ORDER}]",
            mu + n_max as f64
        )));
    }
    if !x.is_finite() || !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::Range(format!("Bessel argument {x} outside [0, {MAX_ARG}]")));
    }
    Ok(sequence_unchecked(mu, n_max, x))
}

pub(crate) fn sequence_unchecked(mu: f64, n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 || x <= SERIES_LIMIT {
        return (0..=n_max).map(|n| j_unchecked(mu + n as f64, x)).collect();
    }
    miller_sequence(mu, n_max, x)
}

fn series(nu: f64, x: f64) -> f64 {
    let log_pre = nu * (x / 2.0).ln() - ln_gamma(nu + 1.0);
    if log_pre < -745.0 {
        return 0.0;
    }
    let q = -x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > q.abs().sqrt() {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    log_pre.exp() * sum
}

/// Hankel large-argument expansion; `None` unless the terms converge to double precision.
fn hankel_asymptotic(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut largest: f64 = 1.0;
    let mut converged = false;
    for k in 1..=80usize {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        largest = largest.max(term.abs());
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term == 0.0 || term.abs() <= 1e-17 * (p.abs() + q.abs()) {
            converged = true;
            break;
        }
    }
    if !converged || largest > 10.0 {
        return None;
    }
    // chi = x - (nu/2 + 1/4) pi, expanded to keep large x exact
    let phase = ((nu / 2.0 + 0.25) % 2.0) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    Some((2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi))
}

/// Backward recurrence normalized by `(x/2)^mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x)`.
fn miller_sequence(mu: f64, n_max: usize, x: f64) -> Vec<f64> {
    let top = (n_max as f64).max(x);
    let start = (top + 20.0 + (80.0 * top).sqrt()).ceil() as usize;
    let mut out = vec![0.0; n_max + 1];

    // normalization coefficients c_0 = Gamma(mu+1), c_k = (mu+2k) g_k with
    // g_1 = Gamma(mu+1), g_k = g_{k-1} (mu+k-1)/k
    let g1 = ln_gamma(mu + 1.0).exp();
    let mut coeffs = Vec::with_capacity(start / 2 + 1);
    coeffs.push(g1);
    let mut g = g1;
    for k in 1..=start / 2 {
        if k > 1 {
            g *= (mu + k as f64 - 1.0) / k as f64;
        }
        coeffs.push((mu + 2.0 * k as f64) * g);
    }

    let mut above = 0.0; // J_{mu + m + 1}
    let mut here = 1e-300; // J_{mu + m}
    let mut norm = 0.0;
    let mut m = start;
    loop {
        if m <= n_max {
            out[m] = here;
        }
        if m % 2 == 0 {
            norm += coeffs[m / 2] * here;
        }
        if m == 0 {
            break;
        }
        let below = 2.0 * (mu + m as f64) / x * here - above;
        above = here;
        here = below;
        m -= 1;
        if here.abs() > RESCALE {
            here /= RESCALE;
            above /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut().skip(m + 1) {
                *v /= RESCALE;
            }
        }
    }
    let target = (mu * (x / 2.0).ln()).exp();
    let scale = target / norm;
    for v in &mut out {
        *v *= scale;
    }
    out
}
