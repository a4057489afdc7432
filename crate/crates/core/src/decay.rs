//! Measured `L^inf` decay of frequency-localized free solutions.

use num_complex::Complex64;

use crate::cutoff::chi;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::params::DispersionParams;
use crate::radial::{oscillation_panels, t_a_nu, RadialProfile};
use crate::scans::parabolic_peak;
use crate::spectral::{propagate, SpectralField, Space, UniformGrid};
use crate::trials::UNIT_BAND;

/// Boundary-mass fraction above which a periodic run counts as wrapped around.
pub const WRAPAROUND_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayConfig {
    pub params: DispersionParams,
    pub times: Vec<f64>,
    /// Periodic grid for `d = 1`.
    pub points: usize,
    pub half_width: f64,
    /// Radius spacing for the radial path (`d >= 2`).
    pub dr: f64,
    /// Radii extend this far past the fastest group velocity.
    pub margin: f64,
}

/// `n` log-spaced times from `lo` to `hi`.
pub fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let mut t: Vec<f64> = (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect();
    t[0] = lo;
    t[n - 1] = hi;
    t
}

impl DecayConfig {
    /// Periodic grid path on the line: `[50, 2000]`, `N = 32768`, `L = 16384`.
    /// Radial path otherwise: `[32, 512]`, `dr = 1/2`.
    pub fn standard(params: DispersionParams) -> Self {
        if params.d() == 1 {
            Self { params, times: log_times(50.0, 2000.0, 12), points: 32768, half_width: 16384.0, dr: 0.5, margin: 30.0 }
        } else {
            Self { params, times: log_times(32.0, 512.0, 9), points: 32768, half_width: 16384.0, dr: 0.5, margin: 30.0 }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// Fit of `ln sup |u|` against `ln t`.
    pub fit: LinearFit,
    /// `-(d - d_a + 2)/2`.
    pub target: f64,
    /// Relative change of the last sup norm under grid or radius refinement.
    pub refinement_drift: f64,
}

fn line_sup(grid: UniformGrid, params: &DispersionParams, t: f64) -> Result<(f64, f64)> {
    let mags = grid.frequency_magnitudes();
    let freq = mags.iter().map(|&k| Complex64::new(chi(0, k), 0.0)).collect();
    let f = SpectralField::from_values(grid, freq, Space::Frequency)?;
    let u = propagate(&f, t, params)?.to_physical();
    let total: f64 = u.values().iter().map(|v| v.norm_sqr()).sum();
    let edge = 0.75 * grid.half_width();
    let outer: f64 = (0..grid.len()).filter(|&i| grid.coord(i).abs() >= edge).map(|i| u.values()[i].norm_sqr()).sum();
    Ok((u.linf_norm(), if total > 0.0 { outer / total } else { 0.0 }))
}

fn radial_sup(params: &DispersionParams, t: f64, dr: f64, margin: f64) -> Result<f64> {
    let (a, d) = (params.a(), params.d());
    let (lo, hi) = UNIT_BAND;
    let speed = a * lo.powf(a - 1.0).max(hi.powf(a - 1.0));
    let r_max = speed * t + margin;
    let radii: Vec<f64> = (1..).map(|i| i as f64 * dr).take_while(|&r| r <= r_max).collect();
    let power = (2.0 * d as f64 - 1.0 - a) / 2.0;
    let panels = oscillation_panels(lo, hi, a, t, r_max);
    let h = RadialProfile::gauss(lo, hi, panels, 8, |rho| Complex64::new(rho.powf(power) * chi(0, rho), 0.0))?;
    let nu = (d as f64 - 2.0) / 2.0;
    let u = t_a_nu(&h, params, nu, &[t], &radii)?;
    let c = (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
    let sq: Vec<f64> = u.row(0).iter().map(|v| (v * c).norm_sqr()).collect();
    Ok(parabolic_peak(&sq).sqrt())
}

/// `sup_x |e^{itD^a} P_0 phi|` with `hat phi = chi_0`, fitted against `t` on log axes.
pub fn dispersive_decay_run(cfg: &DecayConfig) -> Result<DecayReport> {
    if cfg.times.is_empty() || cfg.times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::InvalidInput("decay times must be positive and finite".into()));
    }
    let params = &cfg.params;
    let (sup_norms, refinement_drift) = if params.d() == 1 {
        let grid = UniformGrid::new(1, cfg.points, cfg.half_width)?;
        let mut sups = Vec::with_capacity(cfg.times.len());
        for &t in &cfg.times {
            let (s, mass) = line_sup(grid, params, t)?;
            if mass > WRAPAROUND_LIMIT {
                return Err(Error::Wraparound { mass, limit: WRAPAROUND_LIMIT });
            }
            sups.push(s);
        }
        let t_last = *cfg.times.last().expect("nonempty");
        let (fine, _) = line_sup(grid.refined(), params, t_last)?;
        let last = *sups.last().expect("nonempty");
        let drift = (fine - last).abs() / last;
        if drift >= 0.01 {
            return Err(Error::Resolution(format!("sup norm moved by {drift:.2e} under grid doubling")));
        }
        (sups, drift)
    } else {
        let sups = cfg.times.iter().map(|&t| radial_sup(params, t, cfg.dr, cfg.margin)).collect::<Result<Vec<_>>>()?;
        let t_last = *cfg.times.last().expect("nonempty");
        let fine = radial_sup(params, t_last, cfg.dr / 2.0, cfg.margin)?;
        let last = *sups.last().expect("nonempty");
        let drift = (fine - last).abs() / last;
        if drift >= 0.01 {
            return Err(Error::Resolution(format!("sup norm moved by {drift:.2e} under radius refinement")));
        }
        (sups, drift)
    };
    let xs: Vec<f64> = cfg.times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = sup_norms.iter().map(|s| s.ln()).collect();
    let fit = linear_fit(&xs, &ys);
    let target = -((params.d() as f64 - params.d_a() as f64 + 2.0) / 2.0);
    Ok(DecayReport { times: cfg.times.clone(), sup_norms, fit, target, refinement_drift })
}
