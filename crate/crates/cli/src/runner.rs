//! Maps each experiment kind onto the core library and flattens results into rows.

use std::f64::consts::PI;

use rayon::prelude::*;
use strichartz_core::bessel::bessel_j;
use strichartz_core::decay::{dispersive_decay_run, log_times, DecayConfig};
use strichartz_core::levy::{characteristic_check, closed_form_k, divergence_scan, stable_density, KernelPair, StableDensitySpec};
use strichartz_core::nls::{nls_run, scattering_profile, NlsConfig, SolutionTrace};
use strichartz_core::norms::{is_admissible, is_radially_admissible, scaling_regularity, AdmissibilityQuery};
use strichartz_core::params::sphere_area;
use strichartz_core::quad::gauss_legendre_on_breaks;
use strichartz_core::scans::{theorem2_scan, theorem3_scan, Theorem2Config, Theorem3Config};
use strichartz_core::spectral::{SpectralField, UniformGrid};
use strichartz_core::DispersionParams;

use crate::config::{
    AdmissibleParams, BesselParams, CharCheckParams, ClosedFormParams, DecayParams, DensityParams, ExperimentConfig,
    KhatParams, NlsParams, Params, Theorem2Params, Theorem3Params,
};
use crate::LabError;

/// Marker in the error column for outputs with no discretization error.
pub const EXACT: &str = "exact";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    pub experiment: String,
    pub params: String,
    pub metric: String,
    pub value: String,
    pub error: String,
    pub seed: u64,
}

/// Shortest round-trip decimal form; identical across runs and platforms.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Discretization summary for the sidecar file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunInfo {
    pub grid: Option<String>,
    pub time_window: Option<(f64, f64)>,
}

struct Rows<'a> {
    cfg: &'a ExperimentConfig,
    out: Vec<ResultRow>,
}

impl Rows<'_> {
    fn push(&mut self, params: String, metric: &str, value: String, error: String) {
        self.out.push(ResultRow {
            experiment: self.cfg.experiment_id(),
            params,
            metric: metric.to_string(),
            value,
            error,
            seed: self.cfg.seed,
        });
    }
}

/// Runs a validated config; rows come out in deterministic parameter order.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, RunInfo), LabError> {
    cfg.validate()?;
    let mut rows = Rows { cfg, out: Vec::new() };
    let info = match &cfg.params {
        Params::Density(p) => density(p, &mut rows)?,
        Params::CharCheck(p) => char_check(p, &mut rows)?,
        Params::DispersiveDecay(p) => decay(cfg, p, &mut rows)?,
        Params::KhatScan(p) => khat(p, &mut rows)?,
        Params::ClosedFormK(p) => closed_form(p, &mut rows)?,
        Params::BesselVerify(p) => bessel(p, &mut rows)?,
        Params::Theorem2Scan(p) => theorem2(cfg, p, &mut rows)?,
        Params::Theorem3Scan(p) => theorem3(cfg, p, &mut rows)?,
        Params::NlsRun(p) => nls(cfg, p, &mut rows)?,
        Params::AdmissibleTable(p) => admissible(p, &mut rows)?,
    };
    Ok((rows.out, info))
}

fn params(a: f64, d: usize) -> Result<DispersionParams, LabError> {
    Ok(DispersionParams::new(a, d)?)
}

/// Independent inversion of `e^{-t|xi|^a}`: a cosine integral on the line, a Hankel
/// transform otherwise, on graded Gauss–Legendre panels.
pub fn density_by_inversion(a: f64, d: usize, t: f64, r: f64) -> Result<f64, LabError> {
    let reach = (36.0 / t).powf(1.0 / a);
    let width = if r > 0.0 { (0.5f64).min(PI / (2.0 * r)) } else { 0.5 };
    let start = reach.min(1.0);
    let mut breaks: Vec<f64> = (0..=40).rev().map(|m| start * 0.5f64.powi(m)).collect();
    breaks.insert(0, 0.0);
    let panels = ((reach - start) / width).ceil().max(1.0) as usize;
    breaks.extend((1..=panels).map(|i| start + (reach - start) * i as f64 / panels as f64));
    let (nodes, weights) = gauss_legendre_on_breaks(&breaks, 16);
    let damp = |rho: f64| (-t * rho.powf(a)).exp();
    if d == 1 {
        let s: f64 = nodes.iter().zip(&weights).map(|(&k, &w)| w * (r * k).cos() * damp(k)).sum();
        return Ok(s / PI);
    }
    let dim = d as f64;
    if r == 0.0 {
        let s: f64 = nodes.iter().zip(&weights).map(|(&k, &w)| w * k.powf(dim - 1.0) * damp(k)).sum();
        return Ok(sphere_area(d) / (2.0 * PI).powf(dim) * s);
    }
    let nu = (dim - 2.0) / 2.0;
    let mut s = 0.0;
    for (&k, &w) in nodes.iter().zip(&weights) {
        s += w * bessel_j(nu, r * k)? * k.powf(dim / 2.0) * damp(k);
    }
    Ok((2.0 * PI).powf(-dim / 2.0) * r.powf(-nu) * s)
}

fn density(p: &DensityParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let spec = StableDensitySpec::new(p.a, p.d, p.t)?;
    let values: Vec<(f64, f64)> = p
        .radii
        .par_iter()
        .map(|&r| {
            let mut x = vec![0.0; p.d];
            x[0] = r;
            let v = stable_density(&spec, &x)?;
            let check = density_by_inversion(p.a, p.d, p.t, r)?;
            Ok((v, (v - check).abs()))
        })
        .collect::<Result<_, LabError>>()?;
    for (&r, (v, e)) in p.radii.iter().zip(values) {
        rows.push(format!("a={};d={};t={};x={}", num(p.a), p.d, num(p.t), num(r)), "density", num(v), num(e));
    }
    Ok(RunInfo::default())
}

fn char_check(p: &CharCheckParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let spec = StableDensitySpec::new(p.a, p.d, p.t)?;
    let values: Vec<_> = p
        .etas
        .par_iter()
        .map(|&eta| {
            let mut e = vec![0.0; p.d];
            e[0] = eta;
            characteristic_check(&spec, &e)
        })
        .collect::<Result<_, _>>()?;
    for (&eta, v) in p.etas.iter().zip(values) {
        let exact = (-p.t * eta.abs().powf(p.a)).exp();
        let snap = format!("a={};d={};t={};eta={}", num(p.a), p.d, num(p.t), num(eta));
        rows.push(snap.clone(), "characteristic_re", num(v.re), num((v - exact).norm()));
        rows.push(snap, "characteristic_im", num(v.im), num((v - exact).norm()));
    }
    Ok(RunInfo::default())
}

fn decay(cfg: &ExperimentConfig, p: &DecayParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let params = params(p.a, p.d)?;
    let mut dc = DecayConfig::standard(params);
    if p.t_min.is_some() || p.t_max.is_some() || p.samples.is_some() {
        let lo = p.t_min.unwrap_or(dc.times[0]);
        let hi = p.t_max.unwrap_or(*dc.times.last().expect("default times"));
        dc.times = log_times(lo, hi, p.samples.unwrap_or(dc.times.len()));
    }
    if let Some(m) = p.margin {
        dc.margin = m;
    }
    let grid = if p.d == 1 {
        let (n, l) = cfg.grid_or(dc.points, dc.half_width);
        dc.points = n;
        dc.half_width = l;
        format!("periodic line, N = {n}, L = {l}")
    } else {
        dc.dr = cfg.grid.dr.unwrap_or(dc.dr);
        format!("radial, dr = {}", dc.dr)
    };
    let report = dispersive_decay_run(&dc)?;
    let drift = report.refinement_drift;
    let snap = format!("a={};d={}", num(p.a), p.d);
    for (&t, &s) in report.times.iter().zip(&report.sup_norms) {
        rows.push(format!("{snap};t={}", num(t)), "sup_norm", num(s), num(drift * s));
    }
    rows.push(snap.clone(), "decay_slope", num(report.fit.slope), num(drift));
    rows.push(snap.clone(), "decay_intercept", num(report.fit.intercept), num(drift));
    rows.push(snap.clone(), "decay_r_squared", num(report.fit.r_squared), num(drift));
    rows.push(snap.clone(), "decay_degenerate", report.fit.degenerate.to_string(), EXACT.into());
    rows.push(snap, "decay_target", num(report.target), EXACT.into());
    let window = (report.times[0], *report.times.last().expect("nonempty"));
    Ok(RunInfo { grid: Some(grid), time_window: Some(window) })
}

fn khat(p: &KhatParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let scan = divergence_scan(&params(p.a, p.d)?, &p.eps)?;
    let snap = format!("a={};d={}", num(p.a), p.d);
    for ((eps, k), coarse) in scan.rows.iter().zip(&scan.coarse) {
        rows.push(format!("{snap};eps={}", num(*eps)), "k_hat0", num(*k), num((k - coarse).abs()));
    }
    let (f, c) = (scan.fit, scan.coarse_fit);
    rows.push(snap.clone(), "fit_slope", num(f.slope), num((f.slope - c.slope).abs()));
    rows.push(snap.clone(), "fit_intercept", num(f.intercept), num((f.intercept - c.intercept).abs()));
    rows.push(snap, "fit_r_squared", num(f.r_squared), num((f.r_squared - c.r_squared).abs()));
    Ok(RunInfo::default())
}

fn closed_form(p: &ClosedFormParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let params = params(p.a, p.d)?;
    let pair = KernelPair { sigma: p.sigma, alpha: p.alpha, beta: p.a - p.d as f64 - p.alpha, gamma: p.gamma };
    let values: Vec<_> = p.times.par_iter().map(|&t| closed_form_k(&params, &pair, t)).collect::<Result<_, _>>()?;
    for (&t, (numeric, analytic)) in p.times.iter().zip(values) {
        let snap = format!("a={};d={};sigma={};alpha={};t={}", num(p.a), p.d, num(p.sigma), num(p.alpha), num(t));
        let err = num((numeric - analytic).norm());
        rows.push(snap.clone(), "k_re", num(numeric.re), err.clone());
        rows.push(snap, "k_im", num(numeric.im), err);
    }
    Ok(RunInfo::default())
}

fn bessel(p: &BesselParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let cells: Vec<(f64, f64)> = p.orders.iter().flat_map(|&nu| p.radii.iter().map(move |&r| (nu, r))).collect();
    let values: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&(nu, r)| {
            let j0 = bessel_j(nu, r)?;
            let j1 = bessel_j(nu + 1.0, r)?;
            let j2 = bessel_j(nu + 2.0, r)?;
            Ok((j0, (j0 + j2 - 2.0 * (nu + 1.0) / r * j1).abs()))
        })
        .collect::<Result<_, LabError>>()?;
    for (&(nu, r), (v, e)) in cells.iter().zip(values) {
        rows.push(format!("nu={};r={}", num(nu), num(r)), "bessel_j", num(v), num(e));
    }
    Ok(RunInfo::default())
}

fn theorem2(cfg: &ExperimentConfig, p: &Theorem2Params, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let params = params(p.a, p.d)?;
    let degrees: Vec<usize> = (0..=p.max_degree).collect();
    let defaults = Theorem2Config::default();
    let sc = Theorem2Config {
        window: p.window.unwrap_or(defaults.window),
        dt: p.dt.unwrap_or(defaults.dt),
        modes: p.modes.unwrap_or(defaults.modes),
        check_degrees: Some(degrees.clone()),
        ..defaults
    };
    let table = theorem2_scan(&params, p.s, &degrees, p.trials, cfg.seed, &sc)?;
    let snap = format!("a={};d={};s={}", num(p.a), p.d, num(p.s));
    for row in &table.rows {
        let refine = row.refine_drift.expect("every degree is checked");
        let tail = row.tail_drift.expect("every degree is checked");
        let cell = format!("{snap};k={};nu={}", row.degree, num(row.nu));
        rows.push(cell.clone(), "ratio", num(row.ratio), num(refine));
        rows.push(cell, "tail_drift", num(tail), num(refine));
    }
    Ok(RunInfo { grid: Some(format!("radial, dr = {}, dt = {}", sc.dr, sc.dt)), time_window: Some((-table.window, table.window)) })
}

fn theorem3(cfg: &ExperimentConfig, p: &Theorem3Params, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let params = params(p.a, p.d)?;
    let (pe, re) = (p.p.parse("p")?, p.r.parse("r")?);
    let defaults = Theorem3Config::default();
    let (points, half_width) = cfg.grid_or(defaults.points, defaults.half_width);
    let sc = Theorem3Config {
        window: p.window.unwrap_or(defaults.window),
        dt: p.dt.unwrap_or(defaults.dt),
        points,
        half_width,
        ..defaults
    };
    let table = theorem3_scan(&params, pe, re, p.trials, cfg.seed, &sc, true)?;
    let drift = num(table.window_drift.unwrap_or(0.0));
    let snap = format!("a={};d={};p={pe};r={re}", num(p.a), p.d);
    for (i, v) in table.trial_ratios.iter().enumerate() {
        rows.push(format!("{snap};trial={i}"), "trial_ratio", num(*v), drift.clone());
    }
    rows.push(snap, "max_ratio", num(table.max_ratio), drift);
    Ok(RunInfo {
        grid: Some(format!("odd periodic line, N = {points}, L = {half_width}, dt = {}", sc.dt)),
        time_window: Some((0.0, table.window)),
    })
}

struct NlsSummary {
    times: Vec<f64>,
    mass: Vec<f64>,
    mass_drift: Vec<f64>,
    sup: Vec<f64>,
    critical: Vec<f64>,
    distance: Vec<f64>,
    middle: f64,
    last: f64,
}

fn nls_summary(trace: &SolutionTrace, params: &DispersionParams, stride: usize) -> Result<NlsSummary, LabError> {
    let report = scattering_profile(trace, params)?;
    let last_index = trace.times.len() - 1;
    let steps = trace.mass.len() - 1;
    let recorded: Vec<usize> = (0..=steps).filter(|n| n % stride == 0 || *n == steps).collect();
    let m0 = trace.mass[0];
    let diag = report.diagnose(f64::INFINITY);
    Ok(NlsSummary {
        times: trace.times.clone(),
        mass: recorded.iter().map(|&n| trace.mass[n]).collect(),
        mass_drift: recorded.iter().map(|&n| if m0 > 0.0 { (trace.mass[n] - m0).abs() / m0 } else { 0.0 }).collect(),
        sup: recorded.iter().map(|&n| trace.sup_norm[n]).collect(),
        critical: trace.critical_norm.clone(),
        distance: report.distances.iter().map(|row| row[last_index]).collect(),
        middle: diag.middle,
        last: diag.last,
    })
}

fn nls(cfg: &ExperimentConfig, p: &NlsParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let params = params(p.a, p.d)?;
    let (n, l) = cfg.grid_or(1024, 64.0);
    let grid = UniformGrid::new(p.d, n, l)?;
    let w2 = 2.0 * p.width * p.width;
    let phi = SpectralField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (p.amplitude * (-r2 / w2).exp()).into()
    });
    let runs: Vec<_> = [(p.dt, p.stride), (p.dt / 2.0, 2 * p.stride)]
        .par_iter()
        .map(|&(dt, stride)| {
            let nc = NlsConfig::new(params, phi.clone(), dt, p.horizon)?.with_trace_stride(stride);
            let trace = nls_run(&nc)?;
            nls_summary(&trace, &params, stride)
        })
        .collect::<Result<_, LabError>>()?;
    let (coarse, fine) = (&runs[0], &runs[1]);
    if coarse.times.len() != fine.times.len() {
        return Err(LabError::Numerical(strichartz_core::Error::Mismatch("half-step run recorded different times".into())));
    }
    let snap = format!("a={};d={};amplitude={};width={}", num(p.a), p.d, num(p.amplitude), num(p.width));
    for i in 0..coarse.times.len() {
        let cell = format!("{snap};t={}", num(coarse.times[i]));
        let series = [
            ("mass", coarse.mass[i], fine.mass[i]),
            ("mass_drift", coarse.mass_drift[i], fine.mass_drift[i]),
            ("sup_norm", coarse.sup[i], fine.sup[i]),
            ("critical_norm", coarse.critical[i], fine.critical[i]),
            ("scattering_distance", coarse.distance[i], fine.distance[i]),
        ];
        for (metric, v, h) in series {
            rows.push(cell.clone(), metric, num(v), num((v - h).abs()));
        }
    }
    rows.push(snap.clone(), "scattering_middle", num(coarse.middle), num((coarse.middle - fine.middle).abs()));
    rows.push(snap, "scattering_last", num(coarse.last), num((coarse.last - fine.last).abs()));
    Ok(RunInfo { grid: Some(format!("periodic, d = {}, N = {n}, L = {l}, dt = {}", p.d, p.dt)), time_window: Some((0.0, p.horizon)) })
}

fn admissible(p: &AdmissibleParams, rows: &mut Rows) -> Result<RunInfo, LabError> {
    let params = params(p.a, p.d)?;
    let qs = p.q.iter().map(|q| q.parse("q")).collect::<Result<Vec<_>, _>>()?;
    let ps = p.p.iter().map(|e| e.parse("p")).collect::<Result<Vec<_>, _>>()?;
    for &q in &qs {
        for &e in &ps {
            let query = AdmissibilityQuery::new(params, q, e);
            let snap = format!("a={};d={};q={q};p={e}", num(p.a), p.d);
            rows.push(snap.clone(), "admissible", is_admissible(&query).to_string(), EXACT.into());
            rows.push(snap.clone(), "radially_admissible", is_radially_admissible(&query).to_string(), EXACT.into());
            rows.push(snap, "scaling_regularity", num(scaling_regularity(&params, q, e)), EXACT.into());
        }
    }
    Ok(RunInfo::default())
}
