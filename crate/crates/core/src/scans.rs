//! Randomized lower-bound scans for the angular-smoothing and double-endpoint inhomogeneous
//! space–time estimates.

use ndarray::{s, Array2};
use num_complex::Complex64;
use num_rational::Ratio;
use statrs::function::gamma::ln_gamma;

use crate::cutoff::chi;
use crate::error::{Error, Result};
use crate::nls::duhamel_integral;
use crate::norms::{Exponent, SpaceTimeSample};
use crate::params::{sphere_area, DispersionParams};
use crate::quad::composite_gauss_legendre;
use crate::radial::{bessel_tables, oscillation_panels, trapezoid_weights};
use crate::spectral::{SpectralField, Space, UniformGrid};
use crate::trials::{self, band_mode, UNIT_BAND};

/// Discretization of the degree scan. All lengths refer to the unit band; `band_scale = lambda`
/// moves the profiles to `[5/8 lambda, 8/5 lambda]` and rescales time and radius accordingly.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Config {
    /// Times cover `[-window, window]`.
    pub window: f64,
    pub dt: f64,
    pub dr: f64,
    /// Radii run to the largest group-velocity distance plus this margin.
    pub radius_margin: f64,
    pub gl_order: usize,
    /// Fourier modes per random profile.
    pub modes: usize,
    pub band_scale: f64,
    /// Degrees whose refinement and tail drifts are measured; `None` means first and last.
    pub check_degrees: Option<Vec<usize>>,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Self {
            window: 64.0,
            dt: 0.2,
            dr: 0.25,
            radius_margin: 40.0,
            gl_order: 4,
            modes: 6,
            band_scale: 1.0,
            check_degrees: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Row {
    pub degree: usize,
    pub nu: f64,
    /// Largest ratio over the trials.
    pub ratio: f64,
    pub trial_ratios: Vec<f64>,
    /// Relative change of `ratio` with doubled quadrature nodes and halved time step.
    pub refine_drift: Option<f64>,
    /// Relative change of `ratio` with the time window doubled.
    pub tail_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Table {
    pub s: f64,
    pub window: f64,
    pub seed: u64,
    pub rows: Vec<Theorem2Row>,
    /// Largest refinement drift over the checked degrees.
    pub refine_drift: f64,
    /// Largest window-doubling drift over the checked degrees.
    pub tail_drift: f64,
}

/// Largest admissible angular regularity: `(d-2)/2` for `d >= 3`, `1/7 + (d-2)/2` for `a > 1`.
pub fn theorem2_threshold(params: &DispersionParams) -> Option<f64> {
    let d = params.d() as f64;
    let mut best = None;
    if params.d() >= 3 {
        best = Some((d - 2.0) / 2.0);
    }
    if params.a() > 1.0 && params.d() >= 2 {
        best = Some(1.0 / 7.0 + (d - 2.0) / 2.0);
    }
    best
}

struct Layout {
    times: Vec<f64>,
    time_weights: Vec<f64>,
    radii: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    powers: Vec<f64>,
    /// `w_n rho_n^p b_m(rho_n)` per mode.
    reduced: Vec<Vec<Complex64>>,
    /// `b_m(rho_n)` per mode.
    basis: Vec<Vec<Complex64>>,
}

fn layout(params: &DispersionParams, cfg: &Theorem2Config, refine: bool, tail: bool) -> Result<Layout> {
    let a = params.a();
    let lam = cfg.band_scale;
    let time_scale = lam.powf(a);
    let window = cfg.window * if tail { 2.0 } else { 1.0 } / time_scale;
    let dt = cfg.dt * if refine { 0.5 } else { 1.0 } / time_scale;
    let dr = cfg.dr / lam;
    let (lo, hi) = (UNIT_BAND.0 * lam, UNIT_BAND.1 * lam);
    let speed = a * lo.powf(a - 1.0).max(hi.powf(a - 1.0));
    let r_max = speed * window + cfg.radius_margin / lam;

    let nt = (2.0 * window / dt).round() as usize + 1;
    let times: Vec<f64> = (0..nt).map(|i| -window + 2.0 * window * i as f64 / (nt - 1) as f64).collect();
    let nr = (r_max / dr).ceil() as usize + 1;
    let radii: Vec<f64> = (0..nr).map(|i| i as f64 * dr).collect();

    let panels = oscillation_panels(lo, hi, a, window, r_max) * if refine { 2 } else { 1 };
    let (nodes, weights) = composite_gauss_legendre(lo, hi, panels, cfg.gl_order);
    let gap = nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
    if gap * (speed * window + r_max) > std::f64::consts::PI {
        return Err(Error::Resolution(format!("node gap {gap:.3e} too coarse for the scan window")));
    }
    let p = (-(params.d() as f64) + 1.0 + a) / 2.0;
    let powers = nodes.iter().map(|r| r.powf(a)).collect();
    let basis: Vec<Vec<Complex64>> = (0..cfg.modes)
        .map(|m| nodes.iter().map(|&r| band_mode(m, r / lam) * chi(0, r / lam)).collect())
        .collect();
    let reduced = basis
        .iter()
        .map(|b| b.iter().zip(&nodes).zip(&weights).map(|((v, r), w)| v * (w * r.powf(p))).collect())
        .collect();
    let time_weights = trapezoid_weights(&times);
    Ok(Layout { times, time_weights, radii, nodes, weights, powers, reduced, basis })
}

/// `r^{-(d-2)/2} J_nu(r rho)` with its limit at `r = 0`.
fn kernel(lay: &Layout, table: &Array2<f64>, nu: f64, d: usize) -> Array2<f64> {
    let power = -(d as f64 - 2.0) / 2.0;
    let mut k = table.clone();
    for (i, &r) in lay.radii.iter().enumerate() {
        if r == 0.0 {
            let base = (d as f64 - 2.0) / 2.0;
            for (n, &rho) in lay.nodes.iter().enumerate() {
                k[[i, n]] = if nu == base { ((rho / 2.0).ln() * nu - ln_gamma(nu + 1.0)).exp() } else { 0.0 };
            }
        } else if power != 0.0 {
            let c = r.powf(power);
            k.row_mut(i).mapv_inplace(|v| v * c);
        }
    }
    k
}

/// Peak of `y` with a parabolic fit through the largest sample and its neighbours.
pub fn parabolic_peak(y: &[f64]) -> f64 {
    let (i, &top) = y
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, (i, v)| if *v > *best.1 { (i, v) } else { best });
    if i == 0 || i + 1 >= y.len() {
        return top;
    }
    let den = y[i - 1] - 2.0 * top + y[i + 1];
    if den >= 0.0 {
        return top;
    }
    top - (y[i + 1] - y[i - 1]).powi(2) / (8.0 * den)
}

const TIME_CHUNK: usize = 32;

/// `||T(h_tau)||_{L_t^2 L_r^inf}` for every trial combination `h_tau = sum_m c_{tau m} b_m`.
fn numerators(lay: &Layout, kern: &Array2<f64>, coeffs: &[Vec<Complex64>]) -> Vec<f64> {
    let modes = lay.reduced.len();
    let nn = lay.nodes.len();
    let nr = lay.radii.len();
    let kt = kern.t();
    let mut acc = vec![0.0; coeffs.len()];
    let mut row = vec![0.0; nr];
    let mut z = vec![Complex64::default(); nr];
    for start in (0..lay.times.len()).step_by(TIME_CHUNK) {
        let end = (start + TIME_CHUNK).min(lay.times.len());
        let rows = (end - start) * modes;
        let mut er = Array2::<f64>::zeros((rows, nn));
        let mut ei = Array2::<f64>::zeros((rows, nn));
        for (ti, &t) in lay.times[start..end].iter().enumerate() {
            for n in 0..nn {
                let e = Complex64::from_polar(1.0, t * lay.powers[n]);
                for m in 0..modes {
                    let v = e * lay.reduced[m][n];
                    er[[ti * modes + m, n]] = v.re;
                    ei[[ti * modes + m, n]] = v.im;
                }
            }
        }
        let ur = er.dot(&kt);
        let ui = ei.dot(&kt);
        for ti in 0..end - start {
            let w = lay.time_weights[start + ti];
            let block_r = ur.slice(s![ti * modes..(ti + 1) * modes, ..]);
            let block_i = ui.slice(s![ti * modes..(ti + 1) * modes, ..]);
            for (tau, c) in coeffs.iter().enumerate() {
                z.iter_mut().for_each(|v| *v = Complex64::default());
                for m in 0..modes {
                    let cm = c[m];
                    let (br, bi) = (block_r.row(m), block_i.row(m));
                    for r in 0..nr {
                        z[r] += cm * Complex64::new(br[r], bi[r]);
                    }
                }
                for r in 0..nr {
                    row[r] = z[r].norm_sqr();
                }
                acc[tau] += w * parabolic_peak(&row);
            }
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

fn profile_norm(lay: &Layout, c: &[Complex64]) -> f64 {
    let mut sum = 0.0;
    for n in 0..lay.nodes.len() {
        let v: Complex64 = c.iter().zip(&lay.basis).map(|(cm, b)| cm * b[n]).sum();
        sum += lay.weights[n] * v.norm_sqr();
    }
    sum.sqrt()
}

fn degree_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn scan_layout(
    params: &DispersionParams,
    cfg: &Theorem2Config,
    lay: &Layout,
    s: f64,
    degrees: &[usize],
    trials: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let d = params.d();
    let base = (d as f64 - 2.0) / 2.0;
    let mu = base - base.floor();
    let shift = base.floor() as usize;
    let top = degrees.iter().copied().max().unwrap_or(0);
    let tables = bessel_tables(mu, shift + top, &lay.radii, &lay.nodes);
    degrees
        .iter()
        .map(|&k| {
            let nu = base + k as f64;
            let kern = kernel(lay, &tables[shift + k], nu, d);
            let mut rng = trials::rng(degree_seed(seed, k));
            let coeffs: Vec<Vec<Complex64>> = (0..trials).map(|_| trials::complex_gaussians(&mut rng, cfg.modes)).collect();
            let nums = numerators(lay, &kern, &coeffs);
            let weight = (1.0 + k as f64).powf(s);
            nums.iter().zip(&coeffs).map(|(num, c)| weight * num / profile_norm(lay, c)).collect()
        })
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `R(k) = max_trials (1+k)^s ||T_a^nu h||_{L_t^2 L_r^inf} / ||h||_{L^2(d rho)}` with
/// `nu = (d-2)/2 + k` and band-limited random `h` on the unit annulus.
pub fn theorem2_scan(
    params: &DispersionParams,
    s: f64,
    degrees: &[usize],
    trials: usize,
    seed: u64,
    cfg: &Theorem2Config,
) -> Result<Theorem2Table> {
    let threshold = theorem2_threshold(params).ok_or_else(|| {
        Error::Precondition(format!("needs d >= 3, or d >= 2 with a > 1; got a = {}, d = {}", params.a(), params.d()))
    })?;
    if !s.is_finite() || s >= threshold {
        return Err(Error::Precondition(format!("s = {s} is not below the threshold {threshold:.6}")));
    }
    if trials == 0 || cfg.modes == 0 {
        return Err(Error::InvalidInput("need at least one trial and one mode".into()));
    }
    if !(cfg.window > 0.0 && cfg.dt > 0.0 && cfg.dr > 0.0 && cfg.band_scale > 0.0 && cfg.gl_order > 0) {
        return Err(Error::InvalidInput("window, dt, dr, band_scale and gl_order must be positive".into()));
    }
    let top = degrees.iter().copied().max().unwrap_or(0);
    if (params.d() as f64 - 2.0) / 2.0 + top as f64 > crate::bessel::MAX_ORDER {
        return Err(Error::Range(format!("degree {top} exceeds the supported Bessel order")));
    }
    let mut checks: Vec<usize> = match &cfg.check_degrees {
        Some(v) => v.iter().copied().filter(|k| degrees.contains(k)).collect(),
        None => degrees.first().into_iter().chain(degrees.last()).copied().collect(),
    };
    checks.sort_unstable();
    checks.dedup();

    let base_lay = layout(params, cfg, false, false)?;
    let base = scan_layout(params, cfg, &base_lay, s, degrees, trials, seed);
    drop(base_lay);
    let (refined, tailed) = if checks.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let lay = layout(params, cfg, true, false)?;
        let refined = scan_layout(params, cfg, &lay, s, &checks, trials, seed);
        drop(lay);
        let lay = layout(params, cfg, false, true)?;
        let tailed = scan_layout(params, cfg, &lay, s, &checks, trials, seed);
        (refined, tailed)
    };

    let mut rows = Vec::with_capacity(degrees.len());
    let (mut refine_drift, mut tail_drift) = (0.0f64, 0.0f64);
    for (i, &k) in degrees.iter().enumerate() {
        let ratio = max_of(&base[i]);
        let (rd, td) = match checks.iter().position(|&c| c == k) {
            Some(j) => {
                let rd = (max_of(&refined[j]) - ratio).abs() / ratio;
                let td = (max_of(&tailed[j]) - ratio).abs() / ratio;
                refine_drift = refine_drift.max(rd);
                tail_drift = tail_drift.max(td);
                (Some(rd), Some(td))
            }
            None => (None, None),
        };
        if !ratio.is_finite() {
            return Err(Error::Convergence(format!("non-finite ratio at degree {k}")));
        }
        rows.push(Theorem2Row {
            degree: k,
            nu: (params.d() as f64 - 2.0) / 2.0 + k as f64,
            ratio,
            trial_ratios: base[i].clone(),
            refine_drift: rd,
            tail_drift: td,
        });
    }
    Ok(Theorem2Table { s, window: cfg.window / cfg.band_scale.powf(params.a()), seed, rows, refine_drift, tail_drift })
}

/// `(4d + 2 - 2 d_a) / (2d - d_a - 1)`, the lower limit for both spatial exponents.
pub fn theorem3_threshold(params: &DispersionParams) -> Result<Ratio<i64>> {
    let d = params.d() as i64;
    let d_a = params.d_a() as i64;
    if d <= d_a {
        return Err(Error::Precondition(format!("needs d > d_a; got d = {d}, d_a = {d_a}")));
    }
    Ok(Ratio::new(4 * d + 2 - 2 * d_a, 2 * d - d_a - 1))
}

/// Checks `d > d_a` and that `p` and `r` lie strictly above the threshold.
pub fn check_theorem3_exponents(params: &DispersionParams, p: Exponent, r: Exponent) -> Result<()> {
    let th = theorem3_threshold(params)?;
    for (name, e) in [("p", p), ("r", r)] {
        let ok = match e {
            Exponent::Infinity => true,
            Exponent::Finite(x) => x > th,
        };
        if !ok {
            return Err(Error::Precondition(format!("{name} = {e} must exceed {}/{}", th.numer(), th.denom())));
        }
    }
    Ok(())
}

/// Discretization of the inhomogeneous scan for radial data in `R^3`, carried by the odd
/// function `v(x) = x u(|x|)` on a periodic line.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Config {
    /// Output times cover `[0, window]`.
    pub window: f64,
    pub dt: f64,
    pub half_width: f64,
    pub points: usize,
    /// The forcing lives on `[0, forcing_duration]`.
    pub forcing_duration: f64,
    /// Odd Gaussian pairs per forcing.
    pub pairs: usize,
    /// Pair centres are drawn uniformly from this radial range.
    pub centres: (f64, f64),
    /// Fourier modes of each pair's time profile.
    pub time_modes: usize,
}

impl Default for Theorem3Config {
    fn default() -> Self {
        Self {
            window: 64.0,
            dt: 0.1,
            half_width: 256.0,
            points: 2048,
            forcing_duration: 8.0,
            pairs: 4,
            centres: (4.0, 16.0),
            time_modes: 3,
        }
    }
}

impl Theorem3Config {
    /// Window, box and point count all doubled.
    pub fn doubled(&self) -> Self {
        Self { window: 2.0 * self.window, half_width: 2.0 * self.half_width, points: 2 * self.points, ..self.clone() }
    }

    fn times(&self) -> Vec<f64> {
        let n = (self.window / self.dt).round() as usize;
        (0..=n).map(|i| i as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Table {
    pub p: Exponent,
    pub r: Exponent,
    pub window: f64,
    pub seed: u64,
    /// One ratio per trial; empty when every forcing vanishes.
    pub trial_ratios: Vec<f64>,
    /// Ensemble maximum (zero for an empty table).
    pub max_ratio: f64,
    /// Relative change of `max_ratio` with the window doubled, when measured.
    pub window_drift: Option<f64>,
}

/// `|S^2|^{1/2} (int_0^inf |v(r)|^p r^{2-p} dr)^{1/p}` for the odd reduction `v = r u`.
fn radial_norm_3d(values: &[Complex64], grid: &UniformGrid, p: Exponent) -> f64 {
    let n = grid.points_per_axis();
    let dx = grid.dx();
    let pos = (n / 2 + 1)..n;
    let amp = sphere_area(3).sqrt();
    match p {
        Exponent::Infinity => amp * pos.map(|j| values[j].norm() / grid.coord(j)).fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let pf = p.to_f64();
            let sum: f64 = pos.map(|j| values[j].norm().powf(pf) * grid.coord(j).powf(2.0 - pf)).sum();
            amp * (sum * dx).powf(1.0 / pf)
        }
    }
}

fn l2_time(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt()
}

/// `||int_0^t e^{i(t-s)D^a} P_0 g ds||_{L_t^2 L^p L^2_omega} / ||g||_{L_t^2 L^{r'} L^2_omega}` for a
/// radial forcing in `R^3` given through its odd reduction. `None` when `g = 0`.
pub fn theorem3_ratio(params: &DispersionParams, p: Exponent, r: Exponent, forcing: &SpaceTimeSample) -> Result<Option<f64>> {
    if params.d() != 3 {
        return Err(Error::Domain(format!("the radial reduction is implemented for d = 3, got {}", params.d())));
    }
    check_theorem3_exponents(params, p, r)?;
    let fields = forcing.fields().ok_or_else(|| Error::Precondition("forcing must be full-grid fields".into()))?;
    let grid = *fields[0].grid();
    if grid.dim() != 1 {
        return Err(Error::Mismatch("the odd reduction lives on a one-dimensional grid".into()));
    }
    let weights = forcing.time_weights()?;
    let rc = r.conjugate()?;
    let denom_t: Vec<f64> = fields.iter().map(|f| radial_norm_3d(f.to_physical().values(), &grid, rc)).collect();
    let denom = l2_time(&denom_t, &weights);
    if denom == 0.0 {
        return Ok(None);
    }
    let line = DispersionParams::new(params.a(), 1)?;
    let out = duhamel_integral(forcing, &line, true)?;
    let num_t: Vec<f64> = out.fields().expect("fields").iter().map(|f| radial_norm_3d(f.values(), &grid, p)).collect();
    Ok(Some(l2_time(&num_t, &weights) / denom))
}

/// Random odd forcing: `sin^2(pi s/T_g)` times a random trigonometric polynomial in `s` for each
/// Gaussian pair `e^{-(x-c)^2/2} - e^{-(x+c)^2/2}`, filtered by `P_0`.
pub fn theorem3_forcing(cfg: &Theorem3Config, seed: u64, trial: usize) -> Result<SpaceTimeSample> {
    use rand::Rng;
    let grid = UniformGrid::new(1, cfg.points, cfg.half_width)?;
    let mut rng = trials::rng(seed ^ (trial as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03));
    let centres: Vec<f64> = (0..cfg.pairs).map(|_| rng.random_range(cfg.centres.0..cfg.centres.1)).collect();
    let coeffs: Vec<Vec<Complex64>> = (0..cfg.pairs).map(|_| trials::complex_gaussians(&mut rng, cfg.time_modes)).collect();
    let shapes: Vec<SpectralField> = centres
        .iter()
        .map(|&c| {
            let f = SpectralField::from_fn(grid, |x| {
                Complex64::new((-(x[0] - c).powi(2) / 2.0).exp() - (-(x[0] + c).powi(2) / 2.0).exp(), 0.0)
            });
            f.apply_radial_symbol(|k| Complex64::new(chi(0, k), 0.0)).into_values()
        })
        .map(|v| SpectralField::from_values(grid, v, Space::Physical))
        .collect::<Result<_>>()?;
    let times = cfg.times();
    let tg = cfg.forcing_duration;
    let fields = times
        .iter()
        .map(|&t| {
            let mut v = vec![Complex64::default(); grid.len()];
            if t < tg {
                let env = (std::f64::consts::PI * t / tg).sin().powi(2);
                for (shape, c) in shapes.iter().zip(&coeffs) {
                    let amp: Complex64 = c
                        .iter()
                        .enumerate()
                        .map(|(q, cq)| cq * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q as f64 * t / tg))
                        .sum::<Complex64>()
                        * env;
                    for (o, s) in v.iter_mut().zip(shape.values()) {
                        *o += amp * s;
                    }
                }
            }
            SpectralField::from_values(grid, v, Space::Physical)
        })
        .collect::<Result<_>>()?;
    Ok(SpaceTimeSample::from_fields(times, fields)?.with_label(format!("forcing-{seed}-{trial}")))
}

fn ensemble(params: &DispersionParams, p: Exponent, r: Exponent, trials: usize, seed: u64, cfg: &Theorem3Config) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(trials);
    for i in 0..trials {
        let g = theorem3_forcing(cfg, seed, i)?;
        if let Some(v) = theorem3_ratio(params, p, r, &g)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Ensemble of [`theorem3_ratio`] over seeded random forcings, with the window-doubling drift
/// when `measure_drift` is set.
pub fn theorem3_scan(
    params: &DispersionParams,
    p: Exponent,
    r: Exponent,
    trials: usize,
    seed: u64,
    cfg: &Theorem3Config,
    measure_drift: bool,
) -> Result<Theorem3Table> {
    if params.d() != 3 {
        return Err(Error::Domain(format!("the radial reduction is implemented for d = 3, got {}", params.d())));
    }
    check_theorem3_exponents(params, p, r)?;
    if !(cfg.window > 0.0 && cfg.dt > 0.0 && cfg.forcing_duration > 0.0 && cfg.forcing_duration <= cfg.window) {
        return Err(Error::InvalidInput("need 0 < forcing_duration <= window and dt > 0".into()));
    }
    if !(0.0 < cfg.centres.0 && cfg.centres.0 < cfg.centres.1) {
        return Err(Error::InvalidInput("centre range must satisfy 0 < lo < hi".into()));
    }
    let speed = params.a() * UNIT_BAND.0.powf(params.a() - 1.0).max(UNIT_BAND.1.powf(params.a() - 1.0));
    if speed * cfg.window + cfg.centres.1 + 10.0 > cfg.half_width {
        return Err(Error::Precondition(format!(
            "half width {} cannot hold the solution up to t = {} without wraparound",
            cfg.half_width, cfg.window
        )));
    }
    let ratios = ensemble(params, p, r, trials, seed, cfg)?;
    let max_ratio = if ratios.is_empty() { 0.0 } else { max_of(&ratios) };
    let window_drift = if measure_drift && !ratios.is_empty() {
        let wide = ensemble(params, p, r, trials, seed, &cfg.doubled())?;
        Some((max_of(&wide) - max_ratio).abs() / max_ratio)
    } else {
        None
    };
    Ok(Theorem3Table { p, r, window: cfg.window, seed, trial_ratios: ratios, max_ratio, window_drift })
}
