//! Retarded Duhamel integrals and a split-step solver for `i u_t + D^a u = |u|^2 u`.

use num_complex::Complex64;

use crate::cutoff::chi;
use crate::error::{Error, Result};
use crate::norms::SpaceTimeSample;
use crate::params::DispersionParams;
use crate::radial::trapezoid_weights;
use crate::spectral::{dispersion, propagate, sobolev_norm, Multiplier, SpectralField, Space, UniformGrid};

/// Default ceiling on `sup |phi|` accepted by [`picard_iterate`].
pub const DEFAULT_SUP_SAFEGUARD: f64 = 0.5;

/// Sup norms beyond this are treated as blowup.
const BLOWUP_LEVEL: f64 = 1e150;

fn check_grid_dim(grid: &UniformGrid, params: &DispersionParams) -> Result<()> {
    if grid.dim() != params.d() {
        return Err(Error::Mismatch(format!("grid of dimension {} for d = {}", grid.dim(), params.d())));
    }
    Ok(())
}

/// `u(t_n) = int_{t_0}^{t_n} e^{i (t_n - s) D^a} g(s) ds` by the trapezoid rule on the sample times.
///
/// With `localize`, `g` is replaced by `P_0 g` (symbol `chi_0`). Output fields are in physical space.
pub fn duhamel_integral(g: &SpaceTimeSample, params: &DispersionParams, localize: bool) -> Result<SpaceTimeSample> {
    let fields = g.fields().ok_or_else(|| Error::Precondition("Duhamel integration needs full-grid fields".into()))?;
    let grid = *fields[0].grid();
    check_grid_dim(&grid, params)?;
    let h = g.uniform_step()?;
    let zero = SpectralField::zeros(grid);
    let Some(h) = h else {
        return SpaceTimeSample::from_fields(g.times().to_vec(), vec![zero]);
    };
    for f in fields {
        f.ensure_finite()?;
    }
    let a = params.a();
    let mags = grid.frequency_magnitudes();
    let phase: Vec<Complex64> = mags.iter().map(|&k| Complex64::from_polar(1.0, h * dispersion(k, a))).collect();
    let cut: Option<Vec<f64>> = localize.then(|| mags.iter().map(|&k| chi(0, k)).collect());
    let spectrum = |f: &SpectralField| -> Vec<Complex64> {
        let mut v = f.to_frequency().into_values();
        if let Some(c) = &cut {
            for (x, w) in v.iter_mut().zip(c) {
                *x *= *w;
            }
        }
        v
    };

    let mut out = Vec::with_capacity(fields.len());
    out.push(zero);
    let mut w = vec![Complex64::default(); grid.len()];
    let mut prev = spectrum(&fields[0]);
    for f in &fields[1..] {
        let cur = spectrum(f);
        for i in 0..w.len() {
            w[i] = phase[i] * (w[i] + prev[i] * (h / 2.0)) + cur[i] * (h / 2.0);
        }
        out.push(SpectralField::from_values(grid, w.clone(), Space::Frequency)?.to_physical());
        prev = cur;
    }
    Ok(SpaceTimeSample::from_fields(g.times().to_vec(), out)?.with_label(format!("duhamel[{}]", g.label())))
}

/// Run parameters for the cubic equation.
#[derive(Debug, Clone, PartialEq)]
pub struct NlsConfig {
    params: DispersionParams,
    grid: UniformGrid,
    dt: f64,
    steps: usize,
    initial: SpectralField,
    trace_stride: usize,
    sup_safeguard: f64,
}

impl NlsConfig {
    pub fn new(params: DispersionParams, initial: SpectralField, dt: f64, horizon: f64) -> Result<Self> {
        if !(1..=2).contains(&params.d()) {
            return Err(Error::Domain(format!("the solver supports d = 1, 2, got {}", params.d())));
        }
        let grid = *initial.grid();
        check_grid_dim(&grid, &params)?;
        initial.ensure_finite()?;
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidInput(format!("time step {dt} must be positive")));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidInput(format!("horizon {horizon} must be positive")));
        }
        let top = dt * dispersion(grid.max_frequency(), params.a());
        if top > std::f64::consts::PI {
            return Err(Error::Resolution(format!("dt * max |xi|^a = {top:.3} exceeds pi")));
        }
        let ratio = horizon / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 1.0 {
            return Err(Error::InvalidInput(format!("horizon {horizon} is not an integer multiple of dt = {dt}")));
        }
        Ok(Self {
            params,
            grid,
            dt,
            steps: steps as usize,
            initial: initial.to_physical(),
            trace_stride: 1,
            sup_safeguard: DEFAULT_SUP_SAFEGUARD,
        })
    }

    /// Record every `stride`-th step in the trace (the last step is always recorded).
    pub fn with_trace_stride(mut self, stride: usize) -> Self {
        self.trace_stride = stride.max(1);
        self
    }

    pub fn with_sup_safeguard(mut self, level: f64) -> Self {
        self.sup_safeguard = level;
        self
    }

    /// Same run with different initial data on the same grid.
    pub fn with_initial(&self, initial: SpectralField) -> Result<Self> {
        if *initial.grid() != self.grid {
            return Err(Error::Mismatch("initial data on a different grid".into()));
        }
        initial.ensure_finite()?;
        Ok(Self { initial: initial.to_physical(), ..self.clone() })
    }

    pub fn params(&self) -> &DispersionParams {
        &self.params
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn initial(&self) -> &SpectralField {
        &self.initial
    }

    pub fn trace_stride(&self) -> usize {
        self.trace_stride
    }

    pub fn sup_safeguard(&self) -> f64 {
        self.sup_safeguard
    }

    /// For `d = 2`: whether the initial data is invariant under the grid's axis swaps and
    /// reflections. Always true in `d = 1`.
    pub fn looks_radial(&self) -> bool {
        if self.grid.dim() == 1 {
            return true;
        }
        let n = self.grid.points_per_axis();
        let v = self.initial.values();
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        // index 0 has no mirror partner on the periodic grid
        (1..n).all(|i| {
            (1..n).all(|j| {
                let here = v[i * n + j];
                let swap = v[j * n + i];
                let flip = v[(n - i) * n + j];
                (here - swap).norm() <= 1e-10 * scale && (here - flip).norm() <= 1e-10 * scale
            })
        })
    }
}

/// Strang splitting with a cached half-step propagator.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    half: Multiplier,
    dt: f64,
}

impl SplitStepper {
    pub fn new(grid: UniformGrid, dt: f64, params: &DispersionParams) -> Self {
        Self { half: Multiplier::propagator(grid, dt / 2.0, params.a()), dt }
    }

    /// One step on physical samples: half linear, full nonlinear phase, half linear.
    pub fn step(&self, values: &mut [Complex64]) {
        self.half.apply_in_place(values);
        for v in values.iter_mut() {
            *v *= Complex64::from_polar(1.0, -self.dt * v.norm_sqr());
        }
        self.half.apply_in_place(values);
    }
}

fn sup(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn mass(values: &[Complex64], grid: &UniformGrid) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume()
}

fn blown_up(s: f64) -> bool {
    !s.is_finite() || s > BLOWUP_LEVEL
}

/// One Strang step of size `dt` (negative `dt` steps backwards).
pub fn nls_step(u: &SpectralField, dt: f64, params: &DispersionParams) -> Result<SpectralField> {
    check_grid_dim(u.grid(), params)?;
    u.ensure_finite()?;
    if !dt.is_finite() {
        return Err(Error::InvalidInput(format!("time step {dt} is not finite")));
    }
    let mut v = u.to_physical().into_values();
    SplitStepper::new(*u.grid(), dt, params).step(&mut v);
    if blown_up(sup(&v)) {
        return Err(Error::Blowup { step: 1 });
    }
    SpectralField::from_values(*u.grid(), v, Space::Physical)
}

/// Recorded trajectory of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrace {
    pub params: DispersionParams,
    pub dt: f64,
    /// Recorded times.
    pub times: Vec<f64>,
    /// Physical-space fields at the recorded times.
    pub fields: Vec<SpectralField>,
    /// `||u(t_n)||_2^2` at every step, starting with the data.
    pub mass: Vec<f64>,
    /// `sup |u(t_n)|` at every step, starting with the data.
    pub sup_norm: Vec<f64>,
    /// `||u||_{H^{s_c}}` (inhomogeneous) at the recorded times.
    pub critical_norm: Vec<f64>,
}

impl SolutionTrace {
    /// Largest `|m_n - m_0| / m_0`; zero for zero data.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        if m0 == 0.0 {
            return 0.0;
        }
        self.mass.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max)
    }

    pub fn final_field(&self) -> &SpectralField {
        self.fields.last().expect("trace has at least the initial time")
    }
}

fn critical(f: &SpectralField, params: &DispersionParams) -> Result<f64> {
    sobolev_norm(f, critical_regularity(params), false)
}

/// Runs the split-step solver over the configured horizon.
pub fn nls_run(config: &NlsConfig) -> Result<SolutionTrace> {
    let grid = config.grid;
    let stepper = SplitStepper::new(grid, config.dt, &config.params);
    let mut v = config.initial.values().to_vec();
    let mut trace = SolutionTrace {
        params: config.params,
        dt: config.dt,
        times: vec![0.0],
        fields: vec![config.initial.clone()],
        mass: vec![mass(&v, &grid)],
        sup_norm: vec![sup(&v)],
        critical_norm: vec![critical(&config.initial, &config.params)?],
    };
    for n in 1..=config.steps {
        stepper.step(&mut v);
        let s = sup(&v);
        if blown_up(s) {
            return Err(Error::Blowup { step: n });
        }
        trace.mass.push(mass(&v, &grid));
        trace.sup_norm.push(s);
        if n % config.trace_stride == 0 || n == config.steps {
            let f = SpectralField::from_values(grid, v.clone(), Space::Physical)?;
            trace.critical_norm.push(critical(&f, &config.params)?);
            trace.times.push(n as f64 * config.dt);
            trace.fields.push(f);
        }
    }
    Ok(trace)
}

/// Final Picard iterate and the residual history.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome {
    pub trace: SolutionTrace,
    /// `residuals[n]` is the space–time `L^2` size of `u^{n+1} - u^n`.
    pub residuals: Vec<f64>,
}

impl PicardOutcome {
    /// Successive residual ratios `r_{n+1} / r_n`, skipping pairs already at roundoff level
    /// (below `1e-12` times the first residual).
    pub fn contraction_ratios(&self) -> Vec<f64> {
        let floor = self.residuals.first().copied().unwrap_or(0.0) * 1e-12;
        self.residuals
            .windows(2)
            .filter(|w| w[1] > floor && w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

fn space_time_l2(diffs: &[f64], weights: &[f64]) -> f64 {
    diffs.iter().zip(weights).map(|(d, w)| w * d * d).sum::<f64>().sqrt()
}

/// Fixed-point iteration `u <- e^{itD^a} phi - i int_0^t e^{i(t-s)D^a} |u|^2 u ds` on the
/// uniform step grid of `config` (the config's own data is ignored in favour of `phi`).
pub fn picard_iterate(phi: &SpectralField, config: &NlsConfig, iterations: usize) -> Result<PicardOutcome> {
    let config = config.with_initial(phi.clone())?;
    let params = config.params;
    let grid = config.grid;
    let s0 = sup(config.initial.values());
    if s0 > config.sup_safeguard {
        return Err(Error::Precondition(format!(
            "sup |phi| = {s0:.3e} exceeds the small-data safeguard {:.3e}",
            config.sup_safeguard
        )));
    }
    let times: Vec<f64> = (0..=config.steps).map(|n| n as f64 * config.dt).collect();
    let weights = trapezoid_weights(&times);
    let free: Vec<SpectralField> = times
        .iter()
        .map(|&t| propagate(&config.initial, t, &params).map(|f| f.to_physical()))
        .collect::<Result<_>>()?;
    let mut u = free.clone();
    let mut residuals = Vec::with_capacity(iterations);
    let mut growth = 0;
    for it in 0..iterations {
        let cubic: Vec<SpectralField> = u
            .iter()
            .map(|f| {
                let v = f.values().iter().map(|z| z * z.norm_sqr()).collect();
                SpectralField::from_values(grid, v, Space::Physical)
            })
            .collect::<Result<_>>()?;
        let duhamel = duhamel_integral(&SpaceTimeSample::from_fields(times.clone(), cubic)?, &params, false)?;
        let next: Vec<SpectralField> = free
            .iter()
            .zip(duhamel.fields().expect("fields in, fields out"))
            .map(|(f, d)| f.sub(&d.scaled(Complex64::new(0.0, 1.0))))
            .collect::<Result<_>>()?;
        let diffs: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a.sub(b).map(|d| d.l2_norm())).collect::<Result<_>>()?;
        let r = space_time_l2(&diffs, &weights);
        if !r.is_finite() {
            return Err(Error::Blowup { step: it + 1 });
        }
        if residuals.last().is_some_and(|&prev| r > prev) {
            growth += 1;
            if growth >= 3 {
                return Err(Error::ContractionFailure { iteration: it + 1 });
            }
        } else {
            growth = 0;
        }
        residuals.push(r);
        u = next;
    }
    let mut trace = SolutionTrace {
        params,
        dt: config.dt,
        times: times.clone(),
        fields: Vec::with_capacity(u.len()),
        mass: Vec::with_capacity(u.len()),
        sup_norm: Vec::with_capacity(u.len()),
        critical_norm: Vec::with_capacity(u.len()),
    };
    for f in u {
        trace.mass.push(mass(f.values(), &grid));
        trace.sup_norm.push(sup(f.values()));
        trace.critical_norm.push(critical(&f, &params)?);
        trace.fields.push(f);
    }
    Ok(PicardOutcome { trace, residuals })
}

/// Pulled-back profiles `v(t) = e^{-itD^a} u(t)` and their pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringReport {
    pub times: Vec<f64>,
    pub profiles: Vec<SpectralField>,
    /// `distances[m][n] = ||v(t_m) - v(t_n)||_{H^{s_c}}` (inhomogeneous).
    pub distances: Vec<Vec<f64>>,
}

/// Cauchy diameters of the profile over the middle and final quarters of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringDiagnosis {
    /// Largest distance among times in `[T/2, 3T/4]`.
    pub middle: f64,
    /// Largest distance among times in `[3T/4, T]`.
    pub last: f64,
    /// `last <= middle` and `last <= tol`.
    pub settled: bool,
}

impl ScatteringReport {
    fn diameter(&self, lo: f64, hi: f64) -> f64 {
        let eps = 1e-9 * hi.abs().max(1.0);
        let idx: Vec<usize> = (0..self.times.len()).filter(|&i| self.times[i] >= lo - eps && self.times[i] <= hi + eps).collect();
        let mut best = 0.0f64;
        for &m in &idx {
            for &n in &idx {
                best = best.max(self.distances[m][n]);
            }
        }
        best
    }

    pub fn diagnose(&self, tol: f64) -> ScatteringDiagnosis {
        let t = *self.times.last().expect("nonempty report");
        let middle = self.diameter(t / 2.0, 0.75 * t);
        let last = self.diameter(0.75 * t, t);
        ScatteringDiagnosis { middle, last, settled: last <= middle && last <= tol }
    }
}

/// Profiles `e^{-itD^a} u(t)` at the recorded times and their `H^{s_c}` distance matrix.
pub fn scattering_profile(trace: &SolutionTrace, params: &DispersionParams) -> Result<ScatteringReport> {
    let profiles: Vec<SpectralField> = trace
        .times
        .iter()
        .zip(&trace.fields)
        .map(|(&t, f)| propagate(f, -t, params))
        .collect::<Result<_>>()?;
    let s = critical_regularity(params);
    let n = profiles.len();
    let mut distances = vec![vec![0.0; n]; n];
    for m in 0..n {
        for k in m + 1..n {
            let d = sobolev_norm(&profiles[m].sub(&profiles[k])?, s, false)?;
            distances[m][k] = d;
            distances[k][m] = d;
        }
    }
    Ok(ScatteringReport { times: trace.times.clone(), profiles, distances })
}

/// `s_c = (d - a)/2`.
pub fn critical_regularity(params: &DispersionParams) -> f64 {
    params.s_c()
}

/// Outcome of the small-data ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Multiplier applied to the reference profile.
    pub amplitude: f64,
    /// `||amplitude * profile||_{H^{s_c}}`.
    pub critical_norm: f64,
    pub sup_norm: f64,
    pub ratios: Vec<f64>,
}

/// Largest amplitude `top * 2^{-j}`, `j < rungs`, for which six Picard iterations on
/// `amplitude * profile` contract with every residual ratio at most 1/2.
pub fn calibrate_small_data(config: &NlsConfig, profile: &SpectralField, top: f64, rungs: usize) -> Result<Calibration> {
    let open = config.clone().with_sup_safeguard(f64::INFINITY);
    for j in 0..rungs {
        let amplitude = top * 0.5f64.powi(j as i32);
        let phi = profile.scaled(Complex64::new(amplitude, 0.0));
        let outcome = match picard_iterate(&phi, &open, 6) {
            Ok(o) => o,
            Err(Error::ContractionFailure { .. }) | Err(Error::Blowup { .. }) => continue,
            Err(e) => return Err(e),
        };
        let ratios = outcome.contraction_ratios();
        if ratios.iter().all(|&r| r <= 0.5) {
            return Ok(Calibration {
                amplitude,
                critical_norm: critical(&phi, &config.params)?,
                sup_norm: sup(phi.to_physical().values()),
                ratios,
            });
        }
    }
    Err(Error::ContractionFailure { iteration: 6 })
}
