//! Periodic uniform grids on `[-L, L)^dim`, their Fourier transform, and radial multipliers.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::cutoff::{chi, chi_low, CutoffBank};
use crate::error::{Error, Result};
use crate::params::DispersionParams;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized in-place DFT along every axis of a row-major `n^dim` array.
pub(crate) fn fft_nd(values: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(values, &mut scratch);
            continue;
        }
        let block = stride * n;
        for b in 0..values.len() / block {
            for inner in 0..stride {
                let base = b * block + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    values[base + j * stride] = *v;
                }
            }
        }
    }
}

/// Uniform periodic grid with `n` points per axis on `[-L, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl UniformGrid {
    pub fn new(dim: usize, points_per_axis: usize, half_width: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("grid dimension {dim} outside 1..=3")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "points per axis {points_per_axis} must be a power of two and at least 8"
            )));
        }
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::InvalidInput(format!("half width {half_width} must be positive")));
        }
        Ok(Self { dim, n: points_per_axis, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Frequency spacing `pi / L`.
    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    /// Axis Nyquist frequency `n pi / (2 L)`.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 * PI / (2.0 * self.half_width)
    }

    /// Largest `|xi|` on the grid (corner of the frequency cube).
    pub fn max_frequency(&self) -> f64 {
        self.nyquist() * (self.dim as f64).sqrt()
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + self.dx() * j as f64
    }

    /// Signed wavenumber of DFT index `m`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let signed = if m < self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
        signed * self.dxi()
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rem % self.n;
            rem /= self.n;
        }
        idx
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    pub fn position_radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|f| {
                let x = self.position(f);
                x[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect()
    }

    /// `|xi|` for every DFT index in row-major order.
    pub fn frequency_magnitudes(&self) -> Vec<f64> {
        let k: Vec<f64> = (0..self.n).map(|m| self.wavenumber(m)).collect();
        (0..self.len())
            .map(|f| {
                let idx = self.multi_index(f);
                idx[..self.dim].iter().map(|&m| k[m] * k[m]).sum::<f64>().sqrt()
            })
            .collect()
    }

    /// Same domain with twice the points per axis.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }

    fn parity(&self, flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        if idx[..self.dim].iter().sum::<usize>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Frequency,
}

/// Complex samples on a [`UniformGrid`], either as point values or as continuous Fourier
/// transform samples `f^(xi_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: UniformGrid,
    values: Vec<Complex64>,
    space: Space,
}

impl SpectralField {
    pub fn zeros(grid: UniformGrid) -> Self {
        Self { grid, values: vec![Complex64::default(); grid.len()], space: Space::Physical }
    }

    pub fn from_values(grid: UniformGrid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, space })
    }

    /// Samples `f` at the grid points; `f` receives a slice of length `dim`.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: UniformGrid, f: F) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                f(&x[..grid.dim])
            })
            .collect();
        Self { grid, values, space: Space::Physical }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput("field contains non-finite samples".into()))
        }
    }

    pub fn to_frequency(&self) -> Self {
        match self.space {
            Space::Frequency => self.clone(),
            Space::Physical => {
                let mut v = self.values.clone();
                fft_nd(&mut v, self.grid.dim, self.grid.n, false);
                let c = self.grid.cell_volume();
                for (i, x) in v.iter_mut().enumerate() {
                    *x *= c * self.grid.parity(i);
                }
                Self { grid: self.grid, values: v, space: Space::Frequency }
            }
        }
    }

    pub fn to_physical(&self) -> Self {
        match self.space {
            Space::Physical => self.clone(),
            Space::Frequency => {
                let c = 1.0 / (self.grid.len() as f64 * self.grid.cell_volume());
                let mut v: Vec<Complex64> =
                    self.values.iter().enumerate().map(|(i, x)| x * (c * self.grid.parity(i))).collect();
                fft_nd(&mut v, self.grid.dim, self.grid.n, true);
                Self { grid: self.grid, values: v, space: Space::Physical }
            }
        }
    }

    /// `L^2` norm; in frequency space carries the `(2 pi)^{-dim/2}` Plancherel factor.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        match self.space {
            Space::Physical => (sum * self.grid.cell_volume()).sqrt(),
            Space::Frequency => {
                let d = self.grid.dim as i32;
                (sum * self.grid.dxi().powi(d)).sqrt() / (2.0 * PI).powf(d as f64 / 2.0)
            }
        }
    }

    /// Grid maximum of `|f|` in physical space.
    pub fn linf_norm(&self) -> f64 {
        let phys = self.physical_values();
        phys.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete `L^p` norm in physical space; `p = inf` gives the grid maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf_norm();
        }
        let phys = self.physical_values();
        let sum: f64 = phys.iter().map(|v| v.norm().powf(p)).sum();
        (sum * self.grid.cell_volume()).powf(1.0 / p)
    }

    fn physical_values(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.space {
            Space::Physical => std::borrow::Cow::Borrowed(&self.values),
            Space::Frequency => std::borrow::Cow::Owned(self.to_physical().values),
        }
    }

    /// Applies the radial multiplier `m(|xi|)`, keeping the current representation.
    pub fn apply_radial_symbol<M: Fn(f64) -> Complex64>(&self, symbol: M) -> Self {
        let mags = self.grid.frequency_magnitudes();
        match self.space {
            Space::Frequency => {
                let values = self.values.iter().zip(&mags).map(|(v, &k)| v * symbol(k)).collect();
                Self { grid: self.grid, values, space: Space::Frequency }
            }
            Space::Physical => {
                let mut v = self.values.clone();
                fft_nd(&mut v, self.grid.dim, self.grid.n, false);
                let c = 1.0 / self.grid.len() as f64;
                for (x, &k) in v.iter_mut().zip(&mags) {
                    *x *= symbol(k) * c;
                }
                fft_nd(&mut v, self.grid.dim, self.grid.n, true);
                Self { grid: self.grid, values: v, space: Space::Physical }
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect(), space: self.space }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, values, space: self.space })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, values, space: self.space })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.space != other.space {
            return Err(Error::Mismatch("fields live on different grids or representations".into()));
        }
        Ok(())
    }
}

/// Precomputed diagonal multiplier for repeated application on one grid.
#[derive(Debug, Clone)]
pub struct Multiplier {
    grid: UniformGrid,
    symbol: Vec<Complex64>,
}

impl Multiplier {
    pub fn radial<M: Fn(f64) -> Complex64>(grid: UniformGrid, symbol: M) -> Self {
        let symbol = grid.frequency_magnitudes().into_iter().map(symbol).collect();
        Self { grid, symbol }
    }

    /// `e^{i t |xi|^a}` sampled on the grid.
    pub fn propagator(grid: UniformGrid, t: f64, a: f64) -> Self {
        Self::radial(grid, |k| Complex64::from_polar(1.0, t * dispersion(k, a)))
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Applies the multiplier to physical samples in place.
    pub fn apply_in_place(&self, values: &mut [Complex64]) {
        assert_eq!(values.len(), self.symbol.len(), "multiplier applied on a foreign grid");
        fft_nd(values, self.grid.dim, self.grid.n, false);
        let c = 1.0 / self.grid.len() as f64;
        for (x, s) in values.iter_mut().zip(&self.symbol) {
            *x *= s * c;
        }
        fft_nd(values, self.grid.dim, self.grid.n, true);
    }
}

/// `|xi|^a`, with the value 0 at the origin.
pub fn dispersion(k: f64, a: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k.powf(a)
    }
}

/// `e^{i t D^a} f`.
pub fn propagate(f: &SpectralField, t: f64, params: &DispersionParams) -> Result<SpectralField> {
    f.ensure_finite()?;
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("propagation time {t} is not finite")));
    }
    let a = params.a();
    Ok(f.apply_radial_symbol(|k| Complex64::from_polar(1.0, t * dispersion(k, a))))
}

fn zero_mode_vanishes(f: &SpectralField) -> bool {
    let sum: Complex64 = f.to_frequency().values()[0];
    let scale: f64 = match f.space() {
        Space::Physical => f.values().iter().map(|v| v.norm()).sum::<f64>() * f.grid().cell_volume(),
        Space::Frequency => f.values().iter().map(|v| v.norm()).fold(0.0, f64::max),
    };
    sum.norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE)
}

/// `D^s f` (homogeneous) or `<D>^s f` (inhomogeneous).
pub fn fractional_derivative(f: &SpectralField, s: f64, inhomogeneous: bool) -> Result<SpectralField> {
    f.ensure_finite()?;
    if inhomogeneous {
        return Ok(f.apply_radial_symbol(|k| Complex64::new((1.0 + k * k).powf(s / 2.0), 0.0)));
    }
    if s < 0.0 && !zero_mode_vanishes(f) {
        return Err(Error::SingularSymbol { order: s });
    }
    Ok(f.apply_radial_symbol(|k| {
        if k == 0.0 {
            if s == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        } else {
            Complex64::new(k.powf(s), 0.0)
        }
    }))
}

/// `||D^s f||_2` or `||<D>^s f||_2`, evaluated on Fourier samples.
pub fn sobolev_norm(f: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    f.ensure_finite()?;
    let fh = f.to_frequency();
    if homogeneous && s < 0.0 && !zero_mode_vanishes(f) {
        return Err(Error::SingularSymbol { order: s });
    }
    let mags = f.grid().frequency_magnitudes();
    let sum: f64 = fh
        .values()
        .iter()
        .zip(&mags)
        .map(|(v, &k)| {
            let w = if homogeneous {
                if k == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    k.powf(2.0 * s)
                }
            } else {
                (1.0 + k * k).powf(s)
            };
            w * v.norm_sqr()
        })
        .sum();
    let d = f.grid().dim() as i32;
    Ok((sum * f.grid().dxi().powi(d)).sqrt() / (2.0 * PI).powf(d as f64 / 2.0))
}

fn check_band(grid: &UniformGrid, k: i32) -> Result<()> {
    let inner = crate::cutoff::band_edges(k).0;
    if inner >= grid.max_frequency() {
        return Err(Error::Resolution(format!(
            "band {k} starts at |xi| = {inner} beyond the grid's largest frequency {}",
            grid.max_frequency()
        )));
    }
    Ok(())
}

/// Littlewood–Paley piece `P_k f` with symbol `chi_k`.
pub fn lp_project(f: &SpectralField, k: i32, bank: &CutoffBank) -> Result<SpectralField> {
    if k < bank.k_min || k > bank.k_max {
        return Err(Error::InvalidInput(format!(
            "band {k} outside the bank range {}..={}",
            bank.k_min, bank.k_max
        )));
    }
    check_band(f.grid(), k)?;
    Ok(f.apply_radial_symbol(|x| Complex64::new(chi(k, x), 0.0)))
}

/// Low-frequency piece `P_{<= k} f` with symbol `eta(xi / 2^k)`.
pub fn lp_low(f: &SpectralField, k: i32, _bank: &CutoffBank) -> Result<SpectralField> {
    Ok(f.apply_radial_symbol(|x| Complex64::new(chi_low(k, x), 0.0)))
}
