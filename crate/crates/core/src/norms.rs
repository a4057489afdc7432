//! Mixed space–time norms, angular bundles and the exponent admissibility predicates.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::params::DispersionParams;
use crate::radial::{trapezoid_weights, HarmonicIndex};
use crate::spectral::SpectralField;

type Q = Ratio<i64>;

/// A Lebesgue exponent in `[1, inf]`, with infinity kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Q),
    Infinity,
}

impl Exponent {
    pub fn integer(n: i64) -> Self {
        Self::Finite(Q::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("exponent with zero denominator".into()));
        }
        Ok(Self::Finite(Q::new(num, den)))
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(&self) -> Q {
        match self {
            Self::Finite(r) if *r.numer() != 0 => r.recip(),
            Self::Finite(_) => Q::from_integer(i64::MAX),
            Self::Infinity => Q::from_integer(0),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Self::Infinity => f64::INFINITY,
        }
    }

    /// Holder conjugate `p' = p/(p-1)`.
    pub fn conjugate(&self) -> Result<Self> {
        match self {
            Self::Infinity => Ok(Self::integer(1)),
            Self::Finite(r) if *r == Q::from_integer(1) => Ok(Self::Infinity),
            Self::Finite(r) if *r > Q::from_integer(1) => Ok(Self::Finite(r / (r - Q::from_integer(1)))),
            Self::Finite(r) => Err(Error::InvalidInput(format!("no conjugate for exponent {r} < 1"))),
        }
    }

    /// Whether the exponent lies in `[lo, inf]`.
    pub fn at_least(&self, lo: i64) -> bool {
        match self {
            Self::Infinity => true,
            Self::Finite(r) => *r >= Q::from_integer(lo),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => write!(f, "inf"),
            Self::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Self::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, `infinity`, `∞`, integers, fractions `n/m` and finite decimals.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse exponent {s:?}"));
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Self::Infinity),
            _ => {}
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Self::ratio(n, d);
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(frac.len() as u32);
            let part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let num = whole.abs() * scale + part;
            return Self::ratio(if negative { -num } else { num }, scale);
        }
        t.parse::<i64>().map(Self::integer).map_err(|_| bad())
    }
}

/// An exponent pair `(q, p)` for `L_t^q L_x^p` together with `(a, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityQuery {
    pub params: DispersionParams,
    pub q: Exponent,
    pub p: Exponent,
}

impl AdmissibilityQuery {
    pub fn new(params: DispersionParams, q: Exponent, p: Exponent) -> Self {
        Self { params, q, p }
    }
}

fn half() -> Q {
    Q::new(1, 2)
}

/// `1/q <= ((d - d_a + 2)/2)(1/2 - 1/p)` on `[2, inf]^2`, excluding `(2, inf, d_a)`.
pub fn is_admissible(query: &AdmissibilityQuery) -> bool {
    let AdmissibilityQuery { params, q, p } = *query;
    if !q.at_least(2) || !p.at_least(2) {
        return false;
    }
    let d = params.d() as i64;
    let d_a = params.d_a() as i64;
    let slope = Q::new(d - d_a + 2, 2);
    if q.reciprocal() > slope * (half() - p.reciprocal()) {
        return false;
    }
    !(q == Exponent::integer(2) && p.is_infinite() && d == d_a)
}

/// Radial range: `(inf, 2)`, or `1/q < (d - d_a/2 + 1/2)(1/2 - 1/p)`; for `a > 1` equality is
/// allowed except at `(2, (4d-2)/(2d-3))`.
pub fn is_radially_admissible(query: &AdmissibilityQuery) -> bool {
    let AdmissibilityQuery { params, q, p } = *query;
    if !q.at_least(2) || !p.at_least(2) {
        return false;
    }
    if q.is_infinite() && p == Exponent::integer(2) {
        return true;
    }
    let d = params.d() as i64;
    let d_a = params.d_a() as i64;
    let rhs = Q::new(2 * d - d_a + 1, 2) * (half() - p.reciprocal());
    let lhs = q.reciprocal();
    if lhs < rhs {
        return true;
    }
    if lhs == rhs && params.a() > 1.0 {
        let excluded = 2 * d - 3 != 0
            && q == Exponent::integer(2)
            && p == Exponent::Finite(Q::new(4 * d - 2, 2 * d - 3));
        return !excluded;
    }
    false
}

/// `s = (1/2 - 1/p) d - a/q`.
pub fn scaling_regularity(params: &DispersionParams, q: Exponent, p: Exponent) -> f64 {
    let inv = |e: Exponent| match e {
        Exponent::Infinity => 0.0,
        Exponent::Finite(_) => 1.0 / e.to_f64(),
    };
    (0.5 - inv(p)) * params.d() as f64 - params.a() * inv(q)
}

/// Radial coefficient profiles `a_k^l(r)` of a function expanded in spherical harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularBundle {
    dim: usize,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    degrees: Vec<HarmonicIndex>,
    /// `coefficients[i][l][n]` is `a_{k_i}^l(radii[n])`.
    coefficients: Vec<Vec<Vec<Complex64>>>,
}

impl AngularBundle {
    /// `radial_weights` are quadrature weights in `dr` (the `r^{d-1}` factor is applied by the norms).
    pub fn new(
        dim: usize,
        radii: Vec<f64>,
        radial_weights: Vec<f64>,
        degrees: Vec<HarmonicIndex>,
        coefficients: Vec<Vec<Vec<Complex64>>>,
    ) -> Result<Self> {
        if radii.len() != radial_weights.len() {
            return Err(Error::Mismatch(format!("{} radii but {} weights", radii.len(), radial_weights.len())));
        }
        if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidInput("radii must be finite and nonnegative".into()));
        }
        if degrees.len() != coefficients.len() {
            return Err(Error::Mismatch(format!("{} degrees but {} coefficient blocks", degrees.len(), coefficients.len())));
        }
        for (i, idx) in degrees.iter().enumerate() {
            if idx.dimension() != dim {
                return Err(Error::Mismatch(format!("degree index for d = {} in a d = {dim} bundle", idx.dimension())));
            }
            if degrees[..i].iter().any(|o| o.degree() == idx.degree()) {
                return Err(Error::InvalidInput(format!("degree {} listed twice", idx.degree())));
            }
            let block = &coefficients[i];
            if block.len() as u128 > idx.multiplicity() {
                return Err(Error::InvalidInput(format!(
                    "{} components for degree {} exceed n(k) = {}",
                    block.len(),
                    idx.degree(),
                    idx.multiplicity()
                )));
            }
            if block.iter().any(|c| c.len() != radii.len()) {
                return Err(Error::Mismatch(format!("degree {} sampled on a different radial grid", idx.degree())));
            }
        }
        Ok(Self { dim, radii, radial_weights, degrees, coefficients })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn degrees(&self) -> &[HarmonicIndex] {
        &self.degrees
    }

    pub fn coefficients(&self) -> &[Vec<Vec<Complex64>>] {
        &self.coefficients
    }

    /// `||f(r .)||_{L^2(S^{d-1})}` at every radius, by orthonormality of the harmonics.
    pub fn angular_density(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.radii.len()];
        for block in &self.coefficients {
            for comp in block {
                for (s, v) in acc.iter_mut().zip(comp) {
                    *s += v.norm_sqr();
                }
            }
        }
        acc.into_iter().map(f64::sqrt).collect()
    }

    /// `|| ||f(r .)||_{L^2_omega} ||_{L^p(r^{d-1} dr)}`.
    pub fn radial_norm(&self, p: Exponent) -> f64 {
        let dens = self.angular_density();
        match p {
            Exponent::Infinity => dens.into_iter().fold(0.0, f64::max),
            Exponent::Finite(_) => {
                let pf = p.to_f64();
                let k = self.dim as i32 - 1;
                let sum: f64 = dens
                    .iter()
                    .zip(&self.radii)
                    .zip(&self.radial_weights)
                    .map(|((v, r), w)| w * r.powi(k) * v.powf(pf))
                    .sum();
                sum.powf(1.0 / pf)
            }
        }
    }

    fn same_radial_grid(&self, other: &Self) -> bool {
        self.dim == other.dim && self.radii == other.radii && self.radial_weights == other.radial_weights
    }
}

/// Multiplies every degree-`k` coefficient by `(1 + k)^s`.
pub fn angular_smooth(bundle: &AngularBundle, s: f64) -> AngularBundle {
    let mut out = bundle.clone();
    for (idx, block) in out.degrees.iter().zip(out.coefficients.iter_mut()) {
        let w = (1.0 + idx.degree() as f64).powf(s);
        for comp in block.iter_mut() {
            for v in comp.iter_mut() {
                *v *= w;
            }
        }
    }
    out
}

/// Per-time data of a [`SpaceTimeSample`].
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Fields(Vec<SpectralField>),
    Bundles(Vec<AngularBundle>),
}

impl Payload {
    fn len(&self) -> usize {
        match self {
            Self::Fields(v) => v.len(),
            Self::Bundles(v) => v.len(),
        }
    }
}

/// A function of time sampled at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSample {
    times: Vec<f64>,
    weights: Option<Vec<f64>>,
    payload: Payload,
    label: String,
}

impl SpaceTimeSample {
    pub fn new(times: Vec<f64>, payload: Payload) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidInput("a sample needs at least one time".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("times must be finite and strictly increasing".into()));
        }
        if payload.len() != times.len() {
            return Err(Error::Mismatch(format!("{} times but {} payloads", times.len(), payload.len())));
        }
        match &payload {
            Payload::Fields(f) => {
                if f.iter().any(|x| x.grid() != f[0].grid()) {
                    return Err(Error::Mismatch("fields on different grids".into()));
                }
            }
            Payload::Bundles(b) => {
                if b.iter().any(|x| !x.same_radial_grid(&b[0])) {
                    return Err(Error::Mismatch("bundles on different radial grids".into()));
                }
            }
        }
        Ok(Self { times, weights: None, payload, label: String::new() })
    }

    pub fn from_fields(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        Self::new(times, Payload::Fields(fields))
    }

    pub fn from_bundles(times: Vec<f64>, bundles: Vec<AngularBundle>) -> Result<Self> {
        Self::new(times, Payload::Bundles(bundles))
    }

    /// Explicit time-quadrature weights, which lift the uniform-spacing requirement.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.times.len() {
            return Err(Error::Mismatch(format!("{} weights for {} times", weights.len(), self.times.len())));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("time weights must be finite and nonnegative".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Free-form tag naming the experiment that produced the sample.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn fields(&self) -> Option<&[SpectralField]> {
        match &self.payload {
            Payload::Fields(f) => Some(f),
            Payload::Bundles(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Uniform spacing, if the times are uniform to `1e-9` relative.
    pub fn uniform_step(&self) -> Result<Option<f64>> {
        if self.times.len() < 2 {
            return Ok(None);
        }
        let h = self.times[1] - self.times[0];
        let span = self.times[self.times.len() - 1] - self.times[0];
        let n = (self.times.len() - 1) as f64;
        let ok = self
            .times
            .iter()
            .enumerate()
            .all(|(i, t)| (t - (self.times[0] + i as f64 * h)).abs() <= 1e-9 * span.max(1.0) && (span / n - h).abs() <= 1e-9 * h);
        if ok {
            Ok(Some(h))
        } else {
            Err(Error::NonUniformTimes)
        }
    }

    /// Time-quadrature weights: explicit ones, else the trapezoid rule on uniform times.
    /// A single sample time is a unit point mass.
    pub fn time_weights(&self) -> Result<Vec<f64>> {
        if let Some(w) = &self.weights {
            return Ok(w.clone());
        }
        if self.times.len() == 1 {
            return Ok(vec![1.0]);
        }
        self.uniform_step()?;
        Ok(trapezoid_weights(&self.times))
    }
}

fn time_norm(values: &[f64], weights: &[f64], q: Exponent) -> f64 {
    match q {
        Exponent::Infinity => values.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let qf = q.to_f64();
            let s: f64 = values.iter().zip(weights).map(|(v, w)| w * v.powf(qf)).sum();
            s.powf(1.0 / qf)
        }
    }
}

fn check_exponent(e: Exponent, name: &str) -> Result<()> {
    if !e.at_least(1) {
        return Err(Error::InvalidInput(format!("exponent {name} = {e} is below 1")));
    }
    Ok(())
}

/// `|| ||u(t)||_{L_x^p} ||_{L_t^q}` with the trapezoid rule in time.
pub fn mixed_norm(sample: &SpaceTimeSample, q: Exponent, p: Exponent) -> Result<f64> {
    check_exponent(q, "q")?;
    check_exponent(p, "p")?;
    let fields = sample
        .fields()
        .ok_or_else(|| Error::Precondition("mixed_norm needs full-grid fields; use spherical_mixed_norm".into()))?;
    let weights = sample.time_weights()?;
    let pf = p.to_f64();
    let spatial: Vec<f64> = fields.iter().map(|f| f.lp_norm(pf)).collect();
    Ok(time_norm(&spatial, &weights, q))
}

/// `L_t^q L^p(r^{d-1} dr) L^2_omega` of a bundle-valued sample.
pub fn spherical_mixed_norm(sample: &SpaceTimeSample, q: Exponent, p: Exponent) -> Result<f64> {
    check_exponent(q, "q")?;
    check_exponent(p, "p")?;
    let bundles = match sample.payload() {
        Payload::Bundles(b) => b,
        Payload::Fields(_) => return Err(Error::Precondition("spherical_mixed_norm needs angular bundles".into())),
    };
    let weights = sample.time_weights()?;
    let radial: Vec<f64> = bundles.iter().map(|b| b.radial_norm(p)).collect();
    Ok(time_norm(&radial, &weights, q))
}
