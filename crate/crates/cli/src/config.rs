//! Declarative experiment configs.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use strichartz_core::bessel::{MAX_ARG, MAX_ORDER};
use strichartz_core::levy::MAX_RADIUS;
use strichartz_core::norms::Exponent;
use strichartz_core::scans::{check_theorem3_exponents, theorem2_threshold};
use strichartz_core::spectral::UniformGrid;
use strichartz_core::DispersionParams;

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Density,
    CharCheck,
    DispersiveDecay,
    KhatScan,
    ClosedFormK,
    BesselVerify,
    Theorem2Scan,
    Theorem3Scan,
    NlsRun,
    AdmissibleTable,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Density => "density",
            Kind::CharCheck => "char-check",
            Kind::DispersiveDecay => "dispersive-decay",
            Kind::KhatScan => "khat-scan",
            Kind::ClosedFormK => "closed-form-k",
            Kind::BesselVerify => "bessel-verify",
            Kind::Theorem2Scan => "theorem2-scan",
            Kind::Theorem3Scan => "theorem3-scan",
            Kind::NlsRun => "nls-run",
            Kind::AdmissibleTable => "admissible-table",
        }
    }
}

/// Discretization keys; which ones a kind accepts is checked in [`ExperimentConfig::validate`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dr: Option<f64>,
}

impl GridBlock {
    fn is_empty(&self) -> bool {
        self.points.is_none() && self.half_width.is_none() && self.dr.is_none()
    }
}

/// An exponent written as a number or as text (`"inf"`, `"10/3"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ExponentValue {
    pub fn parse(&self, key: &str) -> Result<Exponent, LabError> {
        let text = match self {
            ExponentValue::Int(n) => n.to_string(),
            ExponentValue::Float(x) => format!("{x}"),
            ExponentValue::Text(s) => s.clone(),
        };
        let e = Exponent::from_str(&text).map_err(|e| invalid(key, e.to_string()))?;
        if !e.at_least(2) {
            return Err(invalid(key, format!("{key} = {text} violates the exponent bound {key} >= 2")));
        }
        Ok(e)
    }
}

impl From<Exponent> for ExponentValue {
    fn from(e: Exponent) -> Self {
        ExponentValue::Text(e.to_string())
    }
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityParams {
    pub a: f64,
    pub d: usize,
    #[serde(default = "one")]
    pub t: f64,
    /// Distances from the origin, sampled along the first axis.
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharCheckParams {
    pub a: f64,
    #[serde(default = "one_usize")]
    pub d: usize,
    #[serde(default = "one")]
    pub t: f64,
    /// Frequencies along the first axis.
    pub etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayParams {
    pub a: f64,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KhatParams {
    pub a: f64,
    pub d: usize,
    #[serde(default = "default_widths")]
    pub eps: Vec<f64>,
}

/// `2^-3, ..., 2^-10`.
pub fn default_widths() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormParams {
    pub a: f64,
    pub d: usize,
    pub sigma: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub gamma: f64,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesselParams {
    pub orders: Vec<f64>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Params {
    pub a: f64,
    pub d: usize,
    pub s: f64,
    pub max_degree: usize,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem3Params {
    pub a: f64,
    pub d: usize,
    pub p: ExponentValue,
    pub r: ExponentValue,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlsParams {
    pub a: f64,
    pub d: usize,
    /// Peak of the Gaussian data `amplitude * exp(-|x|^2 / (2 width^2))`.
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width: f64,
    pub dt: f64,
    pub horizon: f64,
    #[serde(default = "one_usize")]
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleParams {
    pub a: f64,
    pub d: usize,
    pub q: Vec<ExponentValue>,
    pub p: Vec<ExponentValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Density(DensityParams),
    CharCheck(CharCheckParams),
    DispersiveDecay(DecayParams),
    KhatScan(KhatParams),
    ClosedFormK(ClosedFormParams),
    BesselVerify(BesselParams),
    Theorem2Scan(Theorem2Params),
    Theorem3Scan(Theorem3Params),
    NlsRun(NlsParams),
    AdmissibleTable(AdmissibleParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default)]
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
    #[serde(default)]
    params: toml::Table,
    #[serde(default, skip_serializing_if = "GridBlock::is_empty")]
    grid: GridBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub id: Option<String>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub params: Params,
    pub grid: GridBlock,
}

pub(crate) fn invalid(key: &str, message: impl Into<String>) -> LabError {
    LabError::Validation { key: key.to_string(), message: message.into() }
}

fn typed<T: DeserializeOwned>(kind: Kind, table: toml::Table) -> Result<T, LabError> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| invalid("params", format!("for kind {}: {}", kind.name(), e.message())))
}

fn table<T: Serialize>(v: &T) -> toml::Table {
    toml::Table::try_from(v).expect("params serialize to a table")
}

impl ExperimentConfig {
    /// Parses and validates a config.
    pub fn from_toml_str(text: &str) -> Result<Self, LabError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| invalid(&error_key(&e), e.message().to_string()))?;
        let k = raw.kind;
        let params = match k {
            Kind::Density => Params::Density(typed(k, raw.params)?),
            Kind::CharCheck => Params::CharCheck(typed(k, raw.params)?),
            Kind::DispersiveDecay => Params::DispersiveDecay(typed(k, raw.params)?),
            Kind::KhatScan => Params::KhatScan(typed(k, raw.params)?),
            Kind::ClosedFormK => Params::ClosedFormK(typed(k, raw.params)?),
            Kind::BesselVerify => Params::BesselVerify(typed(k, raw.params)?),
            Kind::Theorem2Scan => Params::Theorem2Scan(typed(k, raw.params)?),
            Kind::Theorem3Scan => Params::Theorem3Scan(typed(k, raw.params)?),
            Kind::NlsRun => Params::NlsRun(typed(k, raw.params)?),
            Kind::AdmissibleTable => Params::AdmissibleTable(typed(k, raw.params)?),
        };
        let cfg = Self { kind: raw.kind, id: raw.id, seed: raw.seed, output: raw.output, params, grid: raw.grid };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let params = match &self.params {
            Params::Density(p) => table(p),
            Params::CharCheck(p) => table(p),
            Params::DispersiveDecay(p) => table(p),
            Params::KhatScan(p) => table(p),
            Params::ClosedFormK(p) => table(p),
            Params::BesselVerify(p) => table(p),
            Params::Theorem2Scan(p) => table(p),
            Params::Theorem3Scan(p) => table(p),
            Params::NlsRun(p) => table(p),
            Params::AdmissibleTable(p) => table(p),
        };
        let raw = RawConfig {
            kind: self.kind,
            id: self.id.clone(),
            seed: self.seed,
            output: self.output.clone(),
            params,
            grid: self.grid.clone(),
        };
        toml::to_string(&raw).expect("config serializes")
    }

    /// Experiment id written into every row; defaults to the kind name.
    pub fn experiment_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    /// Output path, resolved against `base` when relative; `fallback` when unset.
    pub fn output_path(&self, base: &Path, fallback: &Path) -> PathBuf {
        match &self.output {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => base.join(p),
            None => fallback.to_path_buf(),
        }
    }

    /// Range checks against the owning module's preconditions; runs before any computation.
    pub fn validate(&self) -> Result<(), LabError> {
        self.check_grid_keys()?;
        match &self.params {
            Params::Density(p) => {
                let params = dispersion(p.a, p.d)?;
                stable_index(p.a)?;
                positive("params.t", p.t)?;
                nonempty("params.radii", p.radii.len())?;
                let reach = (36.0 / p.t).powf(1.0 / p.a);
                for &r in &p.radii {
                    if !(r.is_finite() && (0.0..=MAX_RADIUS).contains(&r)) {
                        return Err(invalid("params.radii", format!("radius {r} must lie in [0, {MAX_RADIUS}]")));
                    }
                    if params.d() >= 2 && r * reach > MAX_ARG {
                        return Err(invalid(
                            "params.radii",
                            format!("radius {r} too large for the Hankel cross-check at t = {} (needs r <= {:.3})", p.t, MAX_ARG / reach),
                        ));
                    }
                }
            }
            Params::CharCheck(p) => {
                dispersion(p.a, p.d)?;
                stable_index(p.a)?;
                positive("params.t", p.t)?;
                nonempty("params.etas", p.etas.len())?;
                finite_all("params.etas", &p.etas)?;
            }
            Params::DispersiveDecay(p) => {
                let params = dispersion(p.a, p.d)?;
                if let Some(t) = p.t_min {
                    positive("params.t_min", t)?;
                }
                if let Some(t) = p.t_max {
                    positive("params.t_max", t)?;
                }
                if let (Some(lo), Some(hi)) = (p.t_min, p.t_max) {
                    if hi < lo {
                        return Err(invalid("params.t_max", format!("t_max = {hi} is below t_min = {lo}")));
                    }
                }
                if p.samples == Some(0) {
                    return Err(invalid("params.samples", "need at least one sample time"));
                }
                if let Some(m) = p.margin {
                    positive("params.margin", m)?;
                }
                if params.d() == 1 {
                    let g = self.grid_or(32768, 16384.0);
                    UniformGrid::new(1, g.0, g.1).map_err(|e| invalid("grid.points", e.to_string()))?;
                } else if let Some(dr) = self.grid.dr {
                    positive("grid.dr", dr)?;
                }
            }
            Params::KhatScan(p) => {
                let params = dispersion(p.a, p.d)?;
                if p.d <= params.d_a() || p.d as f64 <= p.a {
                    return Err(invalid("params.d", format!("need d > d_a = {} and d > a = {}", params.d_a(), p.a)));
                }
                nonempty("params.eps", p.eps.len())?;
                for &e in &p.eps {
                    positive("params.eps", e)?;
                }
                let lo = p.eps.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = p.eps.iter().copied().fold(0.0, f64::max);
                if lo != hi && (hi / lo).log2() < 3.0 {
                    return Err(invalid("params.eps", "widths must span at least three octaves"));
                }
            }
            Params::ClosedFormK(p) => {
                dispersion(p.a, p.d)?;
                positive("params.sigma", p.sigma)?;
                let d = p.d as f64;
                let beta = p.a - d - p.alpha;
                if !(p.alpha > -d && beta > -d) {
                    return Err(invalid("params.alpha", format!("alpha = {} and beta = a - d - alpha = {beta} must exceed -d", p.alpha)));
                }
                if !p.gamma.is_finite() {
                    return Err(invalid("params.gamma", "gamma must be finite"));
                }
                nonempty("params.times", p.times.len())?;
                finite_all("params.times", &p.times)?;
            }
            Params::BesselVerify(p) => {
                nonempty("params.orders", p.orders.len())?;
                nonempty("params.radii", p.radii.len())?;
                for &nu in &p.orders {
                    if !(nu.is_finite() && (0.0..=MAX_ORDER - 2.0).contains(&nu)) {
                        return Err(invalid("params.orders", format!("order {nu} must lie in [0, {}]", MAX_ORDER - 2.0)));
                    }
                }
                for &r in &p.radii {
                    if !(r.is_finite() && r > 0.0 && r <= MAX_ARG) {
                        return Err(invalid("params.radii", format!("argument {r} must lie in (0, {MAX_ARG}]")));
                    }
                }
            }
            Params::Theorem2Scan(p) => {
                let params = dispersion(p.a, p.d)?;
                let th = theorem2_threshold(&params)
                    .ok_or_else(|| invalid("params.d", format!("the degree scan needs d >= 3, or d >= 2 with a > 1 (a = {}, d = {})", p.a, p.d)))?;
                if !(p.s.is_finite() && p.s < th) {
                    return Err(invalid("params.s", format!("s = {} must lie below the threshold {th:.6}", p.s)));
                }
                if p.trials == 0 {
                    return Err(invalid("params.trials", "need at least one trial"));
                }
                if (p.d as f64 - 2.0) / 2.0 + p.max_degree as f64 > MAX_ORDER {
                    return Err(invalid("params.max_degree", format!("degree {} exceeds the Bessel order limit", p.max_degree)));
                }
                if let Some(w) = p.window {
                    positive("params.window", w)?;
                }
                if let Some(dt) = p.dt {
                    positive("params.dt", dt)?;
                }
                if p.modes == Some(0) {
                    return Err(invalid("params.modes", "need at least one mode"));
                }
            }
            Params::Theorem3Scan(p) => {
                let params = dispersion(p.a, p.d)?;
                if p.d != 3 {
                    return Err(invalid("params.d", format!("the inhomogeneous scan runs in d = 3, got {}", p.d)));
                }
                let (pe, re) = (p.p.parse("p")?, p.r.parse("r")?);
                check_theorem3_exponents(&params, pe, re).map_err(|e| invalid("params.p", e.to_string()))?;
                if let Some(w) = p.window {
                    positive("params.window", w)?;
                }
                if let Some(dt) = p.dt {
                    positive("params.dt", dt)?;
                }
                let g = self.grid_or(2048, 256.0);
                UniformGrid::new(1, g.0, g.1).map_err(|e| invalid("grid.points", e.to_string()))?;
            }
            Params::NlsRun(p) => {
                let params = dispersion(p.a, p.d)?;
                if !(1..=2).contains(&p.d) {
                    return Err(invalid("params.d", format!("the solver supports d = 1, 2, got {}", p.d)));
                }
                if !p.amplitude.is_finite() {
                    return Err(invalid("params.amplitude", "amplitude must be finite"));
                }
                positive("params.width", p.width)?;
                positive("params.dt", p.dt)?;
                positive("params.horizon", p.horizon)?;
                let ratio = p.horizon / p.dt;
                if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
                    return Err(invalid("params.horizon", format!("horizon {} is not an integer multiple of dt = {}", p.horizon, p.dt)));
                }
                if p.stride == 0 {
                    return Err(invalid("params.stride", "stride must be at least 1"));
                }
                let g = self.grid_or(1024, 64.0);
                let grid = UniformGrid::new(p.d, g.0, g.1).map_err(|e| invalid("grid.points", e.to_string()))?;
                let top = p.dt * grid.max_frequency().powf(params.a());
                if top > std::f64::consts::PI {
                    return Err(invalid("params.dt", format!("dt * max |xi|^a = {top:.3} exceeds pi on this grid")));
                }
            }
            Params::AdmissibleTable(p) => {
                dispersion(p.a, p.d)?;
                nonempty("params.q", p.q.len())?;
                nonempty("params.p", p.p.len())?;
                for q in &p.q {
                    q.parse("q")?;
                }
                for e in &p.p {
                    e.parse("p")?;
                }
            }
        }
        Ok(())
    }

    /// `(points, half_width)` with defaults filled in.
    pub fn grid_or(&self, points: usize, half_width: f64) -> (usize, f64) {
        (self.grid.points.unwrap_or(points), self.grid.half_width.unwrap_or(half_width))
    }

    fn check_grid_keys(&self) -> Result<(), LabError> {
        let allowed: &[&str] = match &self.params {
            Params::DispersiveDecay(p) if p.d == 1 => &["points", "half_width"],
            Params::DispersiveDecay(_) => &["dr"],
            Params::Theorem3Scan(_) | Params::NlsRun(_) => &["points", "half_width"],
            _ => &[],
        };
        let set = [("points", self.grid.points.is_some()), ("half_width", self.grid.half_width.is_some()), ("dr", self.grid.dr.is_some())];
        for (key, present) in set {
            if present && !allowed.contains(&key) {
                return Err(invalid(&format!("grid.{key}"), format!("not used by kind {}", self.kind.name())));
            }
        }
        if let Some(h) = self.grid.half_width {
            positive("grid.half_width", h)?;
        }
        Ok(())
    }
}

fn error_key(e: &toml::de::Error) -> String {
    let msg = e.message();
    if msg.starts_with("unknown variant `") {
        return "kind".to_string();
    }
    ["unknown field `", "missing field `"]
        .iter()
        .find_map(|p| msg.strip_prefix(p))
        .and_then(|rest| rest.split_once('`'))
        .map(|(key, _)| key.to_string())
        .unwrap_or_else(|| "config".to_string())
}

fn dispersion(a: f64, d: usize) -> Result<DispersionParams, LabError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid("params.a", format!("a = {a} must be positive")));
    }
    DispersionParams::new(a, d).map_err(|e| invalid("params.d", e.to_string()))
}

fn stable_index(a: f64) -> Result<(), LabError> {
    if a > 2.0 {
        return Err(invalid("params.a", format!("stability index a = {a} must lie in (0, 2]")));
    }
    Ok(())
}

fn positive(key: &str, v: f64) -> Result<(), LabError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(key, format!("{v} must be positive and finite")));
    }
    Ok(())
}

fn nonempty(key: &str, n: usize) -> Result<(), LabError> {
    if n == 0 {
        return Err(invalid(key, "list must not be empty"));
    }
    Ok(())
}

fn finite_all(key: &str, v: &[f64]) -> Result<(), LabError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(key, "values must be finite"));
    }
    Ok(())
}
