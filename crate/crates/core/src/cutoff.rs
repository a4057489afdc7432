//! The smooth cutoff `eta` and the dyadic annuli `chi_k` built from it.

use std::sync::OnceLock;

use crate::quad::gauss_legendre;

/// `eta = 1` on `|xi| <= PLATEAU`.
pub const PLATEAU: f64 = 1.25;
/// `eta = 0` on `|xi| >= SUPPORT`.
pub const SUPPORT: f64 = 1.6;

/// Human-readable definition recorded next to experiment output.
pub const ETA_FORMULA: &str = "eta(x) = 1 - S((|x| - 5/4) / (8/5 - 5/4)), \
S(u) = int_{-1}^{2u-1} exp(-1/(1-s^2)) ds / int_{-1}^{1} exp(-1/(1-s^2)) ds, clamped to [0, 1]";

const CELLS: usize = 512;
const CELL_ORDER: usize = 16;

struct StepTable {
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

fn table() -> &'static StepTable {
    static TABLE: OnceLock<StepTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (nodes, weights) = gauss_legendre(CELL_ORDER);
        let h = 2.0 / CELLS as f64;
        let mut cumulative = Vec::with_capacity(CELLS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for c in 0..CELLS {
            let lo = -1.0 + h * c as f64;
            acc += cell_integral(lo, lo + h, &nodes, &weights);
            cumulative.push(acc);
        }
        StepTable { cumulative, nodes, weights }
    })
}

fn cell_integral(lo: f64, hi: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let half = (hi - lo) / 2.0;
    nodes.iter().zip(weights).map(|(x, w)| w * bump(lo + half * (x + 1.0))).sum::<f64>() * half
}

/// Smooth monotone step: 0 for `u <= 0`, 1 for `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let t = table();
    let s = 2.0 * u - 1.0;
    let h = 2.0 / CELLS as f64;
    let cell = (((s + 1.0) / h) as usize).min(CELLS - 1);
    let lo = -1.0 + h * cell as f64;
    let partial = t.cumulative[cell] + cell_integral(lo, s, &t.nodes, &t.weights);
    (partial / t.cumulative[CELLS]).clamp(0.0, 1.0)
}

/// The radial cutoff `eta(|xi|)`.
pub fn eta(x: f64) -> f64 {
    let r = x.abs();
    if r <= PLATEAU {
        1.0
    } else if r >= SUPPORT {
        0.0
    } else {
        1.0 - smooth_step((r - PLATEAU) / (SUPPORT - PLATEAU))
    }
}

/// `chi_k(x) = eta(x / 2^k) - eta(x / 2^(k-1))`, supported in `[(5/8) 2^k, (8/5) 2^k]`.
pub fn chi(k: i32, x: f64) -> f64 {
    let scale = 2f64.powi(k);
    eta(x / scale) - eta(2.0 * x / scale)
}

/// Low-pass symbol `eta(x / 2^k)` of `P_{<= k}`.
pub fn chi_low(k: i32, x: f64) -> f64 {
    eta(x / 2f64.powi(k))
}

/// Inner and outer radius of the support of `chi_k`.
pub fn band_edges(k: i32) -> (f64, f64) {
    let scale = 2f64.powi(k);
    (PLATEAU / 2.0 * scale, SUPPORT * scale)
}

/// A range of dyadic bands `k_min..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutoffBank {
    pub k_min: i32,
    pub k_max: i32,
}

impl CutoffBank {
    pub fn new(k_min: i32, k_max: i32) -> Self {
        assert!(k_min <= k_max, "empty band range");
        Self { k_min, k_max }
    }

    pub fn bands(&self) -> impl Iterator<Item = i32> {
        self.k_min..=self.k_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(eta(0.0), 1.0);
        assert_eq!(eta(1.25), 1.0);
        assert_eq!(eta(-1.25), 1.0);
        assert_eq!(eta(1.6), 0.0);
        assert_eq!(eta(7.0), 0.0);
        let mid = eta(0.5 * (PLATEAU + SUPPORT));
        assert!((mid - 0.5).abs() < 1e-13, "bump is symmetric about the midpoint: {mid}");
    }

    #[test]
    fn step_is_monotone_on_fine_grid() {
        let mut prev = 1.0;
        for i in 0..=20_000 {
            let x = PLATEAU + (SUPPORT - PLATEAU) * i as f64 / 20_000.0;
            let v = eta(x);
            assert!(v <= prev + 1e-15, "eta increased at {x}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn annulus_edges() {
        let (lo, hi) = band_edges(3);
        assert!((lo - 5.0).abs() < 1e-12);
        assert!((hi - 12.8).abs() < 1e-12);
        assert_eq!(chi(3, 4.99), 0.0);
        assert_eq!(chi(3, 12.81), 0.0);
        assert_eq!(chi(3, 8.0), 1.0);
    }
}
