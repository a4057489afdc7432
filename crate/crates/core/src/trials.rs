//! Seeded random trial data shared by the lower-bound scans.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cutoff::chi;

/// Frequency band `[5/8, 8/5]` carrying the unit annulus `chi_0`.
pub const UNIT_BAND: (f64, f64) = (0.625, 1.6);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent standard complex Gaussians (unit variance per component).
pub fn complex_gaussians<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect()
}

/// `i`-th Fourier mode across the unit band.
pub fn band_mode(m: usize, rho: f64) -> Complex64 {
    let (lo, hi) = UNIT_BAND;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 * (rho - lo) / (hi - lo))
}

/// `chi_0(rho) * sum_m c_m e^{2 pi i m (rho - 5/8)/(8/5 - 5/8)}`.
pub fn band_limited(coeffs: &[Complex64], rho: f64) -> Complex64 {
    let c = chi(0, rho);
    if c == 0.0 {
        return Complex64::default();
    }
    coeffs.iter().enumerate().map(|(m, cm)| cm * band_mode(m, rho)).sum::<Complex64>() * c
}
