use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use strichartz_core::cutoff::chi;
use strichartz_core::radial::{
    collapse_order, harmonic_count, s_nu_j_tail_bound, oscillation_panels, s_nu_j, t_a_nu, t_a_nu_refined, RadialProfile,
};
use strichartz_core::spectral::{propagate, SpectralField, Space, UniformGrid};
use strichartz_core::DispersionParams;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn bump(rho: f64) -> Complex64 {
    c(1.0, rho - 1.0) * chi(0, rho)
}

/// `int e^{i t rho^a} sqrt(2/(pi r rho)) sin(r rho) rho^{(a-2)/2} h(rho) d rho / sqrt(r)` by a dense trapezoid.
fn half_order_oracle(a: f64, t: f64, r: f64) -> Complex64 {
    let (lo, hi) = (0.625, 1.6);
    let n = 200_000;
    let step = (hi - lo) / n as f64;
    let mut sum = Complex64::default();
    for i in 0..=n {
        let rho = lo + i as f64 * step;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let j = (2.0 / (PI * r * rho)).sqrt() * (r * rho).sin();
        sum += Complex64::from_polar(1.0, t * rho.powf(a)) * j * rho.powf((a - 2.0) / 2.0) * bump(rho) * w;
    }
    sum * step / r.sqrt()
}

#[test]
fn half_order_matches_dense_closed_form_quadrature() {
    let p = DispersionParams::new(1.5, 3).unwrap();
    let times = [0.0, 3.0, 10.0];
    let radii = [0.5, 4.0, 20.0];
    let (u, drift) = t_a_nu_refined(bump, (0.625, 1.6), &p, 0.5, &times, &radii, 8).unwrap();
    assert!(drift < 1e-6);
    for (i, &t) in times.iter().enumerate() {
        for (j, &r) in radii.iter().enumerate() {
            let want = half_order_oracle(1.5, t, r);
            assert!((u[[i, j]] - want).norm() < 1e-7, "t={t} r={r}: {} vs {want}", u[[i, j]]);
        }
    }
}

/// `int_0^inf J_nu(r rho) rho^{nu+1} e^{-beta rho^2} d rho = r^nu e^{-r^2/(4 beta)} / (2 beta)^{nu+1}`.
#[test]
fn gaussian_hankel_pair_in_time() {
    for &(d, nu) in &[(2usize, 0.0), (3, 0.5), (3, 2.5), (5, 4.5), (4, 7.0)] {
        let p = DispersionParams::new(2.0, d).unwrap();
        let power = (-(d as f64) + 3.0) / 2.0;
        let profile = |rho: f64| c(rho.powf(nu + 1.0 - power) * (-rho * rho / 2.0).exp(), 0.0);
        let times = [0.0, 0.4, 1.5];
        let radii = [0.3, 1.0, 2.5, 6.0];
        let (lo, hi) = (1e-9, 11.0);
        let panels = 2 * oscillation_panels(lo, hi, 2.0, 1.5, 6.0);
        let h = RadialProfile::gauss(lo, hi, panels, 10, profile).unwrap();
        let u = t_a_nu(&h, &p, nu, &times, &radii).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let beta = c(0.5, -t);
            for (j, &r) in radii.iter().enumerate() {
                let want = (-(r * r) / (beta * 4.0)).exp() * r.powf(nu) / (beta * 2.0).powf(nu + 1.0)
                    * r.powf(-(d as f64 - 2.0) / 2.0);
                assert!((u[[i, j]] - want).norm() < 1e-10, "d={d} nu={nu} t={t} r={r}: {} vs {want}", u[[i, j]]);
            }
        }
    }
}

/// A radial solution on a 3D periodic grid equals `(2 pi)^{-3/2} T^{1/2}(rho^{(5-a)/2} phi)`.
#[test]
fn agrees_with_three_dimensional_grid_propagation() {
    let a = 2.0;
    let t = 0.5;
    let grid = UniformGrid::new(3, 64, 12.0).unwrap();
    let phi = |rho: f64| (-rho * rho).exp();
    let freq: Vec<Complex64> = grid.frequency_magnitudes().iter().map(|&k| c(phi(k), 0.0)).collect();
    let field = SpectralField::from_values(grid.clone(), freq, Space::Frequency).unwrap();
    let p = DispersionParams::new(a, 3).unwrap();
    let physical = propagate(&field, t, &p).unwrap().to_physical();

    let n = grid.points_per_axis();
    let mid = n / 2;
    let idx: Vec<usize> = (mid + 1..mid + 20).collect();
    let radii: Vec<f64> = idx.iter().map(|&i| grid.coord(i)).collect();
    let h = RadialProfile::gauss(1e-9, 7.0, 60, 10, |rho| c(rho.powf((5.0 - a) / 2.0) * phi(rho), 0.0)).unwrap();
    let u = t_a_nu(&h, &p, 0.5, &[t], &radii).unwrap();
    let pre = (2.0 * PI).powf(-1.5);
    for (col, &i) in idx.iter().enumerate() {
        let flat = (i * n + mid) * n + mid;
        let got = physical.values()[flat];
        assert!((got - u[[0, col]] * pre).norm() < 1e-8, "r={}: grid {got} radial {}", radii[col], u[[0, col]] * pre);
    }
}

#[test]
fn annulus_norm_vanishes_for_large_order() {
    let p = DispersionParams::new(2.0, 3).unwrap();
    let times: Vec<f64> = (0..=80).map(|i| -8.0 + 0.2 * i as f64).collect();
    let h = RadialProfile::gauss(0.6, 1.7, 80, 6, bump).unwrap();
    let norm = h.l2_norm();
    for j in 0..=3 {
        let nu = collapse_order(&p, 0.5, j, 8.0, 1e-6).unwrap();
        let large = 2f64.powi(j) * 8.0 + 40.5;
        for order in [nu, large, nu + 3.0] {
            let s = s_nu_j(&h, &p, order, j, &times).unwrap();
            assert!(s <= 1e-6 * norm, "j={j} nu={order}: {s}");
            assert!(s <= s_nu_j_tail_bound(&p, order, j, 8.0) * norm, "j={j} nu={order}: {s}");
        }
    }
}

#[test]
fn annulus_norm_decays_past_the_turning_band() {
    let p = DispersionParams::new(2.0, 3).unwrap();
    let times: Vec<f64> = (0..=160).map(|i| -16.0 + 0.2 * i as f64).collect();
    let h = RadialProfile::gauss(0.6, 1.7, 80, 6, bump).unwrap();
    // largest Bessel argument on j = 2 is 6.4 * 1.6 = 10.24
    let values: Vec<f64> = (12..=22).map(|k| s_nu_j(&h, &p, k as f64 + 0.5, 2, &times).unwrap()).collect();
    for w in values.windows(2) {
        assert!(w[1] < w[0], "{values:?}");
    }
}

#[test]
fn annulus_norm_is_bounded_uniformly_in_order() {
    let p = DispersionParams::new(2.0, 3).unwrap();
    let times: Vec<f64> = (0..=160).map(|i| -16.0 + 0.2 * i as f64).collect();
    let h = RadialProfile::gauss(0.6, 1.7, 120, 6, bump).unwrap();
    let norm = h.l2_norm();
    for j in 0..=3 {
        for k in 0..40 {
            let s = s_nu_j(&h, &p, 0.5 + k as f64, j, &times).unwrap();
            assert!(s <= 4.0 * norm, "j={j} k={k}: {s} vs {norm}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn same_parity_multiplicities_sum_to_homogeneous_dimension(d in 2usize..9, top in 0usize..40) {
        let total: u128 = (0..=top).filter(|k| (top - k) % 2 == 0).map(|k| harmonic_count(d, k)).sum();
        let want = binom((d + top - 1) as u64, top as u64);
        prop_assert_eq!(total as f64, want);
    }

    #[test]
    fn linear_in_profile(re in -2.0f64..2.0, im in -2.0f64..2.0, t in -5.0f64..5.0, r in 0.1f64..15.0) {
        let p = DispersionParams::new(1.5, 3).unwrap();
        let h = RadialProfile::gauss(0.6, 1.7, 40, 6, bump).unwrap();
        let g = RadialProfile::gauss(0.6, 1.7, 40, 6, |x| c(x.cos(), x * x)).unwrap();
        let s = c(re, im);
        let sum: Vec<Complex64> = h.values().iter().zip(g.values()).map(|(a, b)| a * s + b).collect();
        let lhs = t_a_nu(&h.with_values(sum).unwrap(), &p, 1.5, &[t], &[r]).unwrap()[[0, 0]];
        let rhs = t_a_nu(&h, &p, 1.5, &[t], &[r]).unwrap()[[0, 0]] * s + t_a_nu(&g, &p, 1.5, &[t], &[r]).unwrap()[[0, 0]];
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn time_shift_moves_into_profile(t in -6.0f64..6.0, s in -6.0f64..6.0, r in 0.1f64..15.0, a in 0.5f64..3.0) {
        let p = DispersionParams::new(a, 3).unwrap();
        let h = RadialProfile::gauss(0.6, 1.7, 120, 6, bump).unwrap();
        let shifted: Vec<Complex64> = h.nodes().iter().zip(h.values())
            .map(|(rho, v)| v * Complex64::from_polar(1.0, s * rho.powf(a))).collect();
        let lhs = t_a_nu(&h, &p, 2.5, &[t + s], &[r]).unwrap()[[0, 0]];
        let rhs = t_a_nu(&h.with_values(shifted).unwrap(), &p, 2.5, &[t], &[r]).unwrap()[[0, 0]];
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn annulus_norm_is_homogeneous(scale in 0.01f64..50.0, phase in 0.0f64..6.28) {
        let p = DispersionParams::new(2.0, 3).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| -2.0 + 0.2 * i as f64).collect();
        let h = RadialProfile::gauss(0.6, 1.7, 40, 6, bump).unwrap();
        let base = s_nu_j(&h, &p, 1.5, 1, &times).unwrap();
        let scaled = s_nu_j(&h.scaled(Complex64::from_polar(scale, phase)), &p, 1.5, 1, &times).unwrap();
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * scale * base);
    }
}
