use std::f64::consts::PI;

use proptest::prelude::*;
use statrs::function::gamma::gamma;
use strichartz_core::levy::{
    characteristic_check, closed_form_k, divergence_scan, k_hat, k_hat_integrand, kernel_constant, stable_density,
    DeltaApproximant, KernelPair, StableDensitySpec,
};
use strichartz_core::params::sphere_area;
use strichartz_core::quad::gauss_legendre_on_breaks;
use strichartz_core::DispersionParams;

fn density(a: f64, d: usize, t: f64, r: f64) -> f64 {
    let mut x = vec![0.0; d];
    x[0] = r;
    stable_density(&StableDensitySpec::new(a, d, t).unwrap(), &x).unwrap()
}

fn close(got: f64, want: f64, rel: f64, abs: f64) -> bool {
    (got - want).abs() <= rel * want.abs() + abs
}

/// `int_0^inf g(s) e^{-s} ds` with geometric grading at 0 and dense Gauss–Legendre panels.
fn laplace_weighted<F: Fn(f64) -> f64>(g: F, width: f64) -> f64 {
    let mut breaks: Vec<f64> = (0..=60).rev().map(|m| 0.5f64.powi(m)).collect();
    let panels = (60.0 / width).ceil() as usize;
    breaks.extend((1..=panels).map(|p| 1.0 + 59.0 * p as f64 / panels as f64));
    let (x, w) = gauss_legendre_on_breaks(&breaks, 20);
    x.iter().zip(&w).map(|(&s, &wi)| wi * g(s) * (-s).exp()).sum()
}

/// One-dimensional density `(1/pi) int_0^inf cos(x xi) e^{-xi^a} d xi`, graded at the origin.
fn line_oracle(a: f64, x: f64) -> f64 {
    let top = 45f64.powf(1.0 / a);
    let mut breaks: Vec<f64> = (0..=60).rev().map(|m| 0.5f64.powi(m)).collect();
    let panels = ((top - 1.0) / 0.05).ceil() as usize;
    breaks.extend((1..=panels).map(|p| 1.0 + (top - 1.0) * p as f64 / panels as f64));
    let (xi, w) = gauss_legendre_on_breaks(&breaks, 20);
    xi.iter().zip(&w).map(|(&k, &wi)| wi * (x * k).cos() * (-k.powf(a)).exp()).sum::<f64>() / PI
}

/// Three-dimensional density from `f_3(R) = -f_1'(R) / (2 pi R)`.
fn lifted_oracle(a: f64, r: f64) -> f64 {
    let width = (0.5 / (1.0 + r)).min(0.1);
    laplace_weighted(|s| s.powf(2.0 / a - 1.0) * (r * s.powf(1.0 / a)).sin(), width) / (2.0 * PI * PI * a * r)
}

#[test]
fn gaussian_and_cauchy_closed_forms() {
    for &x in &[0.0f64, 0.3, 1.0, 2.5, 7.0, 15.0] {
        let g = (-x * x / 4.0).exp() / (4.0 * PI).sqrt();
        assert!(close(density(2.0, 1, 1.0, x), g, 1e-7, 1e-12), "gaussian x={x}");
    }
    for &r in &[0.0, 0.4, 1.0, 3.0, 20.0, 150.0, 999.0] {
        let one = 1.0 / (PI * (1.0 + r * r));
        let two = (1.0 + r * r).powf(-1.5) / (2.0 * PI);
        let three = (1.0 + r * r).powi(-2) / (PI * PI);
        let four = 3.0 / (4.0 * PI * PI) * (1.0 + r * r).powf(-2.5);
        assert!(close(density(1.0, 1, 1.0, r), one, 1e-7, 1e-12), "d=1 r={r}");
        assert!(close(density(1.0, 2, 1.0, r), two, 1e-7, 1e-12), "d=2 r={r}");
        assert!(close(density(1.0, 3, 1.0, r), three, 1e-7, 1e-12), "d=3 r={r}");
        assert!(close(density(1.0, 4, 1.0, r), four, 1e-7, 1e-12), "d=4 r={r}");
    }
    // Gaussian in three dimensions
    for &r in &[0.0f64, 1.0, 4.0] {
        let g = (4.0 * PI).powf(-1.5) * (-r * r / 4.0).exp();
        assert!(close(density(2.0, 3, 1.0, r), g, 1e-7, 1e-12));
    }
}

#[test]
fn line_densities_match_cosine_integral() {
    for &a in &[0.6, 0.9, 1.3, 1.5, 1.8, 1.95] {
        for &x in &[0.0, 0.2, 1.0, 2.5, 5.0] {
            let want = line_oracle(a, x);
            let got = density(a, 1, 1.0, x);
            assert!(close(got, want, 1e-7, 1e-12), "a={a} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn three_dimensional_densities_match_lifted_line_derivative() {
    for &a in &[0.8, 1.2, 1.5, 1.9] {
        for &r in &[0.3, 1.0, 2.5, 6.0, 12.0] {
            let want = lifted_oracle(a, r);
            let got = density(a, 3, 1.0, r);
            assert!(close(got, want, 1e-7, 1e-12), "a={a} r={r}: {got} vs {want}");
        }
    }
}

#[test]
fn heavy_tail_ratio_stays_in_band() {
    let a = 1.5;
    // leading tail coefficient Gamma(1+a) sin(pi a / 2) / pi
    let lead = gamma(1.0 + a) * (PI * a / 2.0).sin() / PI;
    let (lo, hi) = (0.5 * lead, 2.0 * lead);
    for i in 0..=90 {
        let x = 10.0 + i as f64;
        let ratio = density(a, 1, 1.0, x) * (1.0 + x).powf(1.0 + a);
        assert!(ratio > lo && ratio < hi, "x={x}: ratio {ratio} outside [{lo}, {hi}]");
    }
}

#[test]
fn unit_mass() {
    for &(a, d) in &[(2.0, 1usize), (1.0, 1), (0.5, 1), (1.5, 1), (1.0, 3), (1.5, 3), (1.7, 2), (2.0, 3)] {
        for &t in &[0.5, 1.0, 3.0] {
            let spec = StableDensitySpec::new(a, d, t).unwrap();
            let m = characteristic_check(&spec, &vec![0.0; d]).unwrap();
            assert!((m.re - 1.0).abs() <= 1e-8 && m.im == 0.0, "a={a} d={d} t={t}: mass {m}");
        }
    }
}

#[test]
fn characteristic_function_examples() {
    let g = characteristic_check(&StableDensitySpec::new(2.0, 1, 1.0).unwrap(), &[1.0]).unwrap();
    assert!((g.re - (-1.0f64).exp()).abs() <= 1e-8);
    let h = characteristic_check(&StableDensitySpec::new(0.5, 1, 2.0).unwrap(), &[3.0]).unwrap();
    assert!((h.re - (-2.0f64 * 3f64.sqrt()).exp()).abs() <= 1e-6);
    let w = characteristic_check(&StableDensitySpec::new(1.0, 3, 1.0).unwrap(), &[0.6, 0.0, 0.8]).unwrap();
    assert!((w.re - (-1.0f64).exp()).abs() <= 1e-8);
}

#[test]
fn semigroup_in_time() {
    for &(a, d) in &[(1.5, 1usize), (0.8, 1), (1.0, 3)] {
        for &eta in &[0.3, 1.1] {
            let mut e = vec![0.0; d];
            e[0] = eta;
            let c = |t: f64| characteristic_check(&StableDensitySpec::new(a, d, t).unwrap(), &e).unwrap().re;
            let (t1, t2) = (0.7, 1.6);
            assert!((c(t1) * c(t2) - c(t1 + t2)).abs() <= 1e-8, "a={a} d={d} eta={eta}");
        }
    }
}

#[test]
fn positive_on_sampled_points() {
    for &(a, d) in &[(0.5, 1usize), (1.0, 1), (1.5, 1), (1.9, 1), (0.7, 2), (1.5, 3), (1.9, 3), (1.2, 5)] {
        for i in 0..=60 {
            let r = 1000f64 * (i as f64 / 60.0).powi(3);
            assert!(density(a, d, 1.0, r) > 0.0, "a={a} d={d} r={r}");
        }
    }
    for i in 0..=50 {
        assert!(density(2.0, 2, 1.0, i as f64) > 0.0);
    }
}

fn simplified_zero_integrand(eps: f64, a: f64, d: usize, rho: f64) -> f64 {
    // |xi|^{-a} <xi>^{a-d} h^(xi), in polar coordinates
    sphere_area(d) * rho.powi(d as i32 - 1) * rho.powf(-a) * (1.0 + rho * rho).powf((a - d as f64) / 2.0)
        * (-eps * eps * rho * rho / 2.0).exp()
}

#[test]
fn zero_frequency_integrand_is_half_the_simplified_form() {
    for &(a, d) in &[(2.0, 3usize), (1.0, 4), (1.5, 3)] {
        let p = DispersionParams::new(a, d).unwrap();
        for &eps in &[1.0, 0.1] {
            let h = DeltaApproximant::new(eps).unwrap();
            for &rho in &[1e-3, 0.5, 1.0, 7.0, 40.0] {
                let general = k_hat_integrand(&h, &p, 0.0, rho);
                let simple = simplified_zero_integrand(eps, a, d, rho);
                assert!((general - 0.5 * simple).abs() <= 1e-12 * simple, "a={a} d={d} rho={rho}");
            }
        }
    }
}

#[test]
fn k_hat_against_direct_quadrature() {
    let p = DispersionParams::new(2.0, 3).unwrap();
    let h = DeltaApproximant::new(1.0).unwrap();
    for &tau in &[0.0, 0.5, 2.0] {
        // plain rho-variable panels on [0, 12]
        let breaks: Vec<f64> = (0..=2400).map(|i| i as f64 * 0.005).collect();
        let (x, w) = gauss_legendre_on_breaks(&breaks, 12);
        let want: f64 = x
            .iter()
            .zip(&w)
            .map(|(&rho, &wi)| {
                let num = rho * rho * (1.0 + rho * rho).powf(-0.5);
                let den = (tau - rho * rho).powi(2) + rho.powi(4);
                wi * 4.0 * PI * rho * rho * num / den * (-rho * rho / 2.0).exp()
            })
            .sum();
        let got = k_hat(&h, &p, tau).unwrap();
        assert!(got > 0.0 && ((got - want) / want).abs() <= 1e-9, "tau={tau}: {got} vs {want}");
    }
}

#[test]
fn k_hat_grows_as_width_shrinks() {
    let p = DispersionParams::new(2.0, 3).unwrap();
    let values: Vec<f64> = [1.0, 0.5, 0.3, 0.1, 0.03]
        .iter()
        .map(|&e| k_hat(&DeltaApproximant::new(e).unwrap(), &p, 0.0).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn k_hat_continuous_in_tau() {
    let p = DispersionParams::new(2.0, 3).unwrap();
    let h = DeltaApproximant::new(0.2).unwrap();
    let values: Vec<f64> = (0..=80).map(|i| k_hat(&h, &p, i as f64 * 0.05).unwrap()).collect();
    let top = values.iter().cloned().fold(0.0, f64::max);
    assert!(values.iter().all(|&v| v > 0.0));
    for w in values.windows(2) {
        assert!((w[1] - w[0]).abs() <= 0.05 * top, "{w:?}");
    }
}

#[test]
fn logarithmic_divergence() {
    let eps: Vec<f64> = (3..=10).map(|k| 0.5f64.powi(k)).collect();
    for &(a, d) in &[(2.0, 3usize), (1.0, 4), (1.5, 3)] {
        let scan = divergence_scan(&DispersionParams::new(a, d).unwrap(), &eps).unwrap();
        assert!(scan.fit.r_squared >= 0.99 && scan.fit.slope > 0.0, "a={a} d={d}: {:?}", scan.fit);
        // the large-frequency integrand is |S^{d-1}| / (2 rho)
        let expected = sphere_area(d) / 2.0;
        assert!((scan.fit.slope / expected - 1.0).abs() < 0.02, "a={a} d={d}: slope {}", scan.fit.slope);
    }
}

#[test]
fn closed_form_kernel_examples() {
    let p = DispersionParams::new(1.3, 2).unwrap();
    let pair = KernelPair { sigma: 1.0, alpha: 0.0, beta: 1.3 - 2.0, gamma: 0.0 };
    let (n0, a0) = closed_form_k(&p, &pair, 0.0).unwrap();
    assert!(n0.im == 0.0 && n0.re > 0.0);
    assert!(((n0.re - 1.0 / kernel_constant(&p)) * kernel_constant(&p)).abs() <= 1e-8);
    assert!((n0 - a0).norm() <= 1e-8 * a0.norm());
    let cd = kernel_constant(&p);
    for &t in &[0.5, 2.0, 8.0] {
        let (num, ana) = closed_form_k(&p, &pair, t).unwrap();
        assert!((num - ana).norm() <= 1e-6 * ana.norm(), "t={t}");
        assert!((num.im - t / (cd * (1.0 + t * t))).abs() <= 1e-6 * num.im.abs(), "t={t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn self_similar(a in 0.3f64..2.0, t in 0.1f64..10.0, r in 0.0f64..50.0, d in 1usize..4) {
        let direct = density(a, d, t, r);
        let scaled = t.powf(-(d as f64) / a) * density(a, d, 1.0, r * t.powf(-1.0 / a));
        prop_assert!((direct - scaled).abs() <= 1e-10 * scaled.abs() + 1e-300);
    }

    #[test]
    fn kernel_ignores_gamma(gamma in -3.0f64..3.0, t in -5.0f64..5.0, sigma in 0.2f64..4.0, alpha in -1.5f64..1.0) {
        let p = DispersionParams::new(1.3, 2).unwrap();
        let base = KernelPair { sigma, alpha, beta: 1.3 - 2.0 - alpha, gamma: 0.0 };
        let moved = KernelPair { gamma, ..base };
        let (n1, ana) = closed_form_k(&p, &base, t).unwrap();
        let (n2, _) = closed_form_k(&p, &moved, t).unwrap();
        prop_assert!((n1 - n2).norm() <= 1e-10 * n1.norm());
        prop_assert!((n1 - ana).norm() <= 1e-6 * ana.norm());
    }
}
