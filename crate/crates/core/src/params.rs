use crate::error::{Error, Result};

/// Dispersion exponent `a` and spatial dimension `d` of `i u_t + D^a u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    a: f64,
    d: usize,
}

impl DispersionParams {
    pub fn new(a: f64, d: usize) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!("dispersion exponent a = {a} must be positive")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension d must be at least 1".into()));
        }
        Ok(Self { a, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// 3 for the wave case `a = 1`, 2 otherwise.
    pub fn d_a(&self) -> usize {
        if self.a == 1.0 {
            3
        } else {
            2
        }
    }

    /// Scaling-critical Sobolev index `(d - a) / 2`.
    pub fn s_c(&self) -> f64 {
        (self.d as f64 - self.a) / 2.0
    }
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / statrs::function::gamma::gamma(half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_case_has_three() {
        assert_eq!(DispersionParams::new(1.0, 3).unwrap().d_a(), 3);
        assert_eq!(DispersionParams::new(1.5, 3).unwrap().d_a(), 2);
        assert_eq!(DispersionParams::new(2.0, 1).unwrap().d_a(), 2);
    }

    #[test]
    fn critical_index() {
        assert_eq!(DispersionParams::new(2.0, 2).unwrap().s_c(), 0.0);
        assert_eq!(DispersionParams::new(1.0, 2).unwrap().s_c(), 0.5);
        assert_eq!(DispersionParams::new(1.5, 2).unwrap().s_c(), 0.25);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(DispersionParams::new(0.0, 1).is_err());
        assert!(DispersionParams::new(f64::NAN, 1).is_err());
        assert!(DispersionParams::new(1.0, 0).is_err());
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }
}
