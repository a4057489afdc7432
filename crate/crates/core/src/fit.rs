/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Set when the abscissae carry no spread; slope is then exactly zero.
    pub degenerate: bool,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len(), "fit inputs must have equal length");
    let n = xs.len() as f64;
    if xs.is_empty() {
        return LinearFit { slope: 0.0, intercept: 0.0, r_squared: 0.0, degenerate: true };
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if xs.len() < 2 || sxx <= f64::MIN_POSITIVE || xs.iter().all(|&x| x == xs[0]) {
        return LinearFit { slope: 0.0, intercept: my, r_squared: 0.0, degenerate: true };
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LinearFit { slope, intercept, r_squared, degenerate: false }
}
