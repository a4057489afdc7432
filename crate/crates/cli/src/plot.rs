//! Matplotlib script generation from a results file.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::runner::{ResultRow, EXACT};

#[derive(Debug, Clone, Copy)]
enum Axis {
    Linear,
    LogLog,
    /// Abscissa `ln(1/x)`.
    LogInverse,
}

#[derive(Debug, Clone, Copy)]
enum Role {
    Series { x: &'static str, axis: Axis },
    /// A single number annotated onto the figure.
    Scalar,
}

fn role(metric: &str) -> Option<Role> {
    use Axis::*;
    let series = |x, axis| Some(Role::Series { x, axis });
    match metric {
        "density" => series("x", Linear),
        "characteristic_re" | "characteristic_im" => series("eta", Linear),
        "sup_norm" => series("t", LogLog),
        "k_hat0" => series("eps", LogInverse),
        "k_re" | "k_im" => series("t", Linear),
        "bessel_j" => series("r", Linear),
        "ratio" | "tail_drift" => series("k", Linear),
        "trial_ratio" => series("trial", Linear),
        "mass" | "mass_drift" | "critical_norm" | "scattering_distance" => series("t", Linear),
        "decay_slope" | "decay_intercept" | "decay_r_squared" | "decay_target" | "fit_slope" | "fit_intercept"
        | "fit_r_squared" | "max_ratio" | "scattering_middle" | "scattering_last" => Some(Role::Scalar),
        "admissible" | "radially_admissible" | "scaling_regularity" | "decay_degenerate" => Some(Role::Scalar),
        _ => None,
    }
}

fn split_params(s: &str) -> Vec<(String, String)> {
    s.split(';').filter_map(|kv| kv.split_once('=')).map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[derive(Default)]
struct Series {
    xs: Vec<f64>,
    ys: Vec<f64>,
    errs: Vec<f64>,
}

fn py_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| if x.is_finite() { format!("{x:?}") } else { "float('nan')".into() }).collect();
    format!("[{}]", items.join(", "))
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

/// Returns the script and one warning per skipped metric.
pub fn emit_plot_script(rows: &[ResultRow], source: &str) -> (String, Vec<String>) {
    let mut script = String::new();
    let _ = writeln!(script, "# plot script generated by strichartz-lab from {source}");
    let mut warnings = Vec::new();
    if rows.is_empty() {
        let _ = writeln!(script, "# no result rows; nothing to plot");
        return (script, warnings);
    }
    // metric -> series label -> points, in first-seen order of metrics
    let mut order: Vec<String> = Vec::new();
    let mut panels: BTreeMap<String, (Axis, String, BTreeMap<String, Series>)> = BTreeMap::new();
    let mut scalars: Vec<(String, String, String)> = Vec::new();
    for row in rows {
        match role(&row.metric) {
            None => {
                if !warnings.iter().any(|w: &String| w.contains(&format!("`{}`", row.metric))) {
                    warnings.push(format!("skipping unknown metric `{}`", row.metric));
                }
            }
            Some(Role::Scalar) => scalars.push((row.metric.clone(), row.params.clone(), row.value.clone())),
            Some(Role::Series { x, axis }) => {
                let kv = split_params(&row.params);
                let Some(xv) = kv.iter().find(|(k, _)| k == x).and_then(|(_, v)| v.parse::<f64>().ok()) else {
                    warnings.push(format!("row for `{}` has no numeric `{x}`; skipped", row.metric));
                    continue;
                };
                let (Ok(y), err) = (row.value.parse::<f64>(), row.error.as_str()) else {
                    continue;
                };
                let e = if err == EXACT { 0.0 } else { err.parse().unwrap_or(f64::NAN) };
                let label: Vec<String> = kv.iter().filter(|(k, _)| k != x).map(|(k, v)| format!("{k}={v}")).collect();
                let xv = match axis {
                    Axis::LogInverse => (1.0 / xv).ln(),
                    _ => xv,
                };
                if !order.contains(&row.metric) {
                    order.push(row.metric.clone());
                }
                let xlabel = match axis {
                    Axis::LogInverse => format!("log(1/{x})"),
                    _ => x.to_string(),
                };
                let panel = panels.entry(row.metric.clone()).or_insert_with(|| (axis, xlabel, BTreeMap::new()));
                let s = panel.2.entry(label.join(", ")).or_default();
                s.xs.push(xv);
                s.ys.push(y);
                s.errs.push(e);
            }
        }
    }
    let _ = writeln!(script, "import os");
    let _ = writeln!(script, "import matplotlib");
    let _ = writeln!(script, "matplotlib.use(\"Agg\")");
    let _ = writeln!(script, "import matplotlib.pyplot as plt\n");
    let fit = |name: &str| scalars.iter().find(|(m, _, _)| m == name).and_then(|(_, _, v)| v.parse::<f64>().ok());
    let n = order.len().max(1);
    let _ = writeln!(script, "fig, axes = plt.subplots({n}, 1, figsize=(7, {}), squeeze=False)", 3.5 * n as f64);
    for (i, metric) in order.iter().enumerate() {
        let (axis, xlabel, series) = &panels[metric];
        let _ = writeln!(script, "ax = axes[{i}][0]");
        for (label, s) in series {
            let _ = writeln!(
                script,
                "ax.errorbar({}, {}, yerr={}, marker=\"o\", ms=3, capsize=2, label={})",
                py_list(&s.xs),
                py_list(&s.ys),
                py_list(&s.errs),
                py_str(label)
            );
        }
        if metric == "k_hat0" {
            if let (Some(m), Some(b)) = (fit("fit_slope"), fit("fit_intercept")) {
                let xs: Vec<f64> = series.values().flat_map(|s| s.xs.iter().copied()).collect();
                let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let _ = writeln!(
                    script,
                    "ax.plot([{lo:?}, {hi:?}], [{:?}, {:?}], \"k--\", label=\"fit: slope {m:.4}\")",
                    m * lo + b,
                    m * hi + b
                );
            }
        }
        if matches!(axis, Axis::LogLog) {
            let _ = writeln!(script, "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")");
        }
        let _ = writeln!(script, "ax.set_xlabel({})\nax.set_ylabel({})", py_str(xlabel), py_str(metric));
        let _ = writeln!(script, "ax.legend(fontsize=7)");
    }
    if !scalars.is_empty() {
        let lines: Vec<String> = scalars.iter().take(12).map(|(m, p, v)| format!("{m} [{p}] = {v}")).collect();
        for (m, p, v) in &scalars {
            let _ = writeln!(script, "# {m} [{p}] = {v}");
        }
        let _ = writeln!(script, "axes[0][0].text(0.02, 0.02, {}, transform=axes[0][0].transAxes, fontsize=6, va=\"bottom\")", py_str(&lines.join("\n")));
    }
    let _ = writeln!(script, "fig.tight_layout()");
    let png = format!("{}.png", source.trim_end_matches(".csv"));
    let _ = writeln!(script, "fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), {}))", py_str(&png));
    (script, warnings)
}
