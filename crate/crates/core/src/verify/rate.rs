use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::report::{Cell, Criterion, McReport, Table};
use super::stats::bootstrap_slope_ci;
use super::{stream_id, McConfig};
use crate::error::{Error, Result};
use crate::kernel::SmoothingKernel;
use crate::numeric::{median, ols_slope};
use crate::process::{simulate_stream, Sample, TvArmaModel};
use crate::rng::stream_rng;
use crate::whittle::{band_grid, default_bandwidth, local_yule_walker_curve};

/// `sup_u ||theta_hat(u) - theta_0(u)||_2` over the u-grid, with
/// `theta = (alpha_1..alpha_p, sigma^2)` from the local Yule-Walker solver.
pub fn sup_error_curve(
    sample: &Sample,
    model: &TvArmaModel,
    p: usize,
    kernel: SmoothingKernel,
    b: f64,
    u_points: usize,
) -> Result<f64> {
    let grid = band_grid(b, u_points);
    let fits = local_yule_walker_curve(sample, p, kernel, b, &grid)?;
    let mut sup: f64 = 0.0;
    for fit in fits {
        let mut truth = model.ar_at(fit.u);
        truth.resize(p, 0.0);
        truth.push(model.sigma_at(fit.u).powi(2));
        let mut est = fit.alpha.clone();
        est.push(fit.sigma2);
        let err = est.iter().zip(&truth).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        sup = sup.max(err);
    }
    Ok(sup)
}

/// Log-log slope of median error against `n`.
pub fn rate_slope(ns: &[usize], median_errors: &[f64]) -> f64 {
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = median_errors.iter().map(|e| e.ln()).collect();
    ols_slope(&x, &y)
}

fn sup_errors(config: &McConfig, model: &TvArmaModel, p: usize, n: usize, b: f64, stream_base: usize) -> Result<Vec<f64>> {
    (0..config.replications())
        .into_par_iter()
        .map(|rep| {
            let s = simulate_stream(model, n, config.seed, stream_id(stream_base, rep), None)?;
            sup_error_curve(&s, model, p, config.kernel, b, config.u_points)
        })
        .collect()
}

/// Uniform error rate of the local estimator with `b = n^{-1/5}`.
pub fn mc_rate(config: &McConfig, model: &TvArmaModel) -> Result<McReport> {
    let p = config.ar_order.unwrap_or(model.p());
    if p == 0 || model.q() > 0 {
        return Err(Error::Config("the rate experiment needs a tvAR model with p >= 1".into()));
    }
    let mut errors = Vec::new();
    let mut table = Table::new(&["n", "bandwidth", "median_sup_error", "q25", "q75"]);
    for (ni, &n) in config.n.iter().enumerate() {
        let b = default_bandwidth(n);
        let e = sup_errors(config, model, p, n, b, ni)?;
        let mut sorted = e.clone();
        sorted.sort_by(f64::total_cmp);
        table.push(vec![
            Cell::from(n),
            b.into(),
            median(&e).into(),
            crate::numeric::quantile_sorted(&sorted, 0.25).into(),
            crate::numeric::quantile_sorted(&sorted, 0.75).into(),
        ]);
        errors.push(e);
    }
    let mut criteria = Vec::new();
    let mut tables = BTreeMap::new();
    let mut summary = json!({});
    if config.n.len() >= 2 {
        let mut rng = stream_rng(config.seed, u64::MAX);
        let (slope, lo, hi) = bootstrap_slope_ci(&config.n, &errors, config.bootstrap, &mut rng);
        let [a, c] = config.tolerances.slope_range;
        criteria.push(Criterion::new(
            "slope",
            slope >= a && slope <= c,
            format!("log-log slope {slope:.4} (bootstrap 95% interval [{lo:.4}, {hi:.4}]) in [{a}, {c}]"),
        ));
        summary = json!({ "slope": slope, "slope_ci": [lo, hi] });
    }
    if let Some(bands) = &config.bandwidths {
        let n = config.n[0];
        let mut sweep = Table::new(&["n", "bandwidth", "median_sup_error"]);
        let mut meds = Vec::new();
        for (bi, &b) in bands.iter().enumerate() {
            let e = sup_errors(config, model, p, n, b, config.n.len() + bi)?;
            let m = median(&e);
            sweep.push(vec![Cell::from(n), b.into(), m.into()]);
            meds.push(m);
        }
        let argmin = meds.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).map_or(0, |(i, _)| i);
        if bands.len() >= 3 {
            criteria.push(Criterion::new(
                "bandwidth-u-shape",
                argmin > 0 && argmin + 1 < bands.len(),
                format!("median sup error minimized at interior bandwidth index {argmin}"),
            ));
        }
        tables.insert("bandwidth_sweep".to_string(), sweep);
    }
    tables.insert("rate".to_string(), table);
    Ok(McReport::new(config, criteria, tables, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let ns = [1000usize, 2000, 4000, 8000];
        let e: Vec<f64> = ns.iter().map(|&n| 0.7 * (n as f64).powf(-0.4)).collect();
        assert!((rate_slope(&ns, &e) + 0.4).abs() < 1e-12);
    }
}
