use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::report::{Cell, Criterion, McReport, Table};
use super::stats::sd;
use super::{stream_id, McConfig};
use crate::error::Result;
use crate::numeric::ols_slope;
use crate::process::{simulate_stream, TvArmaModel};
use crate::spectral::{empirical_process, spectral_mean_lag, ExactCovariance, Taper};

/// Empirical tail `eta -> P(|E~_n(phi)| >= eta)` of the exactly centered
/// empirical process at the first `n` of the config.
pub fn mc_tail(config: &McConfig, model: &TvArmaModel) -> Result<McReport> {
    let (name, phi) = config.resolved_functionals()?.remove(0);
    let n = config.n[0];
    let r = config.replications();
    let taper = Taper::new(config.taper.clone(), n)?;
    let center = ExactCovariance::new(model, n)?.expected_spectral_mean(&taper, &phi)?;
    let values: Vec<f64> = (0..r)
        .into_par_iter()
        .map(|rep| {
            let s = simulate_stream(model, n, config.seed, stream_id(0, rep), None)?;
            Ok(empirical_process(spectral_mean_lag(&s, &taper, &phi, phi.max_lag())?, center, n))
        })
        .collect::<Result<_>>()?;
    let spread = sd(&values);
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let curve: Vec<(f64, f64)> = config
        .eta_multiples
        .iter()
        .map(|m| {
            let eta = m * spread;
            (eta, abs.iter().filter(|a| **a >= eta).count() as f64 / r as f64)
        })
        .collect();

    let mut table = Table::new(&["eta", "eta_over_sd", "exceedance"]);
    for ((eta, p), m) in curve.iter().zip(&config.eta_multiples) {
        table.push(vec![Cell::from(*eta), Cell::from(*m), Cell::from(*p)]);
    }
    let mut criteria = Vec::new();
    let monotone = curve.windows(2).all(|w| w[0].0 > w[1].0 || w[1].1 <= w[0].1);
    criteria.push(Criterion::new("monotone", monotone, "exceedance curve non-increasing in eta"));

    let tol = &config.tolerances;
    let at = tol.tail_sd_multiple * spread;
    let p_at = abs.iter().filter(|a| **a >= at).count() as f64 / r as f64;
    criteria.push(Criterion::new(
        "tail-level",
        p_at <= tol.tail_level,
        format!("P(|E_n| >= {} sd) = {p_at:e} <= {:e}", tol.tail_sd_multiple, tol.tail_level),
    ));

    // Shape: fit log P on sqrt(eta) over the well-resolved lower half of the
    // curve and require the rest to lie below the line up to MC error.
    let resolved: Vec<(f64, f64)> = curve.iter().copied().filter(|(_, p)| *p * r as f64 >= 10.0).collect();
    let half = resolved.len().div_ceil(2).max(2).min(resolved.len());
    let mut shape_detail = String::from("too few resolved points for a fit");
    let mut shape_ok = true;
    let mut line = None;
    if half >= 2 {
        let x: Vec<f64> = resolved[..half].iter().map(|(e, _)| e.sqrt()).collect();
        let y: Vec<f64> = resolved[..half].iter().map(|(_, p)| p.ln()).collect();
        let slope = ols_slope(&x, &y);
        let mx = x.iter().sum::<f64>() / x.len() as f64;
        let my = y.iter().sum::<f64>() / y.len() as f64;
        let intercept = my - slope * mx;
        let cutoff = resolved[half - 1].0;
        let below = curve.iter().filter(|(e, _)| *e > cutoff).all(|(e, p)| {
            let q = (intercept + slope * e.sqrt()).exp();
            *p <= q + tol.se_multiplier * (q / r as f64).sqrt() + 1.0 / r as f64
        });
        shape_ok = slope < 0.0 && below;
        shape_detail = format!("log P ~ {intercept:.4} + {slope:.4} sqrt(eta); tail below the line: {below}");
        line = Some((intercept, slope));
    }
    criteria.push(Criterion::new("tail-shape", shape_ok, shape_detail));

    let mut tables = BTreeMap::new();
    tables.insert("tail".to_string(), table);
    let summary = json!({
        "functional": name,
        "n": n,
        "center": center,
        "sd": spread,
        "fit": line.map(|(a, b)| json!({ "intercept": a, "slope": b })),
    });
    Ok(McReport::new(config, criteria, tables, summary))
}
