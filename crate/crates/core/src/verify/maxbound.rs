use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::report::{Cell, Criterion, McReport, Table};
use super::{stream_id, McConfig};
use crate::error::Result;
use crate::process::{simulate_stream, TvArmaModel};

/// Frequency of `max_t |X_t| > 2 log n` and its product with `n`.
///
/// Consecutive values of `n * p_hat` are compared after widening each by
/// its Monte Carlo allowance (`se_multiplier` binomial standard errors, with
/// the rate floored at `1/R` so that empty counts still carry uncertainty).
pub fn mc_maxbound(config: &McConfig, model: &TvArmaModel) -> Result<McReport> {
    let r = config.replications();
    let k = config.tolerances.se_multiplier;
    let slack = config.tolerances.slack;
    let mut table = Table::new(&["n", "threshold", "exceedances", "rate", "n_times_rate", "allowance"]);
    let mut scaled = Vec::new();
    for (ni, &n) in config.n.iter().enumerate() {
        let threshold = 2.0 * (n as f64).ln();
        let hits: usize = (0..r)
            .into_par_iter()
            .map(|rep| {
                let s = simulate_stream(model, n, config.seed, stream_id(ni, rep), None)?;
                Ok(usize::from(s.values().iter().any(|x| x.abs() > threshold)))
            })
            .collect::<Result<Vec<usize>>>()?
            .into_iter()
            .sum();
        let rate = hits as f64 / r as f64;
        let pf = rate.max(1.0 / r as f64);
        let allowance = n as f64 * k * (pf * (1.0 - pf) / r as f64).sqrt();
        table.push(vec![
            Cell::from(n),
            threshold.into(),
            Cell::from(hits),
            rate.into(),
            (n as f64 * rate).into(),
            allowance.into(),
        ]);
        scaled.push((n as f64 * rate, allowance));
    }
    let bounded = scaled
        .windows(2)
        .all(|w| w[1].0 - w[1].1 <= (1.0 + slack) * (w[0].0 + w[0].1));
    let criteria = vec![Criterion::new(
        "bounded",
        bounded,
        format!("n * exceedance rate does not grow beyond Monte Carlo allowance: {scaled:?}"),
    )];
    let mut tables = BTreeMap::new();
    tables.insert("maxbound".to_string(), table);
    Ok(McReport::new(config, criteria, tables, json!({ "n_times_rate": scaled.iter().map(|s| s.0).collect::<Vec<_>>() })))
}
