use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::report::{Cell, Criterion, McReport, Table};
use super::stats::{covariance_matrix, mean, moments, sd};
use super::{stream_id, McConfig};
use crate::error::Result;
use crate::process::{simulate_stream, TvArmaModel};
use crate::spectral::{
    clt_covariance_matrix, empirical_process, spectral_mean_lag, theoretical_functional, ExactCovariance, Taper,
};

/// `E_n(phi_j)` over replications against the limit covariance.
///
/// The mean check allows for the exact finite-sample bias
/// `sqrt(n) (E F_n - F)` on top of the Monte Carlo error.
pub fn mc_clt(config: &McConfig, model: &TvArmaModel) -> Result<McReport> {
    let phis = config.resolved_functionals()?;
    let funcs: Vec<_> = phis.iter().map(|(_, f)| f.clone()).collect();
    let d = funcs.len();
    let r = config.replications();
    let k = config.tolerances.se_multiplier;
    let targets: Vec<f64> = funcs
        .iter()
        .map(|f| theoretical_functional(model, &config.taper, f, config.quad).map(|q| q.value))
        .collect::<Result<_>>()?;
    let limit = clt_covariance_matrix(&funcs, model, &config.taper, config.quad)?;

    let mut criteria = Vec::new();
    let mut cov_table = Table::new(&["n", "i", "j", "empirical", "target", "se", "z"]);
    let mut mean_table = Table::new(&["n", "functional", "mean", "se", "exact_bias", "skewness", "excess_kurtosis"]);
    let mut per_n = Vec::new();
    for (ni, &n) in config.n.iter().enumerate() {
        let taper = Taper::new(config.taper.clone(), n)?;
        let data: Vec<Vec<f64>> = (0..r)
            .into_par_iter()
            .map(|rep| {
                let s = simulate_stream(model, n, config.seed, stream_id(ni, rep), None)?;
                funcs
                    .iter()
                    .zip(&targets)
                    .map(|(f, t)| Ok(empirical_process(spectral_mean_lag(&s, &taper, f, f.max_lag())?, *t, n)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let exact = ExactCovariance::new(model, n)?;
        let (cov, se) = covariance_matrix(&data);
        let mut cov_ok = true;
        for i in 0..d {
            for j in i..d {
                let idx = i * d + j;
                let z = (cov[idx] - limit[idx]) / se[idx];
                cov_ok &= z.abs() <= k;
                cov_table.push(vec![
                    Cell::from(n),
                    Cell::from(i),
                    Cell::from(j),
                    cov[idx].into(),
                    limit[idx].into(),
                    se[idx].into(),
                    z.into(),
                ]);
            }
        }
        criteria.push(Criterion::new(
            format!("covariance-n{n}"),
            cov_ok,
            format!("every entry of the empirical covariance within {k} standard errors of the limit"),
        ));
        let mut mean_ok = true;
        for (j, (name, f)) in phis.iter().enumerate() {
            let col: Vec<f64> = data.iter().map(|row| row[j]).collect();
            let m = mean(&col);
            let se_m = sd(&col) / (r as f64).sqrt();
            let bias = empirical_process(exact.expected_spectral_mean(&taper, f)?, targets[j], n);
            mean_ok &= m.abs() <= k * se_m + bias.abs();
            let (skew, kurt) = moments(&col);
            mean_table.push(vec![
                Cell::from(n),
                Cell::from(name.as_str()),
                m.into(),
                se_m.into(),
                bias.into(),
                skew.into(),
                kurt.into(),
            ]);
        }
        criteria.push(Criterion::new(
            format!("mean-n{n}"),
            mean_ok,
            format!("|mean E_n| within {k} standard errors plus the exact bias"),
        ));
        per_n.push(json!({ "n": n, "covariance": cov, "standard_errors": se }));
    }
    let mut tables = BTreeMap::new();
    tables.insert("covariance".to_string(), cov_table);
    tables.insert("mean".to_string(), mean_table);
    let summary = json!({
        "functionals": phis.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "targets": targets,
        "limit_covariance": limit,
        "kappa4": model.kappa4(),
        "per_n": per_n,
    });
    Ok(McReport::new(config, criteria, tables, summary))
}
