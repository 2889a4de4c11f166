use std::collections::BTreeMap;

use serde_json::json;

use super::report::{Cell, Criterion, McReport, Table};
use super::McConfig;
use crate::error::Result;
use crate::process::TvArmaModel;
use crate::spectral::{theoretical_functional, ExactCovariance, Taper};

/// `sqrt(n) |E F_n(phi) - F(phi)|` from exact expectations, no simulation.
pub fn bias_sweep(config: &McConfig, model: &TvArmaModel) -> Result<McReport> {
    let phis = config.resolved_functionals()?;
    let slack = config.tolerances.slack;
    let targets: Vec<f64> = phis
        .iter()
        .map(|(_, f)| theoretical_functional(model, &config.taper, f, config.quad).map(|q| q.value))
        .collect::<Result<_>>()?;
    let mut scaled = vec![Vec::new(); phis.len()];
    let mut table = Table::new(&["n", "functional", "expected", "target", "scaled_discrepancy"]);
    for &n in &config.n {
        let exact = ExactCovariance::new(model, n)?;
        let taper = Taper::new(config.taper.clone(), n)?;
        for (j, (name, f)) in phis.iter().enumerate() {
            let e = exact.expected_spectral_mean(&taper, f)?;
            let d = (n as f64).sqrt() * (e - targets[j]).abs();
            scaled[j].push(d);
            table.push(vec![Cell::from(n), Cell::from(name.as_str()), e.into(), targets[j].into(), d.into()]);
        }
    }
    let criteria = phis
        .iter()
        .zip(&scaled)
        .map(|((name, _), ds)| {
            // absolute floor for discrepancies at rounding level
            let ok = ds.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0] + 1e-10);
            Criterion::new(
                format!("bounded-{name}"),
                ok,
                format!("sqrt(n)|E F_n - F| non-increasing within {:.0}% slack: {ds:?}", slack * 100.0),
            )
        })
        .collect();
    let mut tables = BTreeMap::new();
    tables.insert("bias".to_string(), table);
    Ok(McReport::new(config, criteria, tables, json!({ "targets": targets, "scaled_discrepancy": scaled })))
}
