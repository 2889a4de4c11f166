use serde::{Deserialize, Serialize};

use crate::process::{decay_weight, TvArmaModel};

/// `sup_u |c(u, k)| l(k)` for `k = 0..=k_max`, the sup taken over a u-grid
/// together with the model breakpoints and their left limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub kappa: f64,
    pub weighted: Vec<f64>,
    pub first_half_max: f64,
    pub second_half_max: f64,
    /// All values finite and the second half does not exceed the first.
    pub bounded: bool,
}

pub fn covariance_decay(model: &TvArmaModel, k_max: usize, kappa: f64, u_points: usize) -> DecayReport {
    let mut us: Vec<f64> = (0..u_points).map(|i| i as f64 / (u_points - 1).max(1) as f64).collect();
    for b in model.breakpoints() {
        us.push(b);
        us.push(b - 1e-12);
    }
    let weighted: Vec<f64> = (0..=k_max as i64)
        .map(|k| {
            let sup = us.iter().map(|&u| model.covariance(u, k).abs()).fold(0.0, f64::max);
            sup * decay_weight(k, kappa)
        })
        .collect();
    let mid = k_max / 2;
    let first_half_max = weighted[..=mid].iter().copied().fold(0.0, f64::max);
    let second_half_max = weighted[mid + 1..].iter().copied().fold(0.0, f64::max);
    let bounded = weighted.iter().all(|v| v.is_finite()) && second_half_max <= first_half_max;
    DecayReport { kappa, weighted, first_half_max, second_half_max, bounded }
}
