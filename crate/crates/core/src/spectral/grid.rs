use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::QuadRule;

/// `M` equispaced nodes on `[-pi, pi]` (both ends included) with trapezoid
/// weights. The rule integrates `e^{i lambda k}` exactly for `0 < |k| < M - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "usize", try_from = "usize")]
pub struct FrequencyGrid {
    rule: QuadRule,
}

impl FrequencyGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("frequency grid needs at least 2 points, got {m}")));
        }
        Ok(FrequencyGrid { rule: QuadRule::periodic_trapezoid(m) })
    }

    /// `M = 2n + 2`: exact for every lag a length-`n` sample can produce.
    pub fn exact_for(n: usize) -> Self {
        FrequencyGrid::new(2 * n.max(1) + 2).expect("m >= 4")
    }

    pub fn m(&self) -> usize {
        self.rule.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn rule(&self) -> &QuadRule {
        &self.rule
    }

    /// Largest `|k|` with exact integration of `e^{i lambda k}`.
    pub fn exact_lag(&self) -> usize {
        self.m() - 2
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        let terms: Vec<f64> = values.iter().zip(self.weights()).map(|(v, w)| v * w).collect();
        crate::numeric::pairwise_sum(&terms)
    }

    /// Evaluates `sum_k c[k] e^{-i lambda_m k}` at every node, for lags
    /// `k = offset, offset + 1, ...`. Exact for any number of lags: the node
    /// spacing makes `e^{-i lambda_m k}` periodic in `k` up to a sign.
    pub fn eval_series(&self, offset: i64, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.m();
        let l = m - 1;
        let mut bins = vec![Complex64::new(0.0, 0.0); l];
        for (i, c) in coeffs.iter().enumerate() {
            let k = offset + i as i64;
            // e^{-i(-pi + 2 pi m / L) k} = (-1)^k e^{-2 pi i m k / L}
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            bins[k.rem_euclid(l as i64) as usize] += c * sign;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(l).process(&mut bins);
        let mut out = bins;
        out.push(out[0]);
        out
    }
}

impl From<FrequencyGrid> for usize {
    fn from(g: FrequencyGrid) -> usize {
        g.m()
    }
}

impl TryFrom<usize> for FrequencyGrid {
    type Error = Error;
    fn try_from(m: usize) -> Result<Self> {
        FrequencyGrid::new(m)
    }
}
