//! Spectral means `F_n(phi)`, their population counterpart `F(phi)`, the
//! empirical process and the exact finite-sample expectation of `F_n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functional::{FrequencyPart, SpectralFunctional, TimeWeight};
use super::grid::FrequencyGrid;
use super::periodogram::{eval_symmetric_series, lag_pair, lag_products, pre_periodogram_all, weighted_lag_sums};
use super::taper::{Taper, TaperSpec};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, QuadRule};
use crate::process::{transfer_raw, Sample, TvArmaModel};

fn default_u_points() -> usize {
    401
}

fn default_freq_degree() -> usize {
    20
}

/// Nested quadrature settings for the population functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    /// Midpoint nodes over `u in [0, 1]`, split at every breakpoint.
    #[serde(default = "default_u_points")]
    pub u_points: usize,
    /// Gauss-Legendre nodes per frequency piece.
    #[serde(default = "default_freq_degree")]
    pub freq_degree: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { u_points: default_u_points(), freq_degree: default_freq_degree() }
    }
}

impl QuadConfig {
    fn coarse(self) -> Self {
        QuadConfig { u_points: (self.u_points / 2).max(2), freq_degree: (self.freq_degree * 3 / 4).max(4) }
    }
}

/// A quadrature result with the difference to a coarser rule as error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: f64,
    pub error_estimate: f64,
}

/// `F_n(phi)` by frequency-domain quadrature of the pre-periodogram.
///
/// Smooth periodic frequency parts use the trapezoid rule of `grid`; the
/// others use composite Gauss-Legendre over their support, split at jumps and
/// kinks, with a node density tied to `grid.m()`. With `M >= 2n + 2` both are
/// exact up to rounding for the trigonometric polynomials `J_n(t/n, .)`.
pub fn spectral_mean_freq(sample: &Sample, taper: &Taper, phi: &SpectralFunctional, grid: &FrequencyGrid) -> Result<f64> {
    phi.validate()?;
    let xh = taper.apply(sample.values())?;
    let n = xh.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let nf = n as f64;
    let on_grid = if phi.terms.iter().any(|t| t.freq.is_periodic_smooth()) {
        Some(pre_periodogram_all(sample, taper, grid)?)
    } else {
        None
    };
    let mut per_term = Vec::with_capacity(phi.terms.len());
    for term in &phi.terms {
        let rule = term.freq.frequency_rule(grid);
        let contributions: Vec<f64> = (1..=n)
            .into_par_iter()
            .map(|t| {
                let u = t as f64 / nf;
                if term.time.eval(u) == 0.0 {
                    return 0.0;
                }
                let j_vals = match (&on_grid, term.freq.is_periodic_smooth()) {
                    (Some(all), true) => all[t - 1].clone(),
                    _ => eval_symmetric_series(&lag_products(&xh, t), &rule.nodes),
                };
                let terms: Vec<f64> = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .zip(&j_vals)
                    .map(|((&lam, &w), &j)| w * term.eval(u, lam) * j)
                    .collect();
                pairwise_sum(&terms)
            })
            .collect();
        per_term.push(pairwise_sum(&contributions) / nf);
    }
    Ok(pairwise_sum(&per_term))
}

/// Lags used by the time-domain route for one frequency part.
fn lag_range(freq: &FrequencyPart, limit: usize) -> Vec<usize> {
    match freq.lag_support() {
        Some(ks) => {
            let mut v: Vec<usize> = ks.iter().map(|k| k.unsigned_abs() as usize).filter(|&k| k <= limit).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
        None => (0..=limit).collect(),
    }
}

/// `sum_k psi_hat(-k) D(|k|)` for symmetric lag sums `D`.
fn combine_lags(freq: &FrequencyPart, sums: &[f64], limit: usize) -> Result<f64> {
    let lags = lag_range(freq, limit.min(sums.len().saturating_sub(1)));
    let mut ks: Vec<i64> = Vec::with_capacity(2 * lags.len());
    for &k in &lags {
        ks.push(-(k as i64));
        if k > 0 {
            ks.push(k as i64);
        }
    }
    let coeffs = freq.fourier_many(&ks);
    let terms: Vec<Complex64> = ks
        .iter()
        .zip(&coeffs)
        .map(|(&k, &c)| c * sums[k.unsigned_abs() as usize])
        .collect();
    let total = crate::numeric::pairwise_sum_complex(&terms);
    let mass: f64 = terms.iter().map(|z| z.norm()).sum();
    if total.im.abs() > 1e-10 * mass.max(1.0) {
        return Err(Error::Numerical(format!("lag-domain sum has imaginary part {:.3e}", total.im)));
    }
    Ok(total.re)
}

fn time_weights(time: &TimeWeight, n: usize, scale: f64) -> Vec<f64> {
    (1..=n).map(|t| scale * time.eval(t as f64 / n as f64)).collect()
}

/// `F_n(phi) = (1/2 pi n) sum_t sum_k phi_hat(t/n, -k) X_a X_b` with lags up
/// to `k_max` (default `n - 1`, which is exact).
pub fn spectral_mean_lag(sample: &Sample, taper: &Taper, phi: &SpectralFunctional, k_max: Option<usize>) -> Result<f64> {
    phi.validate()?;
    let xh = taper.apply(sample.values())?;
    let n = xh.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let limit = k_max.unwrap_or(n - 1).min(n - 1);
    let mut per_term = Vec::with_capacity(phi.terms.len());
    for term in &phi.terms {
        let sums = weighted_lag_sums(&xh, &time_weights(&term.time, n, term.scale));
        per_term.push(combine_lags(&term.freq, &sums, limit)?);
    }
    Ok(pairwise_sum(&per_term) / (2.0 * PI * n as f64))
}

/// Composite rule for `int psi(lambda) g(lambda) d lambda` with smooth `g`.
pub(crate) fn smooth_frequency_rule(breakpoints: &[f64], max_lag: usize, degree: usize) -> QuadRule {
    let piece = (PI / 4.0).min(2.0 / (1.0 + max_lag as f64));
    QuadRule::gauss_pieces(-PI, PI, breakpoints, piece, degree)
}

fn freq_lag(freq: &FrequencyPart) -> usize {
    match freq {
        FrequencyPart::Cosine { lag } | FrequencyPart::Sine { lag } => lag.unsigned_abs() as usize,
        _ => 0,
    }
}

pub(crate) fn functional_lag(phi: &SpectralFunctional) -> usize {
    phi.terms.iter().map(|t| freq_lag(&t.freq)).max().unwrap_or(0)
}

pub(crate) fn u_rule(extra_breaks: &[f64], model: &TvArmaModel, taper: &TaperSpec, points: usize) -> QuadRule {
    let mut bps = model.breakpoints();
    bps.extend_from_slice(extra_breaks);
    bps.extend(taper.breakpoints());
    QuadRule::midpoint_pieces(0.0, 1.0, &bps, points)
}

fn theoretical_at(model: &TvArmaModel, taper: &TaperSpec, phi: &SpectralFunctional, quad: QuadConfig) -> f64 {
    let urule = u_rule(&phi.time_breakpoints(), model, taper, quad.u_points);
    let lrule = smooth_frequency_rule(&phi.freq_breakpoints(), functional_lag(phi), quad.freq_degree);
    let vals: Vec<f64> = urule
        .nodes
        .par_iter()
        .map(|&u| {
            let h = taper.eval(u);
            if h == 0.0 {
                return 0.0;
            }
            h * h * lrule.integrate(|lam| phi.eval(u, lam) * model.spectral_density(u, lam))
        })
        .collect();
    let terms: Vec<f64> = vals.iter().zip(&urule.weights).map(|(v, w)| v * w).collect();
    pairwise_sum(&terms)
}

/// `F^{(h)}(phi) = int h(u)^2 int phi(u, lambda) f(u, lambda) d lambda du`.
pub fn theoretical_functional(
    model: &TvArmaModel,
    taper: &TaperSpec,
    phi: &SpectralFunctional,
    quad: QuadConfig,
) -> Result<QuadValue> {
    phi.validate()?;
    model.require_stable()?;
    let value = theoretical_at(model, taper, phi, quad);
    let coarse = theoretical_at(model, taper, phi, quad.coarse());
    Ok(QuadValue { value, error_estimate: (value - coarse).abs() })
}

/// `E_n(phi) = sqrt(n) (F_n(phi) - F(phi))`.
pub fn empirical_process(spectral_mean: f64, target: f64, n: usize) -> f64 {
    (n as f64).sqrt() * (spectral_mean - target)
}

/// Exact covariances `cov(X_s, X_r)`, `1 <= r, s <= n`, of a tvARMA sample
/// from its (truncated) MA(infinity) coefficients.
pub struct ExactCovariance {
    n: usize,
    values: Vec<f64>,
}

impl ExactCovariance {
    pub fn new(model: &TvArmaModel, n: usize) -> Result<Self> {
        model.require_stable()?;
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let jt = model.truncation();
        let coeffs: Vec<Vec<f64>> = (1..=n as i64)
            .into_par_iter()
            .map(|t| transfer_raw(model, t, n, jt + n))
            .collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|s| {
                (0..=s)
                    .map(|r| {
                        let d = s - r;
                        let (a, b) = (&coeffs[s], &coeffs[r]);
                        let terms: Vec<f64> = (0..=jt).map(|j| a[j + d] * b[j]).collect();
                        pairwise_sum(&terms)
                    })
                    .collect()
            })
            .collect();
        let mut values = vec![0.0; n * n];
        for (s, row) in rows.into_iter().enumerate() {
            for (r, v) in row.into_iter().enumerate() {
                values[s * n + r] = v;
                values[r * n + s] = v;
            }
        }
        Ok(ExactCovariance { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `cov(X_s, X_r)` for 1-based indices.
    pub fn get(&self, s: usize, r: usize) -> f64 {
        self.values[(s - 1) * self.n + (r - 1)]
    }

    /// `E F_n(phi) = (1/2 pi n) sum_t sum_k phi_hat(t/n, -k) h_a h_b cov(X_a, X_b)`.
    pub fn expected_spectral_mean(&self, taper: &Taper, phi: &SpectralFunctional) -> Result<f64> {
        phi.validate()?;
        let n = self.n;
        if taper.len() != n {
            return Err(Error::InvalidArgument("taper length does not match n".into()));
        }
        let h = taper.values();
        let mut per_term = Vec::with_capacity(phi.terms.len());
        for term in &phi.terms {
            let w = time_weights(&term.time, n, term.scale);
            let mut sums = vec![0.0; n];
            for t in 1..=n {
                if w[t - 1] == 0.0 {
                    continue;
                }
                for (k, slot) in sums.iter_mut().enumerate() {
                    let (a, b) = lag_pair(t as i64, k as i64);
                    if a > n as i64 || b < 1 {
                        break;
                    }
                    let (a, b) = (a as usize, b as usize);
                    *slot += w[t - 1] * h[a - 1] * h[b - 1] * self.get(a, b);
                }
            }
            per_term.push(combine_lags(&term.freq, &sums, n - 1)?);
        }
        Ok(pairwise_sum(&per_term) / (2.0 * PI * n as f64))
    }
}

/// Exact `E F_n(phi)` for samples of length `n` from `model`.
pub fn expected_spectral_mean(model: &TvArmaModel, taper: &Taper, phi: &SpectralFunctional, n: usize) -> Result<f64> {
    ExactCovariance::new(model, n)?.expected_spectral_mean(taper, phi)
}
