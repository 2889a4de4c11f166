use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::family::{FamilyKind, SpectralFamily};
use super::optimize::{minimize_multistart, OptimizerConfig, Outcome};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, QuadRule};
use crate::process::{Sample, TvArmaModel};
use crate::spectral::{classical_periodogram, FrequencyGrid, QuadConfig, TaperSpec};

/// `(1/4pi) [mass int log(4 pi^2 f_theta) + int data / f_theta]` on a fixed rule.
pub(crate) struct Objective<'a> {
    family: &'a SpectralFamily,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    data: Vec<f64>,
    mass: f64,
}

impl<'a> Objective<'a> {
    pub(crate) fn new(family: &'a SpectralFamily, grid: &FrequencyGrid, data: Vec<f64>, mass: f64) -> Self {
        Objective { family, nodes: grid.nodes().to_vec(), weights: grid.weights().to_vec(), data, mass }
    }

    pub(crate) fn value(&self, theta: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.data)
            .map(|((&l, &w), &dv)| {
                let f = self.family.density(theta, l);
                w * (self.mass * (4.0 * PI * PI * f).ln() + dv / f)
            })
            .collect();
        pairwise_sum(&terms) / (4.0 * PI)
    }

    /// `(1/4pi) [mass int grad log f + int data grad f^{-1}]`.
    pub(crate) fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let d = self.family.dim();
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(self.nodes.len()); d];
        for ((&l, &w), &dv) in self.nodes.iter().zip(&self.weights).zip(&self.data) {
            let f = self.family.density(theta, l);
            let g = self.family.grad_log_density(theta, l);
            let c = self.mass - dv / f;
            for (col, gi) in cols.iter_mut().zip(g) {
                col.push(w * c * gi);
            }
        }
        cols.iter().map(|c| pairwise_sum(c) / (4.0 * PI)).collect()
    }

    /// Minimizes over the family box with the variance on the log scale.
    pub(crate) fn fit(&self, starts: &[Vec<f64>], cfg: &OptimizerConfig) -> (Outcome, usize) {
        let d = self.family.dim();
        let to_internal = |theta: &[f64]| {
            let mut x = theta.to_vec();
            x[d - 1] = x[d - 1].ln();
            x
        };
        let from_internal = |x: &[f64]| {
            let mut t = x.to_vec();
            t[d - 1] = t[d - 1].exp();
            t
        };
        let lo = to_internal(self.family.lower());
        let hi = to_internal(self.family.upper());
        let obj = |x: &[f64]| {
            let mut theta = from_internal(x);
            self.family.project(&mut theta);
            let v = self.value(&theta);
            let mut g = self.gradient(&theta);
            g[d - 1] *= theta[d - 1];
            (v, g)
        };
        let internal: Vec<Vec<f64>> = starts.iter().map(|s| to_internal(s)).collect();
        let (mut out, idx) = minimize_multistart(&obj, &internal, &lo, &hi, cfg);
        out.x = from_internal(&out.x);
        self.family.project(&mut out.x);
        (out, idx)
    }
}

fn nonempty(sample: &Sample) -> Result<()> {
    if sample.n() == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    Ok(())
}

fn global_objective<'a>(sample: &Sample, family: &'a SpectralFamily, grid: &FrequencyGrid) -> Result<Objective<'a>> {
    nonempty(sample)?;
    let ip = classical_periodogram(sample, grid)?;
    Ok(Objective::new(family, grid, ip, 1.0))
}

/// Whittle quasi-likelihood of a stationary family. The time average of the
/// pre-periodogram is replaced by the classical periodogram, which is the
/// same function on grids of exactness grade.
pub fn whittle_likelihood(sample: &Sample, family: &SpectralFamily, theta: &[f64], grid: &FrequencyGrid) -> Result<f64> {
    family.check(theta)?;
    Ok(global_objective(sample, family, grid)?.value(theta))
}

pub fn whittle_score(sample: &Sample, family: &SpectralFamily, theta: &[f64], grid: &FrequencyGrid) -> Result<Vec<f64>> {
    family.check(theta)?;
    Ok(global_objective(sample, family, grid)?.gradient(theta))
}

/// `(1/4pi) int_0^1 int [log 4 pi^2 f_theta + f(u, l) / f_theta] dl du`.
pub fn asymptotic_kl(model: &TvArmaModel, family: &SpectralFamily, theta: &[f64], quad: QuadConfig) -> Result<f64> {
    family.check(theta)?;
    let urule = crate::spectral::u_rule_for(model, &TaperSpec::None, quad.u_points);
    let lrule = QuadRule::gauss_pieces(-PI, PI, &[], PI / 8.0, quad.freq_degree);
    let fit: Vec<f64> = lrule.nodes.iter().map(|&l| family.density(theta, l)).collect();
    let log_part: Vec<f64> = fit.iter().zip(&lrule.weights).map(|(f, w)| w * (4.0 * PI * PI * f).ln()).collect();
    let vals: Vec<f64> = urule
        .nodes
        .iter()
        .zip(&urule.weights)
        .map(|(&u, &wu)| {
            let t: Vec<f64> = lrule
                .nodes
                .iter()
                .zip(&lrule.weights)
                .zip(&fit)
                .map(|((&l, &w), &f)| w * model.spectral_density(u, l) / f)
                .collect();
            wu * pairwise_sum(&t)
        })
        .collect();
    Ok((pairwise_sum(&log_part) + pairwise_sum(&vals)) / (4.0 * PI))
}

/// `(1/4pi) int [(1/n) sum_t log f(t/n, l) - int log f(u, l) du] dl` for the
/// model's time-varying spectral density; zero for time-constant models.
pub fn r_log_term(model: &TvArmaModel, n: usize, quad: QuadConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if model.is_time_constant() {
        return Ok(0.0);
    }
    let urule = crate::spectral::u_rule_for(model, &TaperSpec::None, quad.u_points);
    let lrule = QuadRule::gauss_pieces(-PI, PI, &[], PI / 8.0, quad.freq_degree);
    let per_lambda: Vec<f64> = lrule
        .nodes
        .iter()
        .zip(&lrule.weights)
        .map(|(&l, &w)| {
            let riemann: Vec<f64> = (1..=n).map(|t| model.spectral_density(t as f64 / n as f64, l).ln()).collect();
            let integral = urule.integrate(|u| model.spectral_density(u, l).ln());
            w * (pairwise_sum(&riemann) / n as f64 - integral)
        })
        .collect();
    Ok(pairwise_sum(&per_lambda) / (4.0 * PI))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherInformation {
    pub dim: usize,
    /// Row-major.
    pub matrix: Vec<f64>,
    pub min_eigenvalue: f64,
}

/// `I(theta) = (1/4pi) int grad log f grad log f' dl`.
pub fn fisher_information(family: &SpectralFamily, theta: &[f64], quad: QuadConfig) -> Result<FisherInformation> {
    family.check(theta)?;
    let d = family.dim();
    let lrule = QuadRule::gauss_pieces(-PI, PI, &[], PI / 8.0, quad.freq_degree);
    let grads: Vec<Vec<f64>> = lrule.nodes.iter().map(|&l| family.grad_log_density(theta, l)).collect();
    let mut matrix = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let t: Vec<f64> = grads.iter().zip(&lrule.weights).map(|(g, w)| w * g[i] * g[j]).collect();
            let v = pairwise_sum(&t) / (4.0 * PI);
            matrix[i * d + j] = v;
            matrix[j * d + i] = v;
        }
    }
    let min_eigenvalue = DMatrix::from_row_slice(d, d, &matrix)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(FisherInformation { dim: d, matrix, min_eigenvalue })
}

/// Solution of the Yule-Walker equations `Sigma alpha = -c` from
/// covariances `c(0..=p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YuleWalker {
    pub alpha: Vec<f64>,
    pub sigma2: f64,
    pub condition: f64,
}

pub(crate) fn yule_walker_from_cov(c: &[f64], p: usize) -> Result<YuleWalker> {
    if p == 0 {
        return Ok(YuleWalker { alpha: vec![], sigma2: c[0], condition: 1.0 });
    }
    let sigma = DMatrix::from_fn(p, p, |i, j| c[i.abs_diff(j)]);
    let sv = sigma.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= 1e10) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_iterator(p, c[1..=p].iter().map(|v| -v));
    let alpha = sigma
        .lu()
        .solve(&rhs)
        .ok_or(Error::IllConditioned { condition })?;
    let alpha: Vec<f64> = alpha.iter().copied().collect();
    let sigma2 = c[0] + alpha.iter().zip(&c[1..=p]).map(|(a, v)| a * v).sum::<f64>();
    Ok(YuleWalker { alpha, sigma2, condition })
}

/// Result of a global Whittle fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhittleFit {
    pub family: String,
    pub theta: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub boundary: bool,
    /// Index of the winning start.
    pub start: usize,
}

pub(crate) fn starting_points(family: &SpectralFamily, variance: f64, first: Option<Vec<f64>>) -> Vec<Vec<f64>> {
    let d = family.dim();
    let base = family.default_start(variance);
    let shifted = |s: f64| {
        let mut t = base.clone();
        for j in 0..d - 1 {
            t[j] = s * family.upper()[j].min(-family.lower()[j]).max(0.0);
        }
        family.project(&mut t);
        t
    };
    let mut first = first.unwrap_or_else(|| base.clone());
    family.project(&mut first);
    vec![first, shifted(0.3), shifted(-0.3)]
}

/// `arg min L_n(theta)` over the family box.
pub fn fit_whittle(sample: &Sample, family: &SpectralFamily, cfg: &OptimizerConfig) -> Result<WhittleFit> {
    nonempty(sample)?;
    let n = sample.n();
    let grid = match cfg.grid_size {
        Some(m) => FrequencyGrid::new(m)?,
        None => FrequencyGrid::exact_for(n),
    };
    let obj = global_objective(sample, family, &grid)?;
    let x = sample.values();
    let (p, _) = family.kind().orders();
    let gamma: Vec<f64> = (0..=p.min(n - 1))
        .map(|k| pairwise_sum(&(0..n - k).map(|t| x[t] * x[t + k]).collect::<Vec<_>>()) / n as f64)
        .collect();
    let variance = gamma[0].max(family.lower()[family.dim() - 1]);
    let first = match family.kind() {
        FamilyKind::Ar { p } if p < n => yule_walker_from_cov(&gamma, p).ok().map(|yw| {
            let mut t = yw.alpha;
            t.push(yw.sigma2.max(variance * 1e-3));
            t
        }),
        _ => None,
    };
    let starts = starting_points(family, variance, first);
    let (out, start) = obj.fit(&starts, cfg);
    Ok(WhittleFit {
        family: family.kind().tag(),
        theta: out.x,
        value: out.value,
        iterations: out.iterations,
        grad_norm: out.grad_norm,
        converged: out.converged,
        boundary: out.boundary,
        start,
    })
}
