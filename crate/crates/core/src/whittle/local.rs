use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{FamilyKind, SpectralFamily};
use super::likelihood::{starting_points, yule_walker_from_cov, Objective};
use super::optimize::OptimizerConfig;
use crate::error::{Error, Result};
use crate::kernel::SmoothingKernel;
use crate::numeric::pairwise_sum;
use crate::process::Sample;
use crate::spectral::{lag_pair, weighted_lag_sums, FrequencyGrid};

/// `b = n^{-1/5}`.
pub fn default_bandwidth(n: usize) -> f64 {
    (n as f64).powf(-0.2)
}

/// Bandwidth given explicitly or as `"auto"` for `n^{-1/5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum Bandwidth {
    #[default]
    #[serde(with = "auto_tag")]
    Auto,
    Value(f64),
}

mod auto_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"auto\" or a number, got {s:?}")))
        }
    }
}

impl Bandwidth {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Bandwidth::Auto => default_bandwidth(n),
            Bandwidth::Value(b) => b,
        }
    }
}

/// `count` equally spaced points spanning `[b/2, 1 - b/2]`.
pub fn band_grid(b: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = (b / 2.0, 1.0 - b / 2.0);
    match count {
        0 => vec![],
        1 => vec![0.5],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn check_band(u: f64, b: f64) -> Result<()> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::InvalidArgument(format!("bandwidth {b} outside (0, 1]")));
    }
    let (lo, hi) = (b / 2.0, 1.0 - b / 2.0);
    let eps = 1e-12;
    if !(u >= lo - eps && u <= hi + eps) {
        return Err(Error::OutOfBand { u, lo, hi, bandwidth: b });
    }
    Ok(())
}

/// `(1/b) K((u - t/n) / b)` for `t = 1..=n`.
pub fn local_weights(n: usize, kernel: SmoothingKernel, b: f64, u: f64) -> Vec<f64> {
    (1..=n).map(|t| kernel.eval((u - t as f64 / n as f64) / b) / b).collect()
}

fn window(weights: &[f64]) -> std::ops::Range<usize> {
    let first = weights.iter().position(|w| *w != 0.0).unwrap_or(weights.len());
    let last = weights.iter().rposition(|w| *w != 0.0).map_or(first, |i| i + 1);
    first..last
}

/// `c_hat(u, k) = (1/n) sum_t (1/b) K((u - t/n)/b) X_{[t+1/2+k/2]} X_{[t+1/2-k/2]}`,
/// with pairs outside `1..=n` dropped.
pub fn local_covariance(sample: &Sample, kernel: SmoothingKernel, b: f64, u: f64, k: i64) -> Result<f64> {
    Ok(local_covariances(sample, kernel, b, u, k.unsigned_abs() as usize)?[k.unsigned_abs() as usize])
}

/// `c_hat(u, k)` for `k = 0..=max_lag`.
pub fn local_covariances(sample: &Sample, kernel: SmoothingKernel, b: f64, u: f64, max_lag: usize) -> Result<Vec<f64>> {
    check_band(u, b)?;
    let n = sample.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let x = sample.values();
    let w = local_weights(n, kernel, b, u);
    let range = window(&w);
    Ok((0..=max_lag as i64)
        .map(|k| {
            let terms: Vec<f64> = range
                .clone()
                .filter_map(|i| {
                    let t = i as i64 + 1;
                    let (a, c) = lag_pair(t, k);
                    (a <= n as i64 && c >= 1).then(|| w[i] * x[(a - 1) as usize] * x[(c - 1) as usize])
                })
                .collect();
            pairwise_sum(&terms) / n as f64
        })
        .collect())
}

/// Local Yule-Walker estimate at one rescaled time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalYuleWalker {
    pub u: f64,
    pub alpha: Vec<f64>,
    pub sigma2: f64,
    pub condition: f64,
    /// Set when the closed-form variance is negative; the value is kept.
    pub negative_variance: bool,
    /// `(1/n) sum_t (1/b) K((u - t/n)/b)`.
    pub kernel_mass: f64,
}

/// `alpha_hat = -Sigma^{-1} C` and `sigma2_hat = c(0) + sum_k alpha_hat_k c(k)`.
pub fn local_yule_walker(sample: &Sample, p: usize, kernel: SmoothingKernel, b: f64, u: f64) -> Result<LocalYuleWalker> {
    let c = local_covariances(sample, kernel, b, u, p)?;
    let yw = yule_walker_from_cov(&c, p)?;
    let n = sample.n();
    let kernel_mass = pairwise_sum(&local_weights(n, kernel, b, u)) / n as f64;
    Ok(LocalYuleWalker {
        u,
        negative_variance: yw.sigma2 < 0.0,
        alpha: yw.alpha,
        sigma2: yw.sigma2,
        condition: yw.condition,
        kernel_mass,
    })
}

/// Kernel-smoothed pre-periodogram `(1/n) sum_t (1/b) K(.) J_n(t/n, l)` on the
/// grid and the kernel mass.
fn local_data(sample: &Sample, kernel: SmoothingKernel, b: f64, u: f64, grid: &FrequencyGrid) -> Result<(Vec<f64>, f64)> {
    check_band(u, b)?;
    let n = sample.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let w = local_weights(n, kernel, b, u);
    let c: Vec<Complex64> = weighted_lag_sums(sample.values(), &w)
        .into_iter()
        .map(|v| Complex64::new(v / n as f64, 0.0))
        .collect();
    let c0 = c[0].re;
    let data = grid.eval_series(0, &c).into_iter().map(|z| (2.0 * z.re - c0) / (2.0 * PI)).collect();
    Ok((data, pairwise_sum(&w) / n as f64))
}

/// `L_n(u, theta) = (1/4pi)(1/n) sum_t (1/b) K((u - t/n)/b) int [log 4pi^2 f_theta + J_n(t/n, l)/f_theta] dl`.
#[allow(clippy::too_many_arguments)]
pub fn local_whittle_likelihood(
    sample: &Sample,
    family: &SpectralFamily,
    kernel: SmoothingKernel,
    b: f64,
    u: f64,
    theta: &[f64],
    grid: &FrequencyGrid,
) -> Result<f64> {
    family.check(theta)?;
    let (data, mass) = local_data(sample, kernel, b, u, grid)?;
    Ok(Objective::new(family, grid, data, mass).value(theta))
}

/// Fit diagnostics at one point of the u-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub u: f64,
    pub theta: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub boundary: bool,
    /// Closed-form local Yule-Walker solution `(alpha, sigma2 / kernel_mass)`
    /// for autoregressive families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yule_walker: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFitResult {
    pub family: String,
    pub bandwidth: f64,
    pub kernel: SmoothingKernel,
    pub points: Vec<LocalPoint>,
}

impl LocalFitResult {
    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

fn fit_point(
    sample: &Sample,
    family: &SpectralFamily,
    kernel: SmoothingKernel,
    b: f64,
    u: f64,
    grid: &FrequencyGrid,
    cfg: &OptimizerConfig,
    previous: Option<&[f64]>,
) -> Result<LocalPoint> {
    let (data, mass) = local_data(sample, kernel, b, u, grid)?;
    let d = family.dim();
    let yule_walker = match family.kind() {
        FamilyKind::Ar { p } => local_yule_walker(sample, p, kernel, b, u).ok().map(|yw| {
            let mut t = yw.alpha;
            t.push(yw.sigma2 / mass);
            t
        }),
        _ => None,
    };
    let c0 = pairwise_sum(&data) * 2.0 * PI / data.len() as f64;
    let variance = (c0 / mass).max(family.lower()[d - 1]);
    let first = yule_walker.clone().filter(|t| t[d - 1] > 0.0);
    let mut starts = starting_points(family, variance, first);
    if let Some(prev) = previous {
        starts.insert(0, prev.to_vec());
    }
    let obj = Objective::new(family, grid, data, mass);
    let (out, _) = obj.fit(&starts, cfg);
    Ok(LocalPoint {
        u,
        theta: out.x,
        value: out.value,
        iterations: out.iterations,
        grad_norm: out.grad_norm,
        converged: out.converged,
        boundary: out.boundary,
        yule_walker,
    })
}

/// `theta_hat(u) = arg min L_n(u, theta)` at every point of `u_grid`.
///
/// With `warm_start` the points are fitted in order and each previous
/// solution is added as a starting point; otherwise they run in parallel.
pub fn fit_local_whittle(
    sample: &Sample,
    family: &SpectralFamily,
    kernel: SmoothingKernel,
    b: f64,
    u_grid: &[f64],
    cfg: &OptimizerConfig,
    warm_start: bool,
) -> Result<LocalFitResult> {
    let n = sample.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    for &u in u_grid {
        check_band(u, b)?;
    }
    let grid = match cfg.grid_size {
        Some(m) => FrequencyGrid::new(m)?,
        None => FrequencyGrid::exact_for(n),
    };
    let points = if warm_start {
        let mut pts: Vec<LocalPoint> = Vec::with_capacity(u_grid.len());
        for &u in u_grid {
            let prev = pts.last().map(|p| p.theta.clone());
            pts.push(fit_point(sample, family, kernel, b, u, &grid, cfg, prev.as_deref())?);
        }
        pts
    } else {
        u_grid
            .par_iter()
            .map(|&u| fit_point(sample, family, kernel, b, u, &grid, cfg, None))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(LocalFitResult { family: family.kind().tag(), bandwidth: b, kernel, points })
}

/// Local Yule-Walker estimates along a u-grid.
pub fn local_yule_walker_curve(
    sample: &Sample,
    p: usize,
    kernel: SmoothingKernel,
    b: f64,
    u_grid: &[f64],
) -> Result<Vec<LocalYuleWalker>> {
    u_grid.iter().map(|&u| local_yule_walker(sample, p, kernel, b, u)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{simulate, CurveSpec, ModelSpec, TvArmaModel};
    use crate::whittle::whittle_likelihood;
    use approx::assert_abs_diff_eq;

    fn alternating(n: usize) -> Sample {
        Sample::from_values((0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect())
    }

    #[test]
    fn full_window_uniform_is_scaled_mean_square() {
        let s = simulate(&TvArmaModel::from_spec(&ModelSpec::ar1(0.3, 1.0)).unwrap(), 50, 1, None).unwrap();
        let c0 = local_covariance(&s, SmoothingKernel::Uniform, 1.0, 0.5, 0).unwrap();
        let ms = s.values().iter().map(|v| v * v).sum::<f64>() / 50.0;
        assert_abs_diff_eq!(c0, ms, epsilon = 1e-14);
    }

    #[test]
    fn alternating_sample() {
        let s = alternating(400);
        let c = local_covariances(&s, SmoothingKernel::Uniform, 0.5, 0.5, 1).unwrap();
        assert!(c[1] < 0.0);
        assert!((c[1] / c[0] + 1.0).abs() < 0.01);
        let yw = local_yule_walker(&s, 1, SmoothingKernel::Uniform, 0.5, 0.5).unwrap();
        assert!((yw.alpha[0] - 1.0).abs() < 0.01);
    }

    #[test]
    fn zero_sample_and_band() {
        let z = Sample::from_values(vec![0.0; 30]);
        assert_eq!(local_covariance(&z, SmoothingKernel::Epanechnikov, 0.4, 0.5, 2).unwrap(), 0.0);
        assert!(matches!(
            local_covariance(&z, SmoothingKernel::Epanechnikov, 0.4, 0.1, 0),
            Err(Error::OutOfBand { .. })
        ));
        assert!(matches!(
            local_yule_walker(&z, 1, SmoothingKernel::Epanechnikov, 0.4, 0.5),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn full_window_reduces_to_global() {
        let s = simulate(&TvArmaModel::from_spec(&ModelSpec::ar1(0.3, 1.0)).unwrap(), 64, 2, None).unwrap();
        let fam = SpectralFamily::of(FamilyKind::Ar { p: 2 });
        let grid = FrequencyGrid::exact_for(64);
        let theta = [-0.2, 0.1, 1.3];
        let local = local_whittle_likelihood(&s, &fam, SmoothingKernel::Uniform, 1.0, 0.5, &theta, &grid).unwrap();
        let global = whittle_likelihood(&s, &fam, &theta, &grid).unwrap();
        assert_abs_diff_eq!(local, global, epsilon = 1e-12);
    }

    #[test]
    fn optimizer_matches_yule_walker() {
        let spec = ModelSpec {
            alpha: vec![CurveSpec::Polynomial { coefficients: vec![-0.2, -0.4] }],
            ..ModelSpec::ar1(0.0, 1.0)
        };
        let model = TvArmaModel::from_spec(&spec).unwrap();
        let s = simulate(&model, 800, 5, None).unwrap();
        let b = default_bandwidth(800);
        let fam = SpectralFamily::of(FamilyKind::Ar { p: 1 });
        let fit = fit_local_whittle(&s, &fam, SmoothingKernel::Epanechnikov, b, &band_grid(b, 5), &OptimizerConfig::default(), true)
            .unwrap();
        for pt in &fit.points {
            assert!(pt.converged);
            let yw = pt.yule_walker.as_ref().unwrap();
            for (a, c) in pt.theta.iter().zip(yw) {
                assert!((a - c).abs() < 1e-6, "{:?} vs {:?}", pt.theta, yw);
            }
        }
    }

    #[test]
    fn white_noise_local_minimizer() {
        let s = simulate(&TvArmaModel::from_spec(&ModelSpec::white_noise(1.0)).unwrap(), 300, 3, None).unwrap();
        let fam = SpectralFamily::of(FamilyKind::WhiteNoise);
        let (k, b, u) = (SmoothingKernel::Triangular, 0.3, 0.4);
        let fit = fit_local_whittle(&s, &fam, k, b, &[u], &OptimizerConfig::default(), false).unwrap();
        let c0 = local_covariance(&s, k, b, u, 0).unwrap();
        let mass = pairwise_sum(&local_weights(300, k, b, u)) / 300.0;
        assert_abs_diff_eq!(fit.points[0].theta[0], c0 / mass, epsilon = 1e-9);
    }

    #[test]
    fn bandwidth_serde() {
        let b: Bandwidth = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(b, Bandwidth::Auto);
        let b: Bandwidth = serde_json::from_str("0.25").unwrap();
        assert_eq!(b.resolve(10), 0.25);
        assert_eq!(serde_json::to_string(&Bandwidth::Auto).unwrap(), "\"auto\"");
    }
}
