use serde::{Deserialize, Serialize};

fn default_max_iter() -> usize {
    500
}

fn default_gtol() -> f64 {
    1e-10
}

fn default_multistart() -> bool {
    true
}

/// Settings of the box-constrained quasi-Newton minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Tolerance on the sup norm of the projected gradient. The variance
    /// coordinate is measured on the log scale.
    #[serde(default = "default_gtol")]
    pub gtol: f64,
    /// Run from three starting points and keep the best.
    #[serde(default = "default_multistart")]
    pub multistart: bool,
    /// Frequency grid size; `None` uses the exactness grade `2n + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { max_iter: default_max_iter(), gtol: default_gtol(), multistart: true, grid_size: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub boundary: bool,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(*l, *h);
    }
}

fn projected_gradient_norm(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    x.iter()
        .zip(g)
        .zip(lo.iter().zip(hi))
        .map(|((xi, gi), (l, h))| ((xi - gi).clamp(*l, *h) - xi).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Projected BFGS with backtracking along the projected path.
pub(crate) fn minimize<F>(obj: &F, x0: &[f64], lo: &[f64], hi: &[f64], cfg: &OptimizerConfig) -> Outcome
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let d = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let (mut f, mut g) = obj(&x);
    let identity = |scale: f64| {
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            h[i * d + i] = scale;
        }
        h
    };
    let mut h = identity(1.0);
    let mut fresh = true;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        if !f.is_finite() {
            break;
        }
        if projected_gradient_norm(&x, &g, lo, hi) < cfg.gtol {
            converged = true;
            break;
        }
        iterations += 1;
        let active: Vec<bool> = (0..d)
            .map(|i| (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0))
            .collect();
        let mut dir = vec![0.0; d];
        for i in 0..d {
            if active[i] {
                continue;
            }
            dir[i] = -(0..d).filter(|&j| !active[j]).map(|j| h[i * d + j] * g[j]).sum::<f64>();
        }
        if dot(&dir, &g) >= 0.0 {
            h = identity(1.0);
            fresh = true;
            dir = (0..d).map(|i| if active[i] { 0.0 } else { -g[i] }).collect();
        }
        let slack = 4.0 * f64::EPSILON * f.abs();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            project(&mut xn, lo, hi);
            let delta: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &delta);
            let (fn_, gn) = obj(&xn);
            if fn_.is_finite() && fn_ <= f + 1e-4 * decrease + slack {
                accepted = Some((xn, fn_, gn, delta));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn, s)) = accepted else {
            if fresh {
                break;
            }
            h = identity(1.0);
            fresh = true;
            continue;
        };
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                h = identity(sy / dot(&y, &y));
            }
            let hy: Vec<f64> = (0..d).map(|i| (0..d).map(|j| h[i * d + j] * y[j]).sum()).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..d {
                for j in 0..d {
                    h[i * d + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
        let stalled = s.iter().all(|v| v.abs() <= 1e-15 * (1.0 + v.abs()));
        x = xn;
        f = fn_;
        g = gn;
        if stalled {
            break;
        }
    }
    let grad_norm = projected_gradient_norm(&x, &g, lo, hi);
    converged |= grad_norm < cfg.gtol;
    let boundary = x.iter().zip(lo.iter().zip(hi)).any(|(v, (l, h))| v <= l || v >= h);
    Outcome { x, value: f, iterations, grad_norm, converged, boundary }
}

/// Runs [`minimize`] from every start and keeps the lowest value; ties go to
/// the earliest start.
pub(crate) fn minimize_multistart<F>(
    obj: &F,
    starts: &[Vec<f64>],
    lo: &[f64],
    hi: &[f64],
    cfg: &OptimizerConfig,
) -> (Outcome, usize)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let used = if cfg.multistart { starts.len() } else { 1 };
    let mut best: Option<(Outcome, usize)> = None;
    for (i, s) in starts.iter().take(used).enumerate() {
        let out = minimize(obj, s, lo, hi, cfg);
        let better = match &best {
            None => true,
            Some((b, _)) => out.value < b.value || (!b.value.is_finite() && out.value.is_finite()),
        };
        if better {
            best = Some((out, i));
        }
    }
    best.expect("at least one start")
}
