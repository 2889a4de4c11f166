//! Small numerical building blocks shared by the modules: deterministic
//! summation, quadrature rules and polynomial roots.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation with a fixed split pattern, so the result only
/// depends on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}

/// Total variation of a sampled sequence, `sum |x[i+1] - x[i]|`.
pub fn sampled_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Gauss-Legendre nodes/weights on [-1, 1], cached per degree.
fn legendre(deg: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("legendre cache poisoned");
    guard
        .entry(deg)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(deg.max(2)).expect("degree >= 2");
            let mut pairs = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(pairs)
        })
        .clone()
}

/// A one-dimensional quadrature rule: `sum_i w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .collect();
        pairwise_sum_complex(&terms)
    }

    /// Composite Gauss-Legendre on `[a, b]`, split at every breakpoint strictly
    /// inside the interval and further subdivided so no piece exceeds `max_piece`.
    pub fn gauss_pieces(a: f64, b: f64, breakpoints: &[f64], max_piece: f64, degree: usize) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        if b <= a {
            return QuadRule { nodes, weights };
        }
        let base = legendre(degree);
        for (lo, hi) in split_interval(a, b, breakpoints) {
            let len = hi - lo;
            let parts = (len / max_piece).ceil().max(1.0) as usize;
            let h = len / parts as f64;
            for p in 0..parts {
                let s = lo + p as f64 * h;
                let e = if p + 1 == parts { hi } else { s + h };
                let half = 0.5 * (e - s);
                let mid = 0.5 * (e + s);
                for &(x, w) in base.iter() {
                    nodes.push(mid + half * x);
                    weights.push(half * w);
                }
            }
        }
        QuadRule { nodes, weights }
    }

    /// Composite Gauss-Legendre where the node count of each piece adapts to
    /// its length: `ceil(density * len) + extra` nodes, capped by subdivision.
    pub fn gauss_adaptive(a: f64, b: f64, breakpoints: &[f64], density: f64, extra: usize) -> Self {
        const MAX_DEG: usize = 256;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        if b <= a {
            return QuadRule { nodes, weights };
        }
        for (lo, hi) in split_interval(a, b, breakpoints) {
            let len = hi - lo;
            let want = (density * len).ceil() as usize + extra;
            let parts = want.div_ceil(MAX_DEG).max(1);
            let deg = want.div_ceil(parts).max(2);
            let base = legendre(deg);
            let h = len / parts as f64;
            for p in 0..parts {
                let s = lo + p as f64 * h;
                let e = if p + 1 == parts { hi } else { s + h };
                let half = 0.5 * (e - s);
                let mid = 0.5 * (e + s);
                for &(x, w) in base.iter() {
                    nodes.push(mid + half * x);
                    weights.push(half * w);
                }
            }
        }
        QuadRule { nodes, weights }
    }

    /// Composite midpoint rule on `[a, b]` with roughly `total` nodes, split at
    /// breakpoints so no node sits on a jump.
    pub fn midpoint_pieces(a: f64, b: f64, breakpoints: &[f64], total: usize) -> Self {
        let mut nodes = Vec::with_capacity(total + breakpoints.len());
        let mut weights = Vec::with_capacity(total + breakpoints.len());
        let span = b - a;
        if span <= 0.0 {
            return QuadRule { nodes, weights };
        }
        for (lo, hi) in split_interval(a, b, breakpoints) {
            let len = hi - lo;
            let count = ((total as f64) * len / span).round().max(1.0) as usize;
            let h = len / count as f64;
            for i in 0..count {
                nodes.push(lo + (i as f64 + 0.5) * h);
                weights.push(h);
            }
        }
        QuadRule { nodes, weights }
    }

    /// Trapezoid rule on `m` equispaced nodes covering `[-pi, pi]` (both ends).
    pub fn periodic_trapezoid(m: usize) -> Self {
        assert!(m >= 2, "trapezoid needs at least two nodes");
        let h = 2.0 * PI / (m - 1) as f64;
        // last node pinned to pi so band checks see it inside
        let nodes = (0..m).map(|i| if i == m - 1 { PI } else { -PI + i as f64 * h }).collect();
        let weights = (0..m)
            .map(|i| if i == 0 || i == m - 1 { 0.5 * h } else { h })
            .collect();
        QuadRule { nodes, weights }
    }
}

/// Splits `[a, b]` at the sorted, de-duplicated breakpoints lying strictly inside.
pub fn split_interval(a: f64, b: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let eps = 1e-14 * (b - a).abs().max(1.0);
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > a + eps && x < b - eps)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= eps);
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for c in cuts {
        out.push((lo, c));
        lo = c;
    }
    out.push((lo, b));
    out
}

/// Spectral radius of the companion matrix whose first row is `-ar`
/// (subdiagonal of ones). Its eigenvalues are the reciprocals of the roots of
/// `1 + ar[0] z + ... + ar[p-1] z^p`.
pub fn companion_spectral_radius(ar: &[f64]) -> f64 {
    let p = ar.len();
    if p == 0 {
        return 0.0;
    }
    if p == 1 {
        return ar[0].abs();
    }
    let mut m = DMatrix::<f64>::zeros(p, p);
    for (j, a) in ar.iter().enumerate() {
        m[(0, j)] = -a;
    }
    for i in 1..p {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// All complex roots of `c[0] + c[1] x + ... + c[d] x^d`. Leading coefficients
/// that vanish relative to the largest coefficient are trimmed.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    match deg {
        0 => Vec::new(),
        1 => vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)],
        _ => {
            let lead = coeffs[deg];
            let mut m = DMatrix::<f64>::zeros(deg, deg);
            for j in 0..deg {
                m[(0, j)] = -coeffs[deg - 1 - j] / lead;
            }
            for i in 1..deg {
                m[(i, i - 1)] = 1.0;
            }
            m.complex_eigenvalues().iter().copied().collect()
        }
    }
}

/// Real roots of the polynomial lying in the open interval `(a, b)`, sorted.
pub fn poly_real_roots_in(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut roots: Vec<f64> = poly_roots(coeffs)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .filter(|&x| x > a && x < b)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Linear-interpolated quantile of already sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_abs_diff_eq!(pairwise_sum(&xs), 249_750.0, epsilon = 1e-9);
    }

    #[test]
    fn trapezoid_kills_nonzero_frequencies() {
        let rule = QuadRule::periodic_trapezoid(21);
        for k in 1..20 {
            let v = rule.integrate(|l| (l * k as f64).cos());
            assert!(v.abs() < 1e-12, "k={k}: {v}");
        }
        assert_abs_diff_eq!(rule.integrate(|_| 1.0), 2.0 * PI, epsilon = 1e-12);
        // aliasing at k = m - 1
        assert_abs_diff_eq!(rule.integrate(|l| (20.0 * l).cos()), 2.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn gauss_pieces_handles_jumps() {
        let rule = QuadRule::gauss_pieces(0.0, 1.0, &[0.3], 0.25, 8);
        let v = rule.integrate(|u| if u < 0.3 { 1.0 } else { 2.0 });
        assert_abs_diff_eq!(v, 0.3 + 1.4, epsilon = 1e-13);
    }

    #[test]
    fn gauss_adaptive_integrates_oscillation() {
        let rule = QuadRule::gauss_adaptive(-PI, PI, &[0.0], 200.0, 24);
        let v = rule.integrate(|l| (300.0 * l).cos() * (300.0 * l).cos());
        assert_abs_diff_eq!(v, PI, epsilon = 1e-10);
    }

    #[test]
    fn midpoint_respects_breakpoints() {
        let rule = QuadRule::midpoint_pieces(0.0, 1.0, &[0.5], 10);
        assert!(rule.nodes.iter().all(|&x| (x - 0.5).abs() > 1e-3));
        assert_abs_diff_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quadratic_roots() {
        // 1 - 1.6 z + 0.64 z^2 = (1 - 0.8 z)^2
        let roots = poly_roots(&[1.0, -1.6, 0.64]);
        for r in roots {
            assert!((r.norm() - 1.25).abs() < 1e-6);
        }
        assert_abs_diff_eq!(companion_spectral_radius(&[-1.6, 0.64]), 0.8, epsilon = 1e-6);
    }

    #[test]
    fn real_roots_filtered_to_interval() {
        // (x - 0.25)(x - 0.75)(x - 2)
        let c = [-0.375, 2.1875, -3.0, 1.0];
        let r = poly_real_roots_in(&c, 0.0, 1.0);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0], 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(r[1], 0.75, epsilon = 1e-10);
    }

    #[test]
    fn slope_of_power_law() {
        let ns = [1000.0f64, 2000.0, 4000.0, 8000.0];
        let x: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
        let y: Vec<f64> = ns.iter().map(|n| (3.0 * n.powf(-0.4)).ln()).collect();
        assert_abs_diff_eq!(ols_slope(&x, &y), -0.4, epsilon = 1e-12);
    }
}
