use rand::Rng;

use crate::numeric::{median, ols_slope, pairwise_sum};
use crate::rng::StreamRng;

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample standard deviation with divisor `len - 1`.
pub fn sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / (xs.len() as f64 - 1.0)).sqrt()
}

/// Standardized skewness and excess kurtosis.
pub fn moments(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let c = |p: i32| pairwise_sum(&xs.iter().map(|x| (x - m).powi(p)).collect::<Vec<_>>()) / n;
    let m2 = c(2);
    (c(3) / m2.powf(1.5), c(4) / (m2 * m2) - 3.0)
}

/// Sample covariance matrix (divisor `R - 1`) of the columns of `data`
/// (one row per replication), with the Monte Carlo standard error of each
/// entry estimated from the centered products. Both row-major.
pub fn covariance_matrix(data: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let r = data.len();
    let d = data.first().map_or(0, Vec::len);
    let means: Vec<f64> = (0..d).map(|j| mean(&data.iter().map(|row| row[j]).collect::<Vec<_>>())).collect();
    let mut cov = vec![0.0; d * d];
    let mut se = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let prods: Vec<f64> = data.iter().map(|row| (row[i] - means[i]) * (row[j] - means[j])).collect();
            let c = pairwise_sum(&prods) / (r as f64 - 1.0);
            let s = sd(&prods) / (r as f64).sqrt();
            cov[i * d + j] = c;
            cov[j * d + i] = c;
            se[i * d + j] = s;
            se[j * d + i] = s;
        }
    }
    (cov, se)
}

/// Log-log slope of median error against `n` and a percentile bootstrap
/// interval from resampling replications within each `n`.
pub fn bootstrap_slope_ci(ns: &[usize], errors: &[Vec<f64>], resamples: usize, rng: &mut StreamRng) -> (f64, f64, f64) {
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| median(e).ln()).collect();
    let slope = ols_slope(&x, &y);
    let mut boots: Vec<f64> = (0..resamples)
        .map(|_| {
            let yb: Vec<f64> = errors
                .iter()
                .map(|e| {
                    let draw: Vec<f64> = (0..e.len()).map(|_| e[rng.gen_range(0..e.len())]).collect();
                    median(&draw).ln()
                })
                .collect();
            ols_slope(&x, &yb)
        })
        .collect();
    boots.sort_by(f64::total_cmp);
    let lo = crate::numeric::quantile_sorted(&boots, 0.025);
    let hi = crate::numeric::quantile_sorted(&boots, 0.975);
    (slope, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert_abs_diff_eq!(sd(&xs), (5.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        let (skew, _) = moments(&xs);
        assert_abs_diff_eq!(skew, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn covariance_of_identical_columns() {
        let data: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64]).collect();
        let (cov, _) = covariance_matrix(&data);
        assert_abs_diff_eq!(cov[1], cov[0], epsilon = 1e-12);
        assert_abs_diff_eq!(cov[0], 55.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_power_law_slope() {
        let ns = [1000usize, 2000, 4000, 8000];
        let errors: Vec<Vec<f64>> = ns.iter().map(|&n| vec![3.0 * (n as f64).powf(-0.4); 5]).collect();
        let mut rng = crate::rng::stream_rng(1, 0);
        let (s, lo, hi) = bootstrap_slope_ci(&ns, &errors, 50, &mut rng);
        assert!((s + 0.4).abs() < 1e-12);
        assert!((lo + 0.4).abs() < 1e-12 && (hi + 0.4).abs() < 1e-12);
    }
}
