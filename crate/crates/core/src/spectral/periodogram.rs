use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::FrequencyGrid;
use super::taper::Taper;
use crate::error::{Error, Result};
use crate::process::Sample;

/// 1-based indices `([t + 1/2 + k/2], [t + 1/2 - k/2])` with `[.]` the floor.
pub fn lag_pair(t: i64, k: i64) -> (i64, i64) {
    (t + (k + 1).div_euclid(2), t + (1 - k).div_euclid(2))
}

/// Lag products `X_{plus} X_{minus}` at time `t` for `k = 0, 1, ...` while
/// both indices stay inside `1..=n`. The products are symmetric in `k`.
pub fn lag_products(x: &[f64], t: usize) -> Vec<f64> {
    let n = x.len() as i64;
    let mut out = Vec::new();
    for k in 0.. {
        let (a, b) = lag_pair(t as i64, k);
        if a > n || b < 1 {
            break;
        }
        out.push(x[(a - 1) as usize] * x[(b - 1) as usize]);
    }
    out
}

/// Sum over `t` of `w_t P_t(k)` for every lag `k >= 0`.
pub(crate) fn weighted_lag_sums(x: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut sums = vec![0.0; n];
    for t in 1..=n {
        let w = weights[t - 1];
        if w == 0.0 {
            continue;
        }
        for (k, p) in lag_products(x, t).into_iter().enumerate() {
            sums[k] += w * p;
        }
    }
    sums
}

/// `(1/2pi) [P(0) + 2 sum_k P(k) cos(k lambda)]` at arbitrary frequencies.
pub(crate) fn eval_symmetric_series(products: &[f64], lambdas: &[f64]) -> Vec<f64> {
    lambdas
        .iter()
        .map(|&lam| {
            // Clenshaw recurrence for the cosine series
            let c = 2.0 * lam.cos();
            let (mut b1, mut b2) = (0.0, 0.0);
            for &p in products.iter().skip(1).rev() {
                let b0 = 2.0 * p + c * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            let tail = b1 * lam.cos() - b2;
            let p0 = products.first().copied().unwrap_or(0.0);
            (p0 + tail) / (2.0 * PI)
        })
        .collect()
}

fn check_t(t: usize, n: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::InvalidArgument(format!("time index t = {t} outside 1..={n}")));
    }
    Ok(())
}

/// Tapered pre-periodogram `J_n(t/n, lambda)` on the grid nodes.
///
/// Both signs of `k` are summed explicitly; the imaginary part must cancel
/// to `1e-10` relative to the absolute mass of the lag products.
pub fn pre_periodogram(sample: &Sample, taper: &Taper, t: usize, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    let n = sample.n();
    check_t(t, n)?;
    let xh = taper.apply(sample.values())?;
    let ni = n as i64;
    let mut terms: Vec<(i64, f64)> = Vec::new();
    for k in -(ni - 1)..=(ni - 1) {
        let (a, b) = lag_pair(t as i64, k);
        if a >= 1 && a <= ni && b >= 1 && b <= ni {
            terms.push((k, xh[(a - 1) as usize] * xh[(b - 1) as usize]));
        }
    }
    let mass: f64 = terms.iter().map(|(_, p)| p.abs()).sum();
    let tol = 1e-10 * mass.max(1.0);
    grid.nodes()
        .iter()
        .map(|&lam| {
            let step = Complex64::from_polar(1.0, -lam);
            let k0 = terms.first().map_or(0, |(k, _)| *k);
            let mut rot = Complex64::from_polar(1.0, -lam * k0 as f64);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(_, p) in &terms {
                acc += rot * p;
                rot *= step;
            }
            if acc.im.abs() > tol {
                return Err(Error::Numerical(format!(
                    "pre-periodogram imaginary part {:.3e} exceeds tolerance at t = {t}, lambda = {lam}",
                    acc.im
                )));
            }
            Ok(acc.re / (2.0 * PI))
        })
        .collect()
}

/// `J_n(t/n, .)` for every `t = 1..n` on the grid, computed with one FFT per `t`.
pub fn pre_periodogram_all(sample: &Sample, taper: &Taper, grid: &FrequencyGrid) -> Result<Vec<Vec<f64>>> {
    let xh = taper.apply(sample.values())?;
    let n = xh.len();
    Ok((1..=n)
        .into_par_iter()
        .map(|t| {
            let p = lag_products(&xh, t);
            let kk = p.len() as i64 - 1;
            let coeffs: Vec<Complex64> = (-kk..=kk)
                .map(|k| Complex64::new(p[k.unsigned_abs() as usize], 0.0))
                .collect();
            grid.eval_series(-kk, &coeffs).into_iter().map(|z| z.re / (2.0 * PI)).collect()
        })
        .collect())
}

/// `I_n(lambda) = |sum_s X_s e^{-i lambda s}|^2 / (2 pi n)` on the grid nodes.
pub fn classical_periodogram(sample: &Sample, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    let n = sample.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let coeffs: Vec<Complex64> = sample.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(grid
        .eval_series(1, &coeffs)
        .into_iter()
        .map(|z| z.norm_sqr() / (2.0 * PI * n as f64))
        .collect())
}

/// `max_lambda |(1/n) sum_t J_n(t/n, lambda) - I_n(lambda)|` for an untapered sample.
pub fn periodogram_identity_gap(sample: &Sample, grid: &FrequencyGrid) -> Result<f64> {
    let n = sample.n();
    let taper = Taper::none(n);
    let per_t: Vec<Vec<f64>> = (1..=n)
        .into_par_iter()
        .map(|t| pre_periodogram(sample, &taper, t, grid))
        .collect::<Result<_>>()?;
    let ip = classical_periodogram(sample, grid)?;
    let mut gap: f64 = 0.0;
    for (m, i_val) in ip.iter().enumerate() {
        let col: Vec<f64> = per_t.iter().map(|row| row[m]).collect();
        let avg = crate::numeric::pairwise_sum(&col) / n as f64;
        gap = gap.max((avg - i_val).abs());
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(v: &[f64]) -> Sample {
        Sample::from_values(v.to_vec())
    }

    #[test]
    fn floor_index_rule() {
        assert_eq!(lag_pair(1, 0), (1, 1));
        assert_eq!(lag_pair(1, 1), (2, 1));
        assert_eq!(lag_pair(1, -1), (1, 2));
        assert_eq!(lag_pair(1, 2), (2, 0));
        assert_eq!(lag_pair(5, 3), (7, 4));
        assert_eq!(lag_pair(5, -3), (4, 7));
    }

    #[test]
    fn single_observation() {
        let s = sample(&[3.0]);
        let g = FrequencyGrid::exact_for(1);
        for v in pre_periodogram(&s, &Taper::none(1), 1, &g).unwrap() {
            assert_abs_diff_eq!(v, 9.0 / (2.0 * PI), epsilon = 1e-14);
        }
        for v in classical_periodogram(&s, &g).unwrap() {
            assert_abs_diff_eq!(v, 9.0 / (2.0 * PI), epsilon = 1e-14);
        }
    }

    /// Hand enumeration for n = 2: J_1 = (x1^2 + 2 x1 x2 cos) / 2pi, J_2 = x2^2 / 2pi.
    #[test]
    fn two_observations_by_enumeration() {
        let (x1, x2) = (1.3, -0.7);
        let s = sample(&[x1, x2]);
        let g = FrequencyGrid::exact_for(2);
        let j1 = pre_periodogram(&s, &Taper::none(2), 1, &g).unwrap();
        let j2 = pre_periodogram(&s, &Taper::none(2), 2, &g).unwrap();
        for (m, &lam) in g.nodes().iter().enumerate() {
            assert_abs_diff_eq!(j1[m], (x1 * x1 + 2.0 * x1 * x2 * lam.cos()) / (2.0 * PI), epsilon = 1e-14);
            assert_abs_diff_eq!(j2[m], x2 * x2 / (2.0 * PI), epsilon = 1e-14);
        }
    }

    #[test]
    fn alternating_sample_at_pi() {
        let s = sample(&[1.0, -1.0, 1.0, -1.0]);
        let g = FrequencyGrid::exact_for(4);
        let ip = classical_periodogram(&s, &g).unwrap();
        assert_abs_diff_eq!(ip[g.m() - 1], 4.0 / (2.0 * PI), epsilon = 1e-13);
        assert_abs_diff_eq!(ip[0], 4.0 / (2.0 * PI), epsilon = 1e-13);
        let zero = classical_periodogram(&sample(&[0.0; 5]), &g).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fft_and_direct_pre_periodogram_agree() {
        let x: Vec<f64> = (0..13).map(|i| ((i * 7 % 11) as f64 - 5.0) * 0.3).collect();
        let s = sample(&x);
        let g = FrequencyGrid::exact_for(13);
        let all = pre_periodogram_all(&s, &Taper::none(13), &g).unwrap();
        for t in 1..=13 {
            let direct = pre_periodogram(&s, &Taper::none(13), t, &g).unwrap();
            let clenshaw = eval_symmetric_series(&lag_products(&x, t), g.nodes());
            for m in 0..g.m() {
                assert_abs_diff_eq!(all[t - 1][m], direct[m], epsilon = 1e-12);
                assert_abs_diff_eq!(clenshaw[m], direct[m], epsilon = 1e-12);
            }
        }
        assert!(periodogram_identity_gap(&s, &g).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_bad_time_index() {
        let s = sample(&[1.0, 2.0]);
        let g = FrequencyGrid::exact_for(2);
        assert!(pre_periodogram(&s, &Taper::none(2), 0, &g).is_err());
        assert!(pre_periodogram(&s, &Taper::none(2), 3, &g).is_err());
    }
}
