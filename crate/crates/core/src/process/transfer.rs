//! MA(infinity) coefficients of a tvARMA model.
//!
//! `Phi_t(m)` is the (1,1) entry of the companion product
//! `A(t/n) A((t-1)/n) ... A((t-m+1)/n)`. Only the first row of the running
//! product is needed, so it is propagated as a row vector.

use serde::{Deserialize, Serialize};

use super::model::TvArmaModel;
use crate::error::{Error, Result};

/// Probe depth used to estimate the geometric envelope constant.
const ENVELOPE_PROBE: usize = 200;
const TRUNCATION_TOL: f64 = 1e-12;
const TRUNCATION_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferCoefficients {
    pub t: i64,
    pub n: usize,
    pub j_max: usize,
    pub coefficients: Vec<f64>,
}

/// `r <- r A(ar)` for the companion matrix with first row `-ar`.
fn step_row(row: &mut [f64], ar: &[f64]) {
    let p = row.len();
    let r0 = row[0];
    for j in 0..p {
        let next = if j + 1 < p { row[j + 1] } else { 0.0 };
        row[j] = -r0 * ar[j] + next;
    }
}

/// `Phi(m)` for `m = 0..=m_max`, with `ar_at(m)` returning the AR coefficients
/// used for the m-th factor (`m >= 1`).
fn phi_sequence(p: usize, m_max: usize, mut ar_at: impl FnMut(usize) -> Vec<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(1.0);
    if p == 0 {
        out.resize(m_max + 1, 0.0);
        return out;
    }
    let mut row = vec![0.0; p];
    row[0] = 1.0;
    for m in 1..=m_max {
        step_row(&mut row, &ar_at(m));
        out.push(row[0]);
    }
    out
}

/// Exact coefficients `a_{t,n}(0..=j_max)` of `X_{t,n} = sum_j a_{t,n}(j) eps_{t-j}`.
pub fn transfer_coefficients(model: &TvArmaModel, t: i64, n: usize, j_max: usize) -> Result<TransferCoefficients> {
    model.require_stable()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(TransferCoefficients { t, n, j_max, coefficients: transfer_raw(model, t, n, j_max) })
}

pub(crate) fn transfer_raw(model: &TvArmaModel, t: i64, n: usize, j_max: usize) -> Vec<f64> {
    let nf = n as f64;
    let time = |s: i64| s as f64 / nf;
    let phi = phi_sequence(model.p(), j_max, |m| model.ar_at(time(t - m as i64 + 1)));
    let q = model.q();
    let betas: Vec<&_> = model.beta_curves().iter().collect();
    (0..=j_max)
        .map(|j| {
            let ji = j as i64;
            let mut acc = 0.0;
            for k in 0..=q.min(j) {
                let bk = if k == 0 { 1.0 } else { betas[k - 1].eval(time(t - ji + k as i64)) };
                acc += phi[j - k] * bk;
            }
            acc * model.sigma_at(time(t - ji))
        })
        .collect()
}

/// Limit coefficients `a(u, j) = sum_k (A(u)^{j-k})_{11} beta_k(u) sigma(u)`.
pub fn limit_transfer(model: &TvArmaModel, u: f64, j_max: usize) -> Vec<f64> {
    let ar = model.ar_at(u);
    let ma = model.ma_at(u);
    let s = model.sigma_at(u);
    let phi = phi_sequence(model.p(), j_max, |_| ar.clone());
    (0..=j_max)
        .map(|j| {
            let mut acc = phi[j];
            for (k, b) in ma.iter().enumerate().take(j) {
                acc += phi[j - k - 1] * b;
            }
            acc * s
        })
        .collect()
}

/// Smallest `j` with `K rho^j < 1e-12`, where `rho = 1/(1 + delta/2)` and `K`
/// is the envelope constant `max_j |a(u, j)| / rho^j` over a probe of the
/// limit coefficients at the validation points.
pub(crate) fn truncation_order(model: &TvArmaModel) -> usize {
    if model.p() == 0 {
        return model.q();
    }
    let rho = 1.0 / (1.0 + 0.5 * model.delta());
    let mut us: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    us.extend(model.breakpoints());
    let mut k_env: f64 = 0.0;
    for u in us {
        let a = limit_transfer(model, u, ENVELOPE_PROBE);
        for (j, v) in a.iter().enumerate() {
            k_env = k_env.max(v.abs() / rho.powi(j as i32));
        }
    }
    // a_{t,n} mixes coefficients from different times; allow a safety factor
    let k_env = 10.0 * k_env.max(1e-300);
    let j = ((TRUNCATION_TOL / k_env).ln() / rho.ln()).ceil();
    (j.max(model.q() as f64) as usize).min(TRUNCATION_CAP)
}

/// `sup_j sum_{t=1}^n |a_{t,n}(j) - a(t/n, j)|`, the finite-n representation
/// gap. Reported as a diagnostic only.
pub fn representation_gap(model: &TvArmaModel, n: usize) -> Result<f64> {
    model.require_stable()?;
    let j_max = model.truncation();
    let mut per_j = vec![0.0; j_max + 1];
    for t in 1..=n as i64 {
        let exact = transfer_raw(model, t, n, j_max);
        let limit = limit_transfer(model, t as f64 / n as f64, j_max);
        for (acc, (a, b)) in per_j.iter_mut().zip(exact.iter().zip(&limit)) {
            *acc += (a - b).abs();
        }
    }
    Ok(per_j.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::curve::CurveSpec;
    use crate::process::model::ModelSpec;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn model(spec: ModelSpec) -> TvArmaModel {
        TvArmaModel::from_spec(&spec).unwrap()
    }

    #[test]
    fn constant_ar1_powers() {
        let m = model(ModelSpec::ar1(0.5, 1.0));
        let tc = transfer_coefficients(&m, 10, 100, 3).unwrap();
        assert_eq!(tc.coefficients, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn pure_ma_has_finite_support() {
        let spec = ModelSpec {
            beta: vec![CurveSpec::Constant { value: 0.4 }],
            sigma: CurveSpec::Polynomial { coefficients: vec![1.0, 1.0] },
            ..ModelSpec::white_noise(1.0)
        };
        let m = model(spec);
        let a = transfer_coefficients(&m, 5, 10, 4).unwrap().coefficients;
        assert_abs_diff_eq!(a[0], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], 0.4 * 1.4, epsilon = 1e-15);
        assert_eq!(&a[2..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn tvar1_second_coefficient() {
        let spec = ModelSpec {
            alpha: vec![CurveSpec::Polynomial { coefficients: vec![-0.3, -0.4] }],
            sigma: CurveSpec::Polynomial { coefficients: vec![1.0, 0.5] },
            ..ModelSpec::white_noise(1.0)
        };
        let m = model(spec);
        let (t, n) = (7i64, 20usize);
        let phi = |s: i64| 0.3 + 0.4 * s as f64 / n as f64;
        let sigma = |s: i64| 1.0 + 0.5 * s as f64 / n as f64;
        let a = transfer_coefficients(&m, t, n, 2).unwrap().coefficients;
        assert_abs_diff_eq!(a[2], phi(t) * phi(t - 1) * sigma(t - 2), epsilon = 1e-15);
    }

    /// Brute-force companion products for a tvARMA(2,1) model.
    #[test]
    fn matches_dense_companion_products() {
        let spec = ModelSpec {
            alpha: vec![
                CurveSpec::Polynomial { coefficients: vec![-0.5, 0.3] },
                CurveSpec::PiecewiseConstant { breakpoints: vec![0.4], values: vec![0.2, 0.1] },
            ],
            beta: vec![CurveSpec::PiecewiseLinear { breakpoints: vec![0.0, 1.0], values: vec![0.3, -0.2] }],
            sigma: CurveSpec::Polynomial { coefficients: vec![1.0, 0.5] },
            ..ModelSpec::white_noise(1.0)
        };
        let m = model(spec);
        let (t, n, jm) = (9i64, 25usize, 12usize);
        let got = transfer_coefficients(&m, t, n, jm).unwrap().coefficients;
        let comp = |s: i64| {
            let ar = m.ar_at(s as f64 / n as f64);
            let mut a = DMatrix::<f64>::zeros(2, 2);
            a[(0, 0)] = -ar[0];
            a[(0, 1)] = -ar[1];
            a[(1, 0)] = 1.0;
            a
        };
        let phi = |mm: usize| {
            let mut prod = DMatrix::<f64>::identity(2, 2);
            for l in 0..mm as i64 {
                prod *= comp(t - l);
            }
            prod[(0, 0)]
        };
        for j in 0..=jm {
            let ji = j as i64;
            let mut want = phi(j);
            if j >= 1 {
                want += phi(j - 1) * m.ma_at((t - ji + 1) as f64 / n as f64)[0];
            }
            want *= m.sigma_at((t - ji) as f64 / n as f64);
            assert_abs_diff_eq!(got[j], want, epsilon = 1e-14);
        }
    }

    /// Plugging the coefficients back into the tvAR(1) recursion:
    /// `a_{t}(j) + alpha(t/n) a_{t-1}(j-1) = sigma(t/n)[j = 0]`.
    #[test]
    fn satisfies_defining_recursion() {
        let spec = ModelSpec {
            alpha: vec![CurveSpec::Polynomial { coefficients: vec![-0.2, -0.6] }],
            sigma: CurveSpec::PiecewiseConstant { breakpoints: vec![0.5], values: vec![1.0, 2.0] },
            ..ModelSpec::white_noise(1.0)
        };
        let m = model(spec);
        let n = 40;
        for t in [1i64, 13, 20, 21, 40] {
            let cur = transfer_raw(&m, t, n, 30);
            let prev = transfer_raw(&m, t - 1, n, 30);
            let alpha = m.ar_at(t as f64 / n as f64)[0];
            assert_abs_diff_eq!(cur[0], m.sigma_at(t as f64 / n as f64), epsilon = 1e-15);
            for j in 1..=30 {
                assert_abs_diff_eq!(cur[j] + alpha * prev[j - 1], 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn truncation_bounds_tail() {
        let m = model(ModelSpec::ar1(0.9, 1.0));
        let j = m.truncation();
        let a = limit_transfer(&m, 0.5, j);
        assert!(a[j].abs() < 1e-12);
        assert!(j < 5000);
    }

    #[test]
    fn constant_model_has_no_representation_gap() {
        let m = model(ModelSpec::ar1(0.5, 1.0));
        assert!(representation_gap(&m, 50).unwrap() < 1e-14);
        let tv = model(ModelSpec {
            alpha: vec![CurveSpec::Polynomial { coefficients: vec![-0.3, -0.4] }],
            ..ModelSpec::white_noise(1.0)
        });
        let g1 = representation_gap(&tv, 50).unwrap();
        let g2 = representation_gap(&tv, 200).unwrap();
        assert!(g1 > 0.0 && g2 <= 1.1 * g1);
    }
}
