use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::model::{Innovation, ModelSpec, TvArmaModel};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamRng};

/// An observed or simulated series `X_1..X_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
}

impl Sample {
    pub fn from_values(values: Vec<f64>) -> Self {
        Sample { values, seed: None, stream: 0, burn_in: 0, model: None }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn default_burn_in(model: &TvArmaModel) -> usize {
    500 + 10 * model.p()
}

fn draw(rng: &mut StreamRng, innovation: Innovation) -> f64 {
    match innovation {
        Innovation::Gaussian => rng.sample(StandardNormal),
        Innovation::StandardizedUniform => {
            let h = 3f64.sqrt();
            rng.gen_range(-h..h)
        }
    }
}

/// Simulates `X_{1..n}` on random stream 0 of `seed`.
pub fn simulate(model: &TvArmaModel, n: usize, seed: u64, burn_in: Option<usize>) -> Result<Sample> {
    simulate_stream(model, n, seed, 0, burn_in)
}

/// Runs the recursion from `t = 1 - burn_in` with zero initial values and
/// curves frozen at their `u = 0` values for `t <= 0`.
pub fn simulate_stream(
    model: &TvArmaModel,
    n: usize,
    seed: u64,
    stream: u64,
    burn_in: Option<usize>,
) -> Result<Sample> {
    model.require_stable()?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample length n must be positive".into()));
    }
    let burn = burn_in.unwrap_or_else(|| default_burn_in(model));
    let (p, q) = (model.p(), model.q());
    let total = burn + n;
    let mut rng = stream_rng(seed, stream);
    let eps: Vec<f64> = (0..total).map(|_| draw(&mut rng, model.innovation())).collect();

    let nf = n as f64;
    let start = 1 - burn as i64;
    let time = |idx: usize| (start + idx as i64) as f64 / nf;
    let sigmas: Vec<f64> = (0..total).map(|i| model.sigma_at(time(i))).collect();
    let mut x = vec![0.0; total];
    for i in 0..total {
        let u = time(i);
        let mut v = sigmas[i] * eps[i];
        if q > 0 {
            let ma = model.ma_at(u);
            for k in 1..=q.min(i) {
                v += ma[k - 1] * sigmas[i - k] * eps[i - k];
            }
        }
        if p > 0 {
            let ar = model.ar_at(u);
            for j in 1..=p.min(i) {
                v -= ar[j - 1] * x[i - j];
            }
        }
        x[i] = v;
    }
    Ok(Sample {
        values: x.split_off(burn),
        seed: Some(seed),
        stream,
        burn_in: burn,
        model: Some(model.to_spec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::curve::CurveSpec;

    #[test]
    fn white_noise_is_the_innovation_stream() {
        let m = TvArmaModel::from_spec(&ModelSpec::white_noise(1.0)).unwrap();
        let s = simulate(&m, 5, 11, Some(0)).unwrap();
        let mut rng = stream_rng(11, 0);
        let want: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
        assert_eq!(s.values, want);
    }

    #[test]
    fn deterministic_per_seed_and_stream() {
        let m = TvArmaModel::from_spec(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        let a = simulate(&m, 200, 3, None).unwrap();
        let b = simulate(&m, 200, 3, None).unwrap();
        let c = simulate_stream(&m, 200, 3, 1, None).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
        assert_eq!(a.burn_in, 510);
    }

    #[test]
    fn recursion_holds_exactly() {
        let spec = ModelSpec {
            alpha: vec![
                CurveSpec::Polynomial { coefficients: vec![-0.4, -0.3] },
                CurveSpec::Constant { value: 0.1 },
            ],
            beta: vec![CurveSpec::Constant { value: 0.5 }],
            sigma: CurveSpec::PiecewiseConstant { breakpoints: vec![0.5], values: vec![1.0, 2.0] },
            ..ModelSpec::white_noise(1.0)
        };
        let m = TvArmaModel::from_spec(&spec).unwrap();
        let n = 50;
        let s = simulate(&m, n, 9, Some(100)).unwrap();
        // rebuild the innovations and check the difference equation for t >= 3
        let mut rng = stream_rng(9, 0);
        let eps: Vec<f64> = (0..150).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let e = |t: usize| eps[t - 1 + 100];
        let x = |t: usize| s.values[t - 1];
        for t in 3..=n {
            let u = t as f64 / n as f64;
            let ar = m.ar_at(u);
            let lhs = x(t) + ar[0] * x(t - 1) + ar[1] * x(t - 2);
            let rhs = m.sigma_at(u) * e(t) + 0.5 * m.sigma_at((t - 1) as f64 / n as f64) * e(t - 1);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_innovations_are_bounded() {
        let spec = ModelSpec { innovation: "standardized-uniform".into(), ..ModelSpec::white_noise(1.0) };
        let m = TvArmaModel::from_spec(&spec).unwrap();
        let s = simulate(&m, 10_000, 1, Some(0)).unwrap();
        assert!(s.values.iter().all(|v| v.abs() <= 3f64.sqrt()));
        let var = s.values.iter().map(|v| v * v).sum::<f64>() / 1e4;
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_unchecked_model_and_empty_length() {
        let m = TvArmaModel::from_spec_unchecked(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        assert!(simulate(&m, 10, 0, None).is_err());
        let m = TvArmaModel::from_spec(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        assert!(simulate(&m, 0, 0, None).is_err());
    }
}
