use std::f64::consts::PI;

use rayon::prelude::*;

use super::functional::SpectralFunctional;
use super::mean::{functional_lag, smooth_frequency_rule, u_rule, QuadConfig, QuadValue};
use super::taper::TaperSpec;
use crate::error::Result;
use crate::numeric::pairwise_sum;
use crate::process::TvArmaModel;

fn covariance_at(
    phi_j: &SpectralFunctional,
    phi_k: &SpectralFunctional,
    model: &TvArmaModel,
    taper: &TaperSpec,
    quad: QuadConfig,
) -> f64 {
    let mut tb = phi_j.time_breakpoints();
    tb.extend(phi_k.time_breakpoints());
    let urule = u_rule(&tb, model, taper, quad.u_points);
    let mut fb = phi_j.freq_breakpoints();
    fb.extend(phi_k.freq_breakpoints());
    fb.extend(phi_k.freq_breakpoints().iter().map(|b| -b));
    let lag = functional_lag(phi_j).max(functional_lag(phi_k));
    let lrule = smooth_frequency_rule(&fb, 2 * lag, quad.freq_degree);
    let kappa4 = model.kappa4();
    let vals: Vec<f64> = urule
        .nodes
        .par_iter()
        .map(|&u| {
            let h = taper.eval(u);
            if h == 0.0 {
                return 0.0;
            }
            let f: Vec<f64> = lrule.nodes.iter().map(|&l| model.spectral_density(u, l)).collect();
            let mut second = Vec::with_capacity(f.len());
            let mut mj = Vec::with_capacity(f.len());
            let mut mk = Vec::with_capacity(f.len());
            for ((&l, &w), &fv) in lrule.nodes.iter().zip(&lrule.weights).zip(&f) {
                let a = phi_j.eval(u, l);
                let b = phi_k.eval(u, l) + phi_k.eval(u, -l);
                second.push(w * a * b * fv * fv);
                mj.push(w * a * fv);
                mk.push(w * phi_k.eval(u, l) * fv);
            }
            let gauss = 2.0 * PI * pairwise_sum(&second);
            let cum = kappa4 * pairwise_sum(&mj) * pairwise_sum(&mk);
            h.powi(4) * (gauss + cum)
        })
        .collect();
    let terms: Vec<f64> = vals.iter().zip(&urule.weights).map(|(v, w)| v * w).collect();
    pairwise_sum(&terms)
}

/// Limit covariance of `(E_n(phi_j), E_n(phi_k))`:
/// `2 pi int h^4 int phi_j(u,l) [phi_k(u,l) + phi_k(u,-l)] f^2 + kappa4 int h^4 (int phi_j f)(int phi_k f)`.
pub fn clt_covariance(
    phi_j: &SpectralFunctional,
    phi_k: &SpectralFunctional,
    model: &TvArmaModel,
    taper: &TaperSpec,
    quad: QuadConfig,
) -> Result<QuadValue> {
    phi_j.validate()?;
    phi_k.validate()?;
    model.require_stable()?;
    let value = covariance_at(phi_j, phi_k, model, taper, quad);
    let coarse = covariance_at(phi_j, phi_k, model, taper, QuadConfig {
        u_points: (quad.u_points / 2).max(2),
        freq_degree: (quad.freq_degree * 3 / 4).max(4),
    });
    Ok(QuadValue { value, error_estimate: (value - coarse).abs() })
}

/// Full covariance matrix of a vector of functionals (row-major).
pub fn clt_covariance_matrix(
    phis: &[SpectralFunctional],
    model: &TvArmaModel,
    taper: &TaperSpec,
    quad: QuadConfig,
) -> Result<Vec<f64>> {
    let d = phis.len();
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let v = clt_covariance(&phis[i], &phis[j], model, taper, quad)?.value;
            out[i * d + j] = v;
            out[j * d + i] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ModelSpec;
    use crate::spectral::FrequencyPart;
    use approx::assert_abs_diff_eq;

    #[test]
    fn white_noise_examples() {
        let q = QuadConfig::default();
        let one = SpectralFunctional::one();
        let wn = TvArmaModel::from_spec(&ModelSpec::white_noise(1.0)).unwrap();
        let v = clt_covariance(&one, &one, &wn, &TaperSpec::None, q).unwrap();
        assert_abs_diff_eq!(v.value, 2.0, epsilon = 1e-12);
        let spec = ModelSpec { innovation: "standardized-uniform".into(), ..ModelSpec::white_noise(1.0) };
        let wnu = TvArmaModel::from_spec(&spec).unwrap();
        let v = clt_covariance(&one, &one, &wnu, &TaperSpec::None, q).unwrap();
        assert_abs_diff_eq!(v.value, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn odd_against_even_vanishes() {
        let q = QuadConfig::default();
        let ar = TvArmaModel::from_spec(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        let sine = SpectralFunctional::of_frequency(FrequencyPart::Sine { lag: 1 });
        let v = clt_covariance(&sine, &SpectralFunctional::one(), &ar, &TaperSpec::None, q).unwrap();
        assert!(v.value.abs() < 1e-12);
    }

    /// For stationary gaussian AR(1) and phi = cos(l), the variance is
    /// `4 pi int cos^2 f^2` with `f^2` integrated in closed form:
    /// `int cos^2(l) f(l)^2 dl = (1/4pi^2) int cos^2 / |1 - a e^{il}|^4`.
    #[test]
    fn ar1_cosine_variance_against_lag_sum() {
        let phi = 0.5f64;
        let ar = TvArmaModel::from_spec(&ModelSpec::ar1(phi, 1.0)).unwrap();
        let cos = SpectralFunctional::cosine(1);
        let v = clt_covariance(&cos, &cos, &ar, &TaperSpec::None, QuadConfig::default()).unwrap();
        // Bartlett: var = sum_h [c(h)^2 + c(h+1) c(h-1)] with c(h) = phi^|h| / (1 - phi^2)
        let c = |h: i64| phi.powi(h.abs() as i32) / (1.0 - phi * phi);
        let bartlett: f64 = (-200..=200).map(|h| c(h) * c(h) + c(h + 1) * c(h - 1)).sum();
        assert_abs_diff_eq!(v.value, bartlett, epsilon = 1e-10);
    }
}
