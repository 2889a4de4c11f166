use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::curve::{CoefficientCurve, CurveSpec};
use super::transfer;
use crate::error::{Error, Result};
use crate::numeric::companion_spectral_radius;

pub const DEFAULT_GRID_SIZE: usize = 201;
pub const DEFAULT_DELTA: f64 = 0.05;

/// Innovation distribution. Both have mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Innovation {
    Gaussian,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    StandardizedUniform,
}

impl Innovation {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "gaussian" | "normal" => Ok(Innovation::Gaussian),
            "standardized-uniform" | "uniform" => Ok(Innovation::StandardizedUniform),
            "student-t" | "cauchy" | "pareto" | "laplace" => Err(Error::InvalidModel(format!(
                "innovation '{tag}' is not supported: only distributions with all moments finite \
                 and a bounded-moment growth (gaussian, standardized-uniform) are admitted"
            ))),
            other => Err(Error::InvalidModel(format!("unknown innovation distribution '{other}'"))),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Innovation::Gaussian => "gaussian",
            Innovation::StandardizedUniform => "standardized-uniform",
        }
    }

    /// Fourth cumulant of the unit-variance innovation.
    pub fn kappa4(self) -> f64 {
        match self {
            Innovation::Gaussian => 0.0,
            Innovation::StandardizedUniform => -1.2,
        }
    }
}

fn default_innovation() -> String {
    "gaussian".into()
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

/// Model description as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default)]
    pub alpha: Vec<CurveSpec>,
    #[serde(default)]
    pub beta: Vec<CurveSpec>,
    pub sigma: CurveSpec,
    #[serde(default = "default_innovation")]
    pub innovation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa4: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

impl ModelSpec {
    pub fn white_noise(sigma: f64) -> Self {
        ModelSpec {
            p: None,
            q: None,
            alpha: vec![],
            beta: vec![],
            sigma: CurveSpec::Constant { value: sigma },
            innovation: default_innovation(),
            kappa4: None,
            delta: DEFAULT_DELTA,
        }
    }

    /// Stationary AR(1) `X_t = phi X_{t-1} + sigma eps_t`.
    pub fn ar1(phi: f64, sigma: f64) -> Self {
        ModelSpec {
            alpha: vec![CurveSpec::Constant { value: -phi }],
            ..ModelSpec::white_noise(sigma)
        }
    }
}

/// Smallest root modulus of the AR polynomial at one rescaled time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub u: f64,
    pub min_root_modulus: f64,
}

/// A time-varying ARMA(p, q) model
/// `sum_j alpha_j(t/n) X_{t-j} = sum_k beta_k(t/n) sigma((t-k)/n) eps_{t-k}`
/// with `alpha_0 = beta_0 = 1`.
#[derive(Debug, Clone)]
pub struct TvArmaModel {
    alpha: Vec<CoefficientCurve>,
    beta: Vec<CoefficientCurve>,
    sigma: CoefficientCurve,
    innovation: Innovation,
    kappa4: f64,
    delta: f64,
    stable: bool,
    truncation: usize,
}

impl TvArmaModel {
    /// Builds and validates the model: curve structure, `sigma > 0`, and the
    /// stability margin on the default validation grid.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let mut model = Self::from_spec_unchecked(spec)?;
        let profile = validate_model(&model, DEFAULT_GRID_SIZE)?;
        let bound = 1.0 + model.delta;
        if let Some(bad) = profile.iter().find(|pt| pt.min_root_modulus <= bound) {
            return Err(Error::InvalidModel(format!(
                "stability check failed: AR polynomial has a root of modulus {:.6} <= 1 + delta = {bound} at u = {}",
                bad.min_root_modulus, bad.u
            )));
        }
        model.stable = true;
        model.truncation = transfer::truncation_order(&model);
        Ok(model)
    }

    /// Structural checks only; the stability margin is not verified and the
    /// result cannot be simulated from.
    pub fn from_spec_unchecked(spec: &ModelSpec) -> Result<Self> {
        if let Some(p) = spec.p {
            if p != spec.alpha.len() {
                return Err(Error::InvalidModel(format!("p = {p} but {} alpha curves given", spec.alpha.len())));
            }
        }
        if let Some(q) = spec.q {
            if q != spec.beta.len() {
                return Err(Error::InvalidModel(format!("q = {q} but {} beta curves given", spec.beta.len())));
            }
        }
        if !(spec.delta > 0.0 && spec.delta.is_finite()) {
            return Err(Error::InvalidModel(format!("stability margin delta must be positive, got {}", spec.delta)));
        }
        let curves = |specs: &[CurveSpec]| -> Result<Vec<CoefficientCurve>> {
            specs.iter().cloned().map(CoefficientCurve::new).collect()
        };
        let alpha = curves(&spec.alpha)?;
        let beta = curves(&spec.beta)?;
        let sigma = CoefficientCurve::new(spec.sigma.clone())?;
        if sigma.inf() <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "sigma(u) must be positive on [0, 1], minimum is {}",
                sigma.inf()
            )));
        }
        let innovation = Innovation::parse(&spec.innovation)?;
        let kappa4 = match spec.kappa4 {
            Some(k) if !k.is_finite() || k < -2.0 => {
                return Err(Error::InvalidModel(format!("kappa4 must be finite and >= -2, got {k}")))
            }
            Some(k) => k,
            None => innovation.kappa4(),
        };
        Ok(TvArmaModel {
            alpha,
            beta,
            sigma,
            innovation,
            kappa4,
            delta: spec.delta,
            stable: false,
            truncation: 0,
        })
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            p: Some(self.p()),
            q: Some(self.q()),
            alpha: self.alpha.iter().map(|c| c.spec().clone()).collect(),
            beta: self.beta.iter().map(|c| c.spec().clone()).collect(),
            sigma: self.sigma.spec().clone(),
            innovation: self.innovation.tag().into(),
            kappa4: (self.kappa4 != self.innovation.kappa4()).then_some(self.kappa4),
            delta: self.delta,
        }
    }

    pub fn p(&self) -> usize {
        self.alpha.len()
    }

    pub fn q(&self) -> usize {
        self.beta.len()
    }

    pub fn alpha_curves(&self) -> &[CoefficientCurve] {
        &self.alpha
    }

    pub fn beta_curves(&self) -> &[CoefficientCurve] {
        &self.beta
    }

    pub fn sigma_curve(&self) -> &CoefficientCurve {
        &self.sigma
    }

    pub fn innovation(&self) -> Innovation {
        self.innovation
    }

    pub fn kappa4(&self) -> f64 {
        self.kappa4
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub(crate) fn require_stable(&self) -> Result<()> {
        if self.stable {
            Ok(())
        } else {
            Err(Error::InvalidModel("model has not passed the stability check".into()))
        }
    }

    /// Truncation order of the MA(infinity) representation.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `alpha_1(u), ..., alpha_p(u)`.
    pub fn ar_at(&self, u: f64) -> Vec<f64> {
        self.alpha.iter().map(|c| c.eval(u)).collect()
    }

    /// `beta_1(u), ..., beta_q(u)`.
    pub fn ma_at(&self, u: f64) -> Vec<f64> {
        self.beta.iter().map(|c| c.eval(u)).collect()
    }

    pub fn sigma_at(&self, u: f64) -> f64 {
        self.sigma.eval(u)
    }

    /// Union of all curve breakpoints, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bps: Vec<f64> = self
            .alpha
            .iter()
            .chain(&self.beta)
            .chain(std::iter::once(&self.sigma))
            .flat_map(|c| c.breakpoints())
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        bps
    }

    /// True when no curve depends on `u`.
    pub fn is_time_constant(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|c| c.is_constant()) && self.sigma.is_constant()
    }

    /// `f(u, lambda) = sigma(u)^2 |B(u, lambda)|^2 / (2 pi |A(u, lambda)|^2)`.
    pub fn spectral_density(&self, u: f64, lambda: f64) -> f64 {
        let s = self.sigma_at(u);
        let num = poly_on_circle(&self.ma_at(u), lambda).norm_sqr();
        let den = poly_on_circle(&self.ar_at(u), lambda).norm_sqr();
        s * s * num / (2.0 * PI * den)
    }

    /// Limit covariance `c(u, k) = sum_j a(u, |k| + j) a(u, j)`.
    pub fn covariance(&self, u: f64, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        let a = transfer::limit_transfer(self, u, self.truncation.max(1) + k);
        let terms: Vec<f64> = (0..a.len() - k).map(|j| a[j + k] * a[j]).collect();
        crate::numeric::pairwise_sum(&terms)
    }
}

/// `1 + c_1 e^{i lambda} + ... + c_m e^{i m lambda}`.
pub(crate) fn poly_on_circle(coeffs: &[f64], lambda: f64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, c) in coeffs.iter().enumerate() {
        acc += Complex64::from_polar(*c, lambda * (j + 1) as f64);
    }
    acc
}

/// Smallest root modulus of `z -> sum_j alpha_j(u) z^j` on `grid_size`
/// equispaced points of `[0, 1]` plus every curve breakpoint (and the left
/// limit just before it).
pub fn validate_model(model: &TvArmaModel, grid_size: usize) -> Result<Vec<StabilityPoint>> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!("grid_size must be >= 2, got {grid_size}")));
    }
    let mut us: Vec<f64> = (0..grid_size).map(|i| i as f64 / (grid_size - 1) as f64).collect();
    for b in model.breakpoints() {
        us.push(b);
        if b > 0.0 {
            us.push((b - 1e-12).max(0.0));
        }
    }
    us.sort_by(f64::total_cmp);
    us.dedup();
    us.into_iter()
        .map(|u| {
            let ar = model.ar_at(u);
            if ar.iter().any(|a| !a.is_finite()) || !model.sigma_at(u).is_finite() {
                return Err(Error::InvalidModel(format!("non-finite curve value at u = {u}")));
            }
            let radius = companion_spectral_radius(&ar);
            let min_root_modulus = if radius == 0.0 { f64::INFINITY } else { 1.0 / radius };
            Ok(StabilityPoint { u, min_root_modulus })
        })
        .collect()
}

/// `l(j) = 1` for `|j| <= 1`, else `|j| ln(|j|)^(1 + kappa)`.
pub fn decay_weight(j: i64, kappa: f64) -> f64 {
    let a = j.unsigned_abs() as f64;
    if a <= 1.0 {
        1.0
    } else {
        a * a.ln().powf(1.0 + kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(v: f64) -> CurveSpec {
        CurveSpec::Constant { value: v }
    }

    #[test]
    fn ar1_stability_examples() {
        let m = TvArmaModel::from_spec(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        let prof = validate_model(&m, 11).unwrap();
        assert!(prof.iter().all(|p| (p.min_root_modulus - 2.0).abs() < 1e-12));

        let err = TvArmaModel::from_spec(&ModelSpec::ar1(1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidModel(ref m) if m.contains("stability")));
    }

    #[test]
    fn ar2_double_root_at_one_and_a_quarter() {
        let spec = ModelSpec {
            alpha: vec![
                CurveSpec::Polynomial { coefficients: vec![0.0, -1.6] },
                CurveSpec::Polynomial { coefficients: vec![0.0, 0.64] },
            ],
            delta: 0.2,
            ..ModelSpec::white_noise(1.0)
        };
        let m = TvArmaModel::from_spec(&spec).unwrap();
        let prof = validate_model(&m, 3).unwrap();
        let last = prof.last().unwrap();
        assert_eq!(last.u, 1.0);
        // a double root is only resolved to about sqrt(machine epsilon)
        assert_abs_diff_eq!(last.min_root_modulus, 1.25, epsilon = 1e-6);
    }

    #[test]
    fn jump_inside_grid_is_checked_on_both_sides() {
        let spec = ModelSpec {
            alpha: vec![CurveSpec::PiecewiseConstant { breakpoints: vec![0.503], values: vec![-0.99, -0.2] }],
            ..ModelSpec::white_noise(1.0)
        };
        let m = TvArmaModel::from_spec_unchecked(&spec).unwrap();
        let prof = validate_model(&m, 5).unwrap();
        assert!(prof.iter().any(|p| p.u < 0.503 && p.u > 0.5));
        assert!(TvArmaModel::from_spec(&spec).is_err());
    }

    #[test]
    fn spectral_density_examples() {
        let wn = TvArmaModel::from_spec(&ModelSpec::white_noise(1.0)).unwrap();
        assert_abs_diff_eq!(wn.spectral_density(0.3, 1.1), 0.5 / PI, epsilon = 1e-15);
        let ar = TvArmaModel::from_spec(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        assert_abs_diff_eq!(ar.spectral_density(0.5, 0.0), 2.0 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(ar.spectral_density(0.5, PI), 1.0 / (2.0 * PI * 2.25), epsilon = 1e-14);
    }

    #[test]
    fn covariance_examples() {
        let ar = TvArmaModel::from_spec(&ModelSpec::ar1(0.5, 1.0)).unwrap();
        assert_abs_diff_eq!(ar.covariance(0.2, 0), 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ar.covariance(0.2, 1), 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ar.covariance(0.2, -1), 2.0 / 3.0, epsilon = 1e-12);
        let wn = TvArmaModel::from_spec(&ModelSpec::white_noise(2.0)).unwrap();
        assert_abs_diff_eq!(wn.covariance(0.9, 0), 4.0, epsilon = 1e-15);
        assert_eq!(wn.covariance(0.9, 3), 0.0);
    }

    #[test]
    fn decay_weight_examples() {
        assert_eq!(decay_weight(0, 1.0), 1.0);
        assert_eq!(decay_weight(1, 1.0), 1.0);
        assert_eq!(decay_weight(-1, 1.0), 1.0);
        assert_abs_diff_eq!(decay_weight(10, 1.0), 10.0 * 10f64.ln().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(decay_weight(10, 1.0), 53.019, epsilon = 1e-3);
    }

    #[test]
    fn innovation_menu() {
        let mut spec = ModelSpec::white_noise(1.0);
        spec.innovation = "student-t".into();
        assert!(matches!(TvArmaModel::from_spec(&spec), Err(Error::InvalidModel(_))));
        spec.innovation = "standardized-uniform".into();
        assert_eq!(TvArmaModel::from_spec(&spec).unwrap().kappa4(), -1.2);
        spec.kappa4 = Some(0.5);
        assert_eq!(TvArmaModel::from_spec(&spec).unwrap().kappa4(), 0.5);
    }

    #[test]
    fn nonpositive_sigma_rejected() {
        let spec = ModelSpec { sigma: c(0.0), ..ModelSpec::white_noise(1.0) };
        assert!(matches!(TvArmaModel::from_spec(&spec), Err(Error::InvalidModel(_))));
    }
}
