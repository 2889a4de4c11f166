//! Seeded Monte Carlo and exact-expectation experiments that check the limit
//! theory numerically. Every report is a deterministic function of its config.

mod bias;
mod clt;
mod decay;
mod maxbound;
mod rate;
mod report;
mod stats;
mod tail;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::SmoothingKernel;
use crate::process::{ModelSpec, TvArmaModel};
use crate::spectral::{menu, QuadConfig, SpectralFunctional, TaperSpec};

pub use bias::bias_sweep;
pub use clt::mc_clt;
pub use decay::{covariance_decay, DecayReport};
pub use maxbound::mc_maxbound;
pub use rate::{mc_rate, rate_slope, sup_error_curve};
pub use report::{Cell, Criterion, McReport, Table};
pub use stats::{bootstrap_slope_ci, covariance_matrix, mean, moments, sd};
pub use tail::mc_tail;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Clt,
    Rate,
    Bias,
    Maxbound,
    Tail,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::Clt => "clt",
            ExperimentKind::Rate => "rate",
            ExperimentKind::Bias => "bias",
            ExperimentKind::Maxbound => "maxbound",
            ExperimentKind::Tail => "tail",
        }
    }

    pub fn default_replications(self) -> usize {
        match self {
            ExperimentKind::Clt => 2000,
            ExperimentKind::Rate => 100,
            ExperimentKind::Bias => 2,
            ExperimentKind::Maxbound => 5000,
            ExperimentKind::Tail => 10_000,
        }
    }
}

/// A functional given by its menu name or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionalRef {
    Named(String),
    Inline(SpectralFunctional),
}

impl FunctionalRef {
    pub fn resolve(&self) -> Result<(String, SpectralFunctional)> {
        match self {
            FunctionalRef::Named(name) => menu()
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(n, f)| (n.to_string(), f))
                .ok_or_else(|| Error::Config(format!("unknown functional {name:?}"))),
            FunctionalRef::Inline(f) => {
                f.validate()?;
                Ok(("inline".into(), f.clone()))
            }
        }
    }
}

fn default_se_multiplier() -> f64 {
    3.0
}
fn default_slack() -> f64 {
    0.10
}
fn default_slope_range() -> [f64; 2] {
    [-0.55, -0.25]
}
fn default_tail_sd_multiple() -> f64 {
    4.0
}
fn default_tail_level() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Monte Carlo standard errors allowed between estimate and target.
    #[serde(default = "default_se_multiplier")]
    pub se_multiplier: f64,
    /// Relative slack for "bounded across n" comparisons of consecutive n.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Admissible range of the fitted log-log slope.
    #[serde(default = "default_slope_range")]
    pub slope_range: [f64; 2],
    #[serde(default = "default_tail_sd_multiple")]
    pub tail_sd_multiple: f64,
    /// Largest exceedance probability allowed at `tail_sd_multiple` SDs.
    #[serde(default = "default_tail_level")]
    pub tail_level: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            se_multiplier: default_se_multiplier(),
            slack: default_slack(),
            slope_range: default_slope_range(),
            tail_sd_multiple: default_tail_sd_multiple(),
            tail_level: default_tail_level(),
        }
    }
}

fn default_u_points() -> usize {
    41
}
fn default_bootstrap() -> usize {
    1000
}
fn default_eta_multiples() -> Vec<f64> {
    (1..=12).map(|i| 0.5 * i as f64).collect()
}

/// Configuration of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    /// Functionals for `clt`, `bias` and `tail` (the latter uses the first).
    #[serde(default)]
    pub functionals: Vec<FunctionalRef>,
    #[serde(default)]
    pub taper: TaperSpec,
    /// Sample sizes, strictly ascending.
    pub n: Vec<usize>,
    /// Replications per sample size; defaults per experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub quad: QuadConfig,
    /// Autoregressive order fitted by `rate`; defaults to the model order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ar_order: Option<usize>,
    #[serde(default)]
    pub kernel: SmoothingKernel,
    /// Points of the u-grid over which `rate` takes the sup error.
    #[serde(default = "default_u_points")]
    pub u_points: usize,
    /// Optional bandwidth sweep at the first `n` for `rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidths: Option<Vec<f64>>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    /// Thresholds of the `tail` curve in units of the empirical SD.
    #[serde(default = "default_eta_multiples")]
    pub eta_multiples: Vec<f64>,
}

impl McConfig {
    pub fn new(experiment: ExperimentKind, model: ModelSpec, n: Vec<usize>) -> Self {
        McConfig {
            experiment,
            model,
            functionals: vec![],
            taper: TaperSpec::None,
            n,
            replications: None,
            seed: 0,
            tolerances: Tolerances::default(),
            quad: QuadConfig::default(),
            ar_order: None,
            kernel: SmoothingKernel::default(),
            u_points: default_u_points(),
            bandwidths: None,
            bootstrap: default_bootstrap(),
            eta_multiples: default_eta_multiples(),
        }
    }

    pub fn replications(&self) -> usize {
        self.replications.unwrap_or_else(|| self.experiment.default_replications())
    }

    /// Structural checks; the model itself is validated separately.
    pub fn validate(&self) -> Result<()> {
        let r = self.replications();
        if r < 2 {
            return Err(Error::Config(format!("replication count must be at least 2, got {r}")));
        }
        if self.n.is_empty() {
            return Err(Error::Config("the n list is empty".into()));
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) || self.n[0] == 0 {
            return Err(Error::Config(format!("the n list must be positive and strictly ascending, got {:?}", self.n)));
        }
        let t = &self.tolerances;
        if !(t.se_multiplier > 0.0 && t.slack > 0.0 && t.tail_sd_multiple > 0.0 && t.tail_level > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(t.slope_range[0] < t.slope_range[1]) {
            return Err(Error::Config("slope_range must be increasing".into()));
        }
        if self.u_points == 0 || self.bootstrap == 0 {
            return Err(Error::Config("u_points and bootstrap must be positive".into()));
        }
        if let Some(bs) = &self.bandwidths {
            if bs.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
                return Err(Error::Config("bandwidths must lie in (0, 1]".into()));
            }
        }
        if self.eta_multiples.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("eta_multiples must be positive".into()));
        }
        let needs_functional = matches!(self.experiment, ExperimentKind::Clt | ExperimentKind::Bias | ExperimentKind::Tail);
        if needs_functional && self.functionals.is_empty() {
            return Err(Error::Config(format!("experiment {} needs at least one functional", self.experiment.tag())));
        }
        for f in &self.functionals {
            f.resolve()?;
        }
        Ok(())
    }

    pub(crate) fn resolved_functionals(&self) -> Result<Vec<(String, SpectralFunctional)>> {
        self.functionals.iter().map(FunctionalRef::resolve).collect()
    }
}

/// Validates the config and model, then runs the experiment.
pub fn run(config: &McConfig) -> Result<McReport> {
    config.validate()?;
    let model = TvArmaModel::from_spec(&config.model)?;
    match config.experiment {
        ExperimentKind::Clt => mc_clt(config, &model),
        ExperimentKind::Rate => mc_rate(config, &model),
        ExperimentKind::Bias => bias_sweep(config, &model),
        ExperimentKind::Maxbound => mc_maxbound(config, &model),
        ExperimentKind::Tail => mc_tail(config, &model),
    }
}

/// Random stream of replication `r` at the `i`-th sample size.
pub(crate) fn stream_id(n_index: usize, r: usize) -> u64 {
    ((n_index as u64) << 32) | r as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = McConfig::new(ExperimentKind::Maxbound, ModelSpec::white_noise(1.0), vec![100, 200]);
        c.validate().unwrap();
        c.replications = Some(1);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.replications = Some(10);
        c.n = vec![200, 100];
        assert!(c.validate().is_err());
        c.n = vec![100];
        c.experiment = ExperimentKind::Clt;
        assert!(c.validate().is_err());
        c.functionals = vec![FunctionalRef::Named("nope".into())];
        assert!(c.validate().is_err());
        c.functionals = vec![FunctionalRef::Named("cos1".into())];
        c.validate().unwrap();
    }

    #[test]
    fn config_from_json() {
        let json = r#"{
            "experiment": "clt",
            "model": {"alpha": [{"kind": "constant", "value": -0.5}], "sigma": {"kind": "constant", "value": 1.0}},
            "functionals": ["cos1", {"terms": [{"freq": {"kind": "indicator", "lo": 0.0, "hi": 1.5707963267948966}}]}],
            "n": [512],
            "replications": 2000,
            "seed": 7
        }"#;
        let c: McConfig = serde_json::from_str(json).unwrap();
        c.validate().unwrap();
        let back: McConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
