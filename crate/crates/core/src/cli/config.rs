use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::SmoothingKernel;
use crate::process::{simulate_stream, ModelSpec, Sample, TvArmaModel};
use crate::spectral::{QuadConfig, TaperSpec};
use crate::verify::FunctionalRef;
use crate::whittle::{band_grid, Bandwidth, FamilySpec, OptimizerConfig};

/// Parses JSON, or TOML when the extension is `.toml`.
pub fn parse_config<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(path, &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelSpec,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
}

impl SimulateConfig {
    pub fn run(&self) -> Result<Sample> {
        if self.n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        let model = TvArmaModel::from_spec(&self.model)?;
        simulate_stream(&model, self.n, self.seed, self.stream, self.burn_in)
    }
}

/// Where a command gets its sample from: a CSV file (last column, header
/// row required) or an inline simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SampleSource {
    Path(PathBuf),
    Simulate(SimulateConfig),
}

impl SampleSource {
    /// Makes a relative path absolute against the config directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let SampleSource::Path(p) = self {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        if let SampleSource::Simulate(s) = self {
            s.seed = seed;
        }
    }

    pub fn load(&self) -> Result<Sample> {
        match self {
            SampleSource::Simulate(s) => s.run(),
            SampleSource::Path(p) => read_sample_csv(p),
        }
    }
}

pub fn read_sample_csv(path: &Path) -> Result<Sample> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let field = rec.get(rec.len().saturating_sub(1)).unwrap_or("");
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{}: row {} has non-numeric value {field:?}", path.display(), i + 1)))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Config(format!("{} contains no observations", path.display())));
    }
    Ok(Sample::from_values(values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSource>,
    #[serde(default)]
    pub taper: TaperSpec,
    /// Frequency grid size; defaults to `2n + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalRef>,
    /// True model; enables population targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub quad: QuadConfig,
    /// Time indices for `preperiodogram`; all by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<usize>>,
    /// Report the deviation between the averaged pre-periodogram and the
    /// classical periodogram.
    #[serde(default)]
    pub stationary_check: bool,
    /// Sample size for the finite-n norms when no sample is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UGrid {
    Count(usize),
    Values(Vec<f64>),
}

impl Default for UGrid {
    fn default() -> Self {
        UGrid::Count(21)
    }
}

impl UGrid {
    pub fn points(&self, b: f64) -> Vec<f64> {
        match self {
            UGrid::Count(c) => band_grid(b, *c),
            UGrid::Values(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub sample: SampleSource,
    pub family: FamilySpec,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub kernel: SmoothingKernel,
    #[serde(default)]
    pub bandwidth: Bandwidth,
    #[serde(default)]
    pub u_grid: UGrid,
    #[serde(default)]
    pub warm_start: bool,
}
