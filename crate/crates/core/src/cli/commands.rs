use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use super::config::{parse_config, FitConfig, SimulateConfig, SpectralConfig};
use super::manifest::OutputDir;
use crate::error::{Error, Result};
use crate::process::{Sample, TvArmaModel};
use crate::spectral::{
    classical_periodogram, empirical_process, norms, periodogram_identity_gap, pre_periodogram, spectral_mean_freq,
    spectral_mean_lag, theoretical_functional, FrequencyGrid, Taper,
};
use crate::verify::{self, Cell, ExperimentKind, McConfig, Table};
use crate::whittle::{fit_local_whittle, fit_whittle, local_yule_walker_curve, FamilyKind, SpectralFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralSub {
    Preperiodogram,
    Mean,
    Norms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitSub {
    Whittle,
    LocalWhittle,
    YuleWalker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Spectral(SpectralSub),
    Fit(FitSub),
    Verify(ExperimentKind),
}

impl Command {
    pub fn path(self) -> Vec<String> {
        let v: Vec<&str> = match self {
            Command::Simulate => vec!["simulate"],
            Command::Spectral(s) => vec!["spectral", match s {
                SpectralSub::Preperiodogram => "preperiodogram",
                SpectralSub::Mean => "mean",
                SpectralSub::Norms => "norms",
            }],
            Command::Fit(f) => vec!["fit", match f {
                FitSub::Whittle => "whittle",
                FitSub::LocalWhittle => "local-whittle",
                FitSub::YuleWalker => "yule-walker",
            }],
            Command::Verify(e) => vec!["verify", e.tag()],
        };
        v.into_iter().map(String::from).collect()
    }

    pub fn from_path(path: &[String]) -> Option<Command> {
        let p: Vec<&str> = path.iter().map(String::as_str).collect();
        Some(match p.as_slice() {
            ["simulate"] => Command::Simulate,
            ["spectral", "preperiodogram"] => Command::Spectral(SpectralSub::Preperiodogram),
            ["spectral", "mean"] => Command::Spectral(SpectralSub::Mean),
            ["spectral", "norms"] => Command::Spectral(SpectralSub::Norms),
            ["fit", "whittle"] => Command::Fit(FitSub::Whittle),
            ["fit", "local-whittle"] => Command::Fit(FitSub::LocalWhittle),
            ["fit", "yule-walker"] => Command::Fit(FitSub::YuleWalker),
            ["verify", "clt"] => Command::Verify(ExperimentKind::Clt),
            ["verify", "rate"] => Command::Verify(ExperimentKind::Rate),
            ["verify", "bias"] => Command::Verify(ExperimentKind::Bias),
            ["verify", "maxbound"] => Command::Verify(ExperimentKind::Maxbound),
            ["verify", "tail"] => Command::Verify(ExperimentKind::Tail),
            _ => return None,
        })
    }
}

/// Config text from a file, or an already resolved config from a manifest.
pub enum ConfigInput<'a> {
    File { path: &'a Path, text: String },
    Resolved(serde_json::Value),
}

impl ConfigInput<'_> {
    fn load<T: DeserializeOwned>(&self) -> Result<T> {
        match self {
            ConfigInput::File { path, text } => parse_config(path, text),
            ConfigInput::Resolved(v) => {
                serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("manifest config: {e}")))
            }
        }
    }

    fn base_dir(&self) -> PathBuf {
        let dir = match self {
            ConfigInput::File { path, .. } => path.parent().unwrap_or(Path::new("")),
            ConfigInput::Resolved(_) => Path::new(""),
        };
        std::path::absolute(dir).unwrap_or_else(|_| dir.to_path_buf())
    }
}

/// What a finished command reports back for the manifest and exit code.
pub struct Executed {
    pub resolved: serde_json::Value,
    pub seed: Option<u64>,
    pub verification_passed: bool,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("configs serialize to JSON")
}

fn sample_csv(sample: &Sample) -> Result<String> {
    let mut t = Table::new(&["t", "x"]);
    for (i, v) in sample.values().iter().enumerate() {
        t.push(vec![Cell::from(i + 1), Cell::from(*v)]);
    }
    t.to_csv()
}

fn grid_for(size: Option<usize>, n: usize) -> Result<FrequencyGrid> {
    match size {
        Some(m) => FrequencyGrid::new(m),
        None => Ok(FrequencyGrid::exact_for(n)),
    }
}

pub fn execute(cmd: Command, input: &ConfigInput, seed_override: Option<u64>, out: &mut OutputDir) -> Result<Executed> {
    let base = input.base_dir();
    match cmd {
        Command::Simulate => {
            let mut cfg: SimulateConfig = input.load()?;
            if let Some(s) = seed_override {
                cfg.seed = s;
            }
            let sample = cfg.run()?;
            out.write("sample.csv", &sample_csv(&sample)?)?;
            Ok(Executed { resolved: to_value(&cfg), seed: Some(cfg.seed), verification_passed: true })
        }
        Command::Spectral(sub) => {
            let mut cfg: SpectralConfig = input.load()?;
            if let Some(src) = cfg.sample.as_mut() {
                src.resolve_paths(&base);
                if let Some(s) = seed_override {
                    src.set_seed(s);
                }
            }
            run_spectral(sub, &cfg, out)?;
            let seed = match &cfg.sample {
                Some(super::config::SampleSource::Simulate(s)) => Some(s.seed),
                _ => None,
            };
            Ok(Executed { resolved: to_value(&cfg), seed, verification_passed: true })
        }
        Command::Fit(sub) => {
            let mut cfg: FitConfig = input.load()?;
            cfg.sample.resolve_paths(&base);
            if let Some(s) = seed_override {
                cfg.sample.set_seed(s);
            }
            run_fit(sub, &cfg, out)?;
            let seed = match &cfg.sample {
                super::config::SampleSource::Simulate(s) => Some(s.seed),
                _ => None,
            };
            Ok(Executed { resolved: to_value(&cfg), seed, verification_passed: true })
        }
        Command::Verify(kind) => {
            let mut cfg: McConfig = input.load()?;
            if cfg.experiment != kind {
                return Err(Error::Config(format!(
                    "config describes experiment {} but the command is verify {}",
                    cfg.experiment.tag(),
                    kind.tag()
                )));
            }
            if let Some(s) = seed_override {
                cfg.seed = s;
            }
            let report = verify::run(&cfg)?;
            out.write_json("report.json", &report)?;
            for (name, table) in &report.tables {
                out.write(&format!("{name}.csv"), &table.to_csv()?)?;
            }
            Ok(Executed { resolved: to_value(&cfg), seed: Some(cfg.seed), verification_passed: report.passed })
        }
    }
}

fn require_sample(cfg: &SpectralConfig) -> Result<Sample> {
    cfg.sample
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs a sample".into()))?
        .load()
}

fn run_spectral(sub: SpectralSub, cfg: &SpectralConfig, out: &mut OutputDir) -> Result<()> {
    match sub {
        SpectralSub::Preperiodogram => {
            let sample = require_sample(cfg)?;
            let n = sample.n();
            let grid = grid_for(cfg.grid_size, n)?;
            let taper = Taper::new(cfg.taper.clone(), n)?;
            let times: Vec<usize> = cfg.times.clone().unwrap_or_else(|| (1..=n).collect());
            let mut table = Table::new(&["t", "lambda", "value"]);
            for &t in &times {
                let j = pre_periodogram(&sample, &taper, t, &grid)?;
                for (l, v) in grid.nodes().iter().zip(j) {
                    table.push(vec![Cell::from(t), Cell::from(*l), Cell::from(v)]);
                }
            }
            out.write("preperiodogram.csv", &table.to_csv()?)?;
            if cfg.stationary_check {
                let gap = periodogram_identity_gap(&sample, &grid)?;
                let ip = classical_periodogram(&sample, &grid)?;
                let mut t = Table::new(&["lambda", "periodogram"]);
                for (l, v) in grid.nodes().iter().zip(ip) {
                    t.push(vec![Cell::from(*l), Cell::from(v)]);
                }
                out.write("periodogram.csv", &t.to_csv()?)?;
                out.write_json("identity.json", &json!({ "n": n, "grid_size": grid.m(), "max_deviation": gap }))?;
            }
            Ok(())
        }
        SpectralSub::Mean => {
            let sample = require_sample(cfg)?;
            let (name, phi) = cfg
                .functional
                .as_ref()
                .ok_or_else(|| Error::Config("spectral mean needs a functional".into()))?
                .resolve()?;
            let n = sample.n();
            let grid = grid_for(cfg.grid_size, n)?;
            let taper = Taper::new(cfg.taper.clone(), n)?;
            let f_freq = spectral_mean_freq(&sample, &taper, &phi, &grid)?;
            let f_lag = spectral_mean_lag(&sample, &taper, &phi, None)?;
            let mut result = json!({
                "functional": name,
                "n": n,
                "spectral_mean": f_freq,
                "spectral_mean_lag": f_lag,
                "route_difference": (f_freq - f_lag).abs(),
            });
            if let Some(spec) = &cfg.model {
                let model = TvArmaModel::from_spec(spec)?;
                let target = theoretical_functional(&model, &cfg.taper, &phi, cfg.quad)?;
                result["theoretical"] = json!(target.value);
                result["theoretical_error_estimate"] = json!(target.error_estimate);
                result["empirical_process"] = json!(empirical_process(f_freq, target.value, n));
            }
            if cfg.stationary_check {
                result["identity_max_deviation"] = json!(periodogram_identity_gap(&sample, &grid)?);
            }
            out.write_json("mean.json", &result)
        }
        SpectralSub::Norms => {
            let (name, phi) = cfg
                .functional
                .as_ref()
                .ok_or_else(|| Error::Config("spectral norms needs a functional".into()))?
                .resolve()?;
            let n = match (cfg.n, &cfg.sample) {
                (Some(n), _) => Some(n),
                (None, Some(src)) => Some(src.load()?.n()),
                (None, None) => None,
            };
            let nm = norms(&phi, n, Some(&cfg.taper), cfg.quad)?;
            out.write_json("norms.json", &json!({ "functional": name, "n": n, "norms": nm }))
        }
    }
}

fn run_fit(sub: FitSub, cfg: &FitConfig, out: &mut OutputDir) -> Result<()> {
    let sample = cfg.sample.load()?;
    let family = SpectralFamily::new(&cfg.family)?;
    let n = sample.n();
    match sub {
        FitSub::Whittle => {
            let fit = fit_whittle(&sample, &family, &cfg.optimizer)?;
            out.write_json("fit.json", &fit)
        }
        FitSub::LocalWhittle => {
            let b = cfg.bandwidth.resolve(n);
            let grid = cfg.u_grid.points(b);
            let fit = fit_local_whittle(&sample, &family, cfg.kernel, b, &grid, &cfg.optimizer, cfg.warm_start)?;
            let d = family.dim();
            let mut cols = vec!["u".to_string()];
            cols.extend((0..d).map(|i| format!("theta_{i}")));
            cols.extend(["grad_norm", "iterations", "converged", "boundary"].map(String::from));
            let mut table = Table { columns: cols, rows: vec![] };
            for p in &fit.points {
                let mut row = vec![Cell::from(p.u)];
                row.extend(p.theta.iter().map(|v| Cell::from(*v)));
                row.push(p.grad_norm.into());
                row.push(Cell::from(p.iterations));
                row.push(Cell::from(usize::from(p.converged)));
                row.push(Cell::from(usize::from(p.boundary)));
                table.push(row);
            }
            out.write("curve.csv", &table.to_csv()?)?;
            out.write_json("fit.json", &fit)
        }
        FitSub::YuleWalker => {
            let FamilyKind::Ar { p } = family.kind() else {
                return Err(Error::Config("yule-walker needs an ar(p) family".into()));
            };
            let b = cfg.bandwidth.resolve(n);
            let grid = cfg.u_grid.points(b);
            let fits = local_yule_walker_curve(&sample, p, cfg.kernel, b, &grid)?;
            let mut cols = vec!["u".to_string()];
            cols.extend((1..=p).map(|i| format!("alpha_{i}")));
            cols.extend(["sigma2", "condition", "negative_variance", "kernel_mass"].map(String::from));
            let mut table = Table { columns: cols, rows: vec![] };
            for f in &fits {
                let mut row = vec![Cell::from(f.u)];
                row.extend(f.alpha.iter().map(|v| Cell::from(*v)));
                row.push(f.sigma2.into());
                row.push(f.condition.into());
                row.push(Cell::from(usize::from(f.negative_variance)));
                row.push(f.kernel_mass.into());
                table.push(row);
            }
            out.write("curve.csv", &table.to_csv()?)?;
            out.write_json("fit.json", &json!({ "bandwidth": b, "kernel": cfg.kernel, "points": fits }))
        }
    }
}
