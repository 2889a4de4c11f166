//! Command-line front end. One config file per run; all artifacts go to the
//! output directory together with a `manifest.json`.
//!
//! Exit codes: 0 success, 2 config error, 3 model error, 4 verification
//! failure, 1 anything else.

mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, Command, ConfigInput, Executed, FitSub, SpectralSub};
pub use config::{parse_config, read_config, read_sample_csv, FitConfig, SampleSource, SimulateConfig, SpectralConfig, UGrid};
pub use manifest::{OutputDir, RunManifest, MANIFEST_FILE};

use crate::error::Error;
use crate::verify::ExperimentKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidModel(_) => EXIT_MODEL,
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidCurve(_)
        | Error::OutOfBand { .. }
        | Error::OutsideBox { .. } => EXIT_CONFIG,
        Error::IllConditioned { .. } | Error::Numerical(_) | Error::Io { .. } => EXIT_OTHER,
    }
}

#[derive(Debug, Parser)]
#[command(name = "locspec", version, about = "Locally stationary spectral analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Top,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file (JSON, or TOML by extension).
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving every output file and the manifest.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Replaces the seed given in the config.
    #[arg(long)]
    seed_override: Option<u64>,
    /// Worker threads; outputs do not depend on this.
    #[arg(long, env = "LOCSPEC_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Top {
    /// Simulate a tvARMA sample.
    Simulate(Common),
    /// Pre-periodogram, spectral means and norms.
    Spectral {
        #[command(subcommand)]
        sub: SpectralCmd,
    },
    /// Whittle and local Whittle fits.
    Fit {
        #[command(subcommand)]
        sub: FitCmd,
    },
    /// Monte Carlo checks.
    Verify {
        #[command(subcommand)]
        sub: VerifyCmd,
    },
    /// Re-run the command recorded in a manifest (passed as --config).
    Replay(Common),
}

#[derive(Debug, Subcommand)]
enum SpectralCmd {
    Preperiodogram(Common),
    Mean(Common),
    Norms(Common),
}

#[derive(Debug, Subcommand)]
enum FitCmd {
    Whittle(Common),
    LocalWhittle(Common),
    YuleWalker(Common),
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    Clt(Common),
    Rate(Common),
    Bias(Common),
    Maxbound(Common),
    Tail(Common),
}

fn split(top: Top) -> (Option<Command>, Common) {
    match top {
        Top::Simulate(c) => (Some(Command::Simulate), c),
        Top::Spectral { sub } => match sub {
            SpectralCmd::Preperiodogram(c) => (Some(Command::Spectral(SpectralSub::Preperiodogram)), c),
            SpectralCmd::Mean(c) => (Some(Command::Spectral(SpectralSub::Mean)), c),
            SpectralCmd::Norms(c) => (Some(Command::Spectral(SpectralSub::Norms)), c),
        },
        Top::Fit { sub } => match sub {
            FitCmd::Whittle(c) => (Some(Command::Fit(FitSub::Whittle)), c),
            FitCmd::LocalWhittle(c) => (Some(Command::Fit(FitSub::LocalWhittle)), c),
            FitCmd::YuleWalker(c) => (Some(Command::Fit(FitSub::YuleWalker)), c),
        },
        Top::Verify { sub } => match sub {
            VerifyCmd::Clt(c) => (Some(Command::Verify(ExperimentKind::Clt)), c),
            VerifyCmd::Rate(c) => (Some(Command::Verify(ExperimentKind::Rate)), c),
            VerifyCmd::Bias(c) => (Some(Command::Verify(ExperimentKind::Bias)), c),
            VerifyCmd::Maxbound(c) => (Some(Command::Verify(ExperimentKind::Maxbound)), c),
            VerifyCmd::Tail(c) => (Some(Command::Verify(ExperimentKind::Tail)), c),
        },
        Top::Replay(c) => (None, c),
    }
}

fn run_common(cmd: Option<Command>, common: &Common) -> Result<i32, Error> {
    let start = Instant::now();
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let (cmd, input, config_path) = match cmd {
        Some(c) => (c, ConfigInput::File { path: &common.config, text }, common.config.clone()),
        None => {
            let m: RunManifest = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{} is not a run manifest: {e}", common.config.display())))?;
            let c = Command::from_path(&m.command)
                .ok_or_else(|| Error::Config(format!("unknown command {:?} in manifest", m.command)))?;
            (c, ConfigInput::Resolved(m.config), m.config_path)
        }
    };
    let mut out = OutputDir::create(&common.out_dir)?;
    let done = execute(cmd, &input, common.seed_override, &mut out)?;
    let manifest = RunManifest {
        command: cmd.path(),
        config_path,
        config: done.resolved,
        outputs: out.files().to_vec(),
        seed: done.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    out.write_json(MANIFEST_FILE, &manifest)?;
    if done.verification_passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("verification failed; report written to {}", out.path().display());
        Ok(EXIT_VERIFY)
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (cmd, common) = split(cli.command);
    if let Some(t) = common.threads {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    match run_common(cmd, &common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
