//! Run configuration: command-line flags layered over an optional TOML file
//! layered over per-case defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rcd_core::cases::Case;
use rcd_core::{DecompositionMode, GasModel, GradientScalar, ReconstructionSettings, SolverConfig};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "rcd", version, about = "2D Euler WENO finite-volume solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a benchmark case.
    Run(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Benchmark case: vortex, dmr or shockref.
    #[arg(long)]
    pub case: Option<CaseArg>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// ncd, scd, rcd, xcd, ycd or fixed:<degrees>.
    #[arg(long)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Final time; defaults to the case's end time.
    #[arg(long = "tend")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Scalar whose gradient orients the rotated decomposition.
    #[arg(long)]
    pub grad: Option<GradArg>,
    /// WENO weight regularisation.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Exponent on the smoothness indicators.
    #[arg(long)]
    pub power: Option<i32>,
    /// Pull non-physical face traces toward the cell mean (default true).
    #[arg(long)]
    pub positivity: Option<bool>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also dump the field every K steps.
    #[arg(long)]
    pub dump_every: Option<usize>,
    /// Square grid sizes for a vortex convergence study, e.g. 50,100,150,200.
    #[arg(long, value_delimiter = ',')]
    pub grid_seq: Option<Vec<usize>>,
    /// TOML file with any of the keys above (underscores for dashes, `t_end` for `tend`).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseArg(pub Case);

impl FromStr for CaseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Case::from_name(s)
            .map(CaseArg)
            .ok_or_else(|| format!("unknown case `{s}` (expected vortex, dmr or shockref)"))
    }
}

impl<'de> Deserialize<'de> for CaseArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeArg(pub DecompositionMode);

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mode = match s {
            "ncd" => DecompositionMode::Ncd,
            "scd" => DecompositionMode::Scd,
            "rcd" => DecompositionMode::Rcd,
            "xcd" => DecompositionMode::FixedAngle(0.0),
            "ycd" => DecompositionMode::FixedAngle(std::f64::consts::FRAC_PI_2),
            _ => {
                let deg = s
                    .strip_prefix("fixed:")
                    .and_then(|d| d.parse::<f64>().ok())
                    .filter(|d| d.is_finite())
                    .ok_or_else(|| {
                        format!("unknown mode `{s}` (expected ncd, scd, rcd, xcd, ycd or fixed:<degrees>)")
                    })?;
                DecompositionMode::FixedAngle(deg.to_radians())
            }
        };
        Ok(ModeArg(mode))
    }
}

impl<'de> Deserialize<'de> for ModeArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Short name used in headers, reports and file names.
pub struct ModeLabel(pub DecompositionMode);

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            DecompositionMode::Ncd => f.write_str("ncd"),
            DecompositionMode::Scd => f.write_str("scd"),
            DecompositionMode::Rcd => f.write_str("rcd"),
            DecompositionMode::FixedAngle(a) if a == 0.0 => f.write_str("xcd"),
            DecompositionMode::FixedAngle(a) if a == std::f64::consts::FRAC_PI_2 => f.write_str("ycd"),
            // Rounded so that `fixed:30` does not come back as 29.999999999999996.
            DecompositionMode::FixedAngle(a) => write!(f, "fixed{}", (a.to_degrees() * 1e9).round() / 1e9),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradArg(pub GradientScalar);

impl FromStr for GradArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "density" => Ok(GradArg(GradientScalar::Density)),
            "energy" => Ok(GradArg(GradientScalar::TotalEnergy)),
            _ => Err(format!("unknown gradient scalar `{s}` (expected density or energy)")),
        }
    }
}

impl<'de> Deserialize<'de> for GradArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Keys accepted in a configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub case: Option<CaseArg>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub mode: Option<ModeArg>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub gamma: Option<f64>,
    pub grad: Option<GradArg>,
    pub epsilon: Option<f64>,
    pub power: Option<i32>,
    pub positivity: Option<bool>,
    pub out: Option<PathBuf>,
    pub dump_every: Option<usize>,
    pub grid_seq: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|source| CliError::ConfigFile {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: Case,
    pub nx: usize,
    pub ny: usize,
    pub solver: SolverConfig,
    pub out: PathBuf,
    pub dump_every: Option<usize>,
    pub grid_seq: Option<Vec<usize>>,
}

impl RunConfig {
    /// Flags win over the file, the file over defaults.
    pub fn resolve(args: &RunArgs, file: &FileConfig) -> Result<Self, CliError> {
        let case = args
            .case
            .or(file.case)
            .ok_or_else(|| CliError::Config("missing --case".into()))?
            .0;
        let (nx0, ny0) = case.default_grid();
        let nx = args.nx.or(file.nx).unwrap_or(nx0);
        let ny = args.ny.or(file.ny).unwrap_or(ny0);
        let gamma = args.gamma.or(file.gamma).unwrap_or(1.4);
        let gas = GasModel::new(gamma).map_err(|e| CliError::Config(e.to_string()))?;
        let mut settings = ReconstructionSettings::default();
        if let Some(eps) = args.epsilon.or(file.epsilon) {
            settings.epsilon = eps;
        }
        if let Some(power) = args.power.or(file.power) {
            settings.power = power;
        }
        if let Some(on) = args.positivity.or(file.positivity) {
            settings.positivity = on;
        }
        let solver = SolverConfig {
            cfl: args.cfl.or(file.cfl).unwrap_or(0.8),
            t_end: args.t_end.or(file.t_end).unwrap_or_else(|| case.default_t_end()),
            mode: args.mode.or(file.mode).map_or(DecompositionMode::Rcd, |m| m.0),
            gas,
            settings,
            gradient: args.grad.or(file.grad).map_or(GradientScalar::Density, |g| g.0),
        };
        solver.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let dump_every = args.dump_every.or(file.dump_every);
        if dump_every == Some(0) {
            return Err(CliError::Config("dump-every must be positive".into()));
        }
        let grid_seq = args.grid_seq.clone().or_else(|| file.grid_seq.clone());
        if let Some(seq) = &grid_seq {
            if case != Case::Vortex {
                return Err(CliError::Config("grid-seq is only meaningful for the vortex case".into()));
            }
            if seq.is_empty() || seq.contains(&0) {
                return Err(CliError::Config("grid-seq needs positive sizes".into()));
            }
        }
        if nx == 0 || ny == 0 {
            return Err(CliError::Config("nx and ny must be positive".into()));
        }
        Ok(Self {
            case,
            nx,
            ny,
            solver,
            out: args.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| "out".into()),
            dump_every,
            grid_seq,
        })
    }

    /// Reads `--config` if given, then resolves.
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::resolve(args, &file)
    }
}
