//! Command-line options, `key=value` config files and the resolved
//! per-command experiment configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use bpl_core::scaling::{FitModel, GroupBy, DEFAULT_MIN_L, DEFAULT_MIN_N};
use bpl_core::FamilyTag;
use clap::{Args, Parser, ValueEnum};

use crate::range::Range;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Cost,
    Variance,
    Fig2,
    #[value(name = "fig3-left")]
    Fig3Left,
    #[value(name = "fig3-right")]
    Fig3Right,
    #[value(name = "grover-sweep")]
    GroverSweep,
    #[value(name = "qaoa-ring")]
    QaoaRing,
    Fit,
    #[value(name = "xi-separable")]
    XiSeparable,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Cost => "cost",
            Command::Variance => "variance",
            Command::Fig2 => "fig2",
            Command::Fig3Left => "fig3-left",
            Command::Fig3Right => "fig3-right",
            Command::GroverSweep => "grover-sweep",
            Command::QaoaRing => "qaoa-ring",
            Command::Fit => "fit",
            Command::XiSeparable => "xi-separable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    CsvSvg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "csv+svg" => Ok(Format::CsvSvg),
            _ => Err(format!("format must be csv or csv+svg, got '{s}'")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bpl", version, about = "Gradient-statistics experiments for correlated parameterized circuits")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

/// Every option is optional so a config file can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Qubit grid start:stop:step (xi for xi-separable)
    #[arg(long = "n")]
    pub n: Option<Range>,
    /// Layer grid start:stop:step
    #[arg(long = "L")]
    pub l: Option<Range>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or csv+svg
    #[arg(long)]
    pub format: Option<Format>,
    /// Flat key=value file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cost family for cost and variance
    #[arg(long)]
    pub family: Option<String>,
    /// uncorrelated or correlated, for cost and variance
    #[arg(long)]
    pub scheme: Option<String>,
    /// Trapezoid nodes for fig3-right quadrature
    #[arg(long)]
    pub nodes: Option<usize>,
    /// grover-sweep depth limit as a multiple of 2^(n/2)
    #[arg(long = "lmax-factor")]
    pub lmax_factor: Option<f64>,
    /// grover-sweep rotation angle; defaults to 2 pi / n
    #[arg(long)]
    pub alpha: Option<f64>,
    /// qaoa-ring grid cells per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// qaoa-ring coordinate-ascent passes
    #[arg(long)]
    pub refinements: Option<usize>,
    /// fit: input CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// fit: powerL or expN
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long = "min-L")]
    pub min_l: Option<usize>,
    #[arg(long = "min-n")]
    pub min_n: Option<usize>,
    /// fit: group by n or L
    #[arg(long)]
    pub per: Option<String>,
    /// fit: keep only rows with this target
    #[arg(long)]
    pub target: Option<String>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| CliError::Validation(format!("config key '{key}': cannot parse '{value}'")))
}

fn set<T>(slot: &mut Option<T>, parsed: T) {
    if slot.is_none() {
        *slot = Some(parsed);
    }
}

impl Opts {
    /// Fills unset options from `key=value` pairs.
    pub fn fill_from(&mut self, pairs: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in pairs {
            match k.as_str() {
                "n" => set(&mut self.n, v.parse::<Range>().map_err(CliError::Validation)?),
                "L" => set(&mut self.l, v.parse::<Range>().map_err(CliError::Validation)?),
                "samples" => set(&mut self.samples, parse_value(k, v)?),
                "seed" => set(&mut self.seed, parse_value(k, v)?),
                "gamma" => set(&mut self.gamma, parse_value(k, v)?),
                "delta" => set(&mut self.delta, parse_value(k, v)?),
                "out" => set(&mut self.out, PathBuf::from(v)),
                "format" => set(&mut self.format, v.parse::<Format>().map_err(CliError::Validation)?),
                "family" => set(&mut self.family, v.clone()),
                "scheme" => set(&mut self.scheme, v.clone()),
                "nodes" => set(&mut self.nodes, parse_value(k, v)?),
                "lmax-factor" => set(&mut self.lmax_factor, parse_value(k, v)?),
                "alpha" => set(&mut self.alpha, parse_value(k, v)?),
                "grid" => set(&mut self.grid, parse_value(k, v)?),
                "refinements" => set(&mut self.refinements, parse_value(k, v)?),
                "input" => set(&mut self.input, PathBuf::from(v)),
                "model" => set(&mut self.model, v.clone()),
                "min-L" => set(&mut self.min_l, parse_value(k, v)?),
                "min-n" => set(&mut self.min_n, parse_value(k, v)?),
                "per" => set(&mut self.per, v.clone()),
                "target" => set(&mut self.target, v.clone()),
                _ => return Err(CliError::Validation(format!("unknown config key '{k}'"))),
            }
        }
        Ok(())
    }
}

/// Parses a flat `key=value` file; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: Vec<usize>,
    pub layers: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub out: PathBuf,
    pub format: Format,
    pub family: Option<FamilyTag>,
    pub correlated: bool,
    pub nodes: usize,
    pub lmax_factor: f64,
    pub alpha: Option<f64>,
    pub grid: usize,
    pub refinements: usize,
    pub input: Option<PathBuf>,
    pub model: FitModel,
    pub min_l: usize,
    pub min_n: usize,
    pub per: GroupBy,
    pub target: Option<String>,
}

struct Defaults {
    n: &'static str,
    l: &'static str,
    samples: usize,
}

fn defaults(command: Command) -> Defaults {
    let d = |n, l, samples| Defaults { n, l, samples };
    match command {
        Command::Cost | Command::Variance => d("2:10:2", "4", 10_000),
        Command::Fig2 => d("1:60:1", "4", 50_000),
        Command::Fig3Left | Command::Fig3Right => d("4:28:2", "4:48:4", 20_000),
        Command::GroverSweep => d("8:20:2", "1", 0),
        Command::QaoaRing => d("4:10:2", "1:5:1", 0),
        Command::Fit => d("0", "0", 0),
        Command::XiSeparable => d("1:8:1", "1", 100_000),
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

impl ExperimentConfig {
    /// Applies command defaults and checks every grid point against the
    /// preconditions of the command before anything runs.
    pub fn resolve(command: Command, opts: Opts) -> Result<Self, CliError> {
        let d = defaults(command);
        let n = opts.n.unwrap_or_else(|| d.n.parse().expect("default range")).values();
        let layers = opts.l.unwrap_or_else(|| d.l.parse().expect("default range")).values();
        let model = match opts.model.as_deref() {
            None => FitModel::PowerL,
            Some(m) => FitModel::parse(m).filter(|m| *m != FitModel::ExpGeneric).ok_or_else(|| {
                CliError::Validation(format!("model must be powerL or expN, got '{m}'"))
            })?,
        };
        let per = match opts.per.as_deref() {
            None if model == FitModel::PowerL => GroupBy::N,
            None => GroupBy::L,
            Some("n") => GroupBy::N,
            Some("L") => GroupBy::L,
            Some(p) => return invalid(format!("per must be n or L, got '{p}'")),
        };
        let family = match opts.family.as_deref() {
            None => None,
            Some(f) => Some(FamilyTag::parse(f).ok_or_else(|| CliError::Validation(format!("unknown family '{f}'")))?),
        };
        let correlated = match opts.scheme.as_deref() {
            None | Some("uncorrelated") => false,
            Some("correlated") => true,
            Some(s) => return invalid(format!("scheme must be uncorrelated or correlated, got '{s}'")),
        };
        let cmd = command.as_str();
        let cfg = Self {
            command,
            n,
            layers,
            samples: opts.samples.unwrap_or(d.samples),
            seed: opts.seed.unwrap_or(1),
            gamma: opts.gamma,
            delta: opts.delta,
            out: opts.out.unwrap_or_else(|| PathBuf::from(format!("{cmd}.csv"))),
            format: opts.format.unwrap_or(Format::Csv),
            family,
            correlated,
            nodes: opts.nodes.unwrap_or(bpl_core::estimator::DEFAULT_QUADRATURE_NODES),
            lmax_factor: opts.lmax_factor.unwrap_or(1.0),
            alpha: opts.alpha,
            grid: opts.grid.unwrap_or(32),
            refinements: opts.refinements.unwrap_or(60),
            input: opts.input,
            model,
            min_l: opts.min_l.unwrap_or(DEFAULT_MIN_L),
            min_n: opts.min_n.unwrap_or(DEFAULT_MIN_N),
            per,
            target: opts.target,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let mc = |min: usize| {
            if self.samples < min {
                invalid(format!("samples must be at least {min}, got {}", self.samples))
            } else {
                Ok(())
            }
        };
        let even = || match self.n.iter().find(|&&n| n % 2 != 0 || n == 0) {
            Some(n) => invalid(format!("n = {n} must be even and positive for {}", self.command.as_str())),
            None => Ok(()),
        };
        if let Some(d) = self.delta {
            if !(0.0..0.5).contains(&d) {
                return invalid(format!("delta = {d} outside [0, 1/2)"));
            }
        }
        match self.command {
            Command::Cost | Command::Variance => {
                mc(bpl_core::estimator::MIN_SAMPLES)?;
                let tag = self.family.ok_or_else(|| CliError::Validation("--family is required".into()))?;
                for &n in &self.n {
                    for &l in &self.layers {
                        self.family_at(tag, n, l).validate().map_err(|e| CliError::Validation(format!("n = {n}, L = {l}: {e}")))?;
                    }
                }
                Ok(())
            }
            Command::Fig2 => {
                mc(bpl_core::estimator::MIN_SAMPLES)?;
                if self.n.contains(&0) {
                    return invalid("n must be positive");
                }
                Ok(())
            }
            Command::Fig3Left => {
                mc(bpl_core::estimator::MIN_SAMPLES)?;
                even()?;
                match self.layers.iter().find(|&&l| l == 0 || l % 4 != 0) {
                    Some(l) => invalid(format!("L = {l} must be a positive multiple of 4")),
                    None => Ok(()),
                }
            }
            Command::Fig3Right => {
                even()?;
                if self.n.iter().any(|&n| n > crate::experiments::QUADRATURE_MAX_N) {
                    mc(bpl_core::estimator::MIN_SAMPLES)?;
                }
                if self.nodes == 0 {
                    return invalid("nodes must be positive");
                }
                Ok(())
            }
            Command::GroverSweep => {
                even()?;
                if !(self.lmax_factor > 0.0) {
                    return invalid("lmax-factor must be positive");
                }
                if let Some(&n) = self.n.iter().find(|&&n| n > 40) {
                    return invalid(format!("n = {n} too large for a depth sweep (max 40)"));
                }
                Ok(())
            }
            Command::QaoaRing => {
                even()?;
                if let Some(n) = self.n.iter().find(|&&n| !(4..=10).contains(&n)) {
                    return invalid(format!("n = {n} outside 4..=10"));
                }
                if let Some(l) = self.layers.iter().find(|&&l| !(1..=6).contains(&l)) {
                    return invalid(format!("L = {l} outside 1..=6"));
                }
                if self.grid == 0 {
                    return invalid("grid must be positive");
                }
                Ok(())
            }
            Command::Fit => {
                if self.input.is_none() {
                    return invalid("--input is required");
                }
                Ok(())
            }
            Command::XiSeparable => {
                mc(bpl_core::estimator::MIN_SAMPLES)?;
                if self.n.contains(&0) {
                    return invalid("xi must be positive");
                }
                Ok(())
            }
        }
    }

    pub fn family_at(&self, tag: FamilyTag, n: usize, layers: usize) -> bpl_core::CostFamily {
        let mut f = bpl_core::CostFamily::new(tag, n, layers);
        if let Some(g) = self.gamma {
            f = f.with_gamma(g);
        } else if tag == FamilyTag::GroverExact {
            f = f.with_gamma(PI);
        }
        if let Some(d) = self.delta {
            f = f.with_delta(d);
        }
        f
    }
}
