//! Experiment runner behind the `bpl` binary.
//!
//! Every command writes a CSV with the fixed header in [`output::HEADER`],
//! sorted by `(family, n, L, target)`, plus a `.meta` sidecar holding run
//! metadata. `csv+svg` adds a log-scale plot.

pub mod config;
pub mod experiments;
pub mod output;
pub mod range;

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

pub use config::{Cli, Command, ExperimentConfig, Format, Opts};
pub use output::ResultRow;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] bpl_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Worker count from `BPL_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    let raw = std::env::var("BPL_WORKERS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(k) if k > 0 => Some(k),
        _ => {
            log::warn!("ignoring BPL_WORKERS={raw}");
            None
        }
    }
}

/// Merges the config file under the flags and resolves defaults.
pub fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let mut opts = cli.opts;
    if let Some(path) = opts.config.clone() {
        opts.fill_from(&config::read_config_file(&path)?)?;
    }
    ExperimentConfig::resolve(cli.command, opts)
}

pub struct RunReport {
    pub rows: usize,
    pub notes: Vec<String>,
}

/// Runs one experiment and writes its outputs.
pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;
    let mut outcome = pool.install(|| experiments::execute(cfg))?;
    output::sort_rows(&mut outcome.rows);
    output::write_csv(&cfg.out, &outcome.rows)?;
    if cfg.format == Format::CsvSvg {
        if let Some(plot) = &outcome.plot {
            output::write_svg(&output::sidecar_path(&cfg.out, ".svg"), plot)?;
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("command".to_string(), cfg.command.as_str().to_string());
    meta.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
    meta.insert("workers".to_string(), pool.current_num_threads().to_string());
    meta.insert("wall_time_seconds".to_string(), format!("{:.3}", started.elapsed().as_secs_f64()));
    meta.insert("rows".to_string(), outcome.rows.len().to_string());
    meta.insert("samples".to_string(), cfg.samples.to_string());
    meta.insert("seed".to_string(), cfg.seed.to_string());
    output::write_meta(&output::sidecar_path(&cfg.out, ".meta"), &meta, &outcome.notes)?;
    Ok(RunReport { rows: outcome.rows.len(), notes: outcome.notes })
}
