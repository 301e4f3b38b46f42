use std::process::ExitCode;

use bpl_cli::{resolve, run, workers_from_env, Cli};
use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = resolve(cli).and_then(|cfg| {
        let report = run(&cfg, workers_from_env())?;
        println!("wrote {} rows to {}", report.rows, cfg.out.display());
        for note in &report.notes {
            println!("{note}");
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bpl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
