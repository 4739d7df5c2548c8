mod args;
mod commands;
mod parse;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};

fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let out = match &cli.command {
        Command::Constants(a) => commands::constants(c, a)?,
        Command::Verify(a) => commands::verify(c, a)?,
        Command::Positivity(a) => commands::positivity(c, a)?,
        Command::Convexity(a) => commands::convexity(c, a)?,
        Command::Solve(a) => commands::solve(c, a)?,
        Command::Decay(a) => commands::decay(c, a)?,
        Command::Caccioppoli(a) => commands::caccioppoli(c, a)?,
    };
    match &c.out {
        Some(path) => std::fs::write(path, &out.body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(out.body.as_bytes())?,
    }
    Ok(out.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.common.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("biharm: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("biharm: {e:#}");
            ExitCode::from(2)
        }
    }
}
