#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod io;

use clap::Parser;

use args::{Cli, Command};
use io::CliResult;

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Constants(a) => commands::constants(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Transform(a) => commands::transform(a),
        Command::Estimate(a) => commands::estimate_cmd(a),
        Command::Montecarlo(a) => commands::montecarlo(a),
    }
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            std::process::exit(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }

    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
