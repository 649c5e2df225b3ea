//! `stirap` binary: parse the TOML config, run the requested verb, map
//! errors to categorized exit codes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use stirap::cli::{self, Verb};
use stirap::error::Error;

#[derive(Parser, Debug)]
#[command(name = "stirap", version, about = "STIRAP simulation and DDP analysis")]
struct Args {
    /// Verb to run: shapes, simulate, sweep, ddp-analyze, validate
    verb: String,
    /// TOML configuration file
    #[arg(long, short)]
    config: PathBuf,
    /// Override the output path from the config
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Override the worker thread count
    #[arg(long, short)]
    workers: Option<usize>,
    /// Increase log verbosity (repeatable)
    #[arg(long, short, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn parse_verb(s: &str) -> Result<Verb, Error> {
    match s {
        "shapes" => Ok(Verb::Shapes),
        "simulate" => Ok(Verb::Simulate),
        "sweep" => Ok(Verb::Sweep),
        "ddp-analyze" => Ok(Verb::DdpAnalyze),
        "validate" => Ok(Verb::Validate),
        other => Err(Error::Validation(format!("unknown verb: {other}"))),
    }
}

fn run(args: &Args) -> Result<(), Error> {
    let verb = parse_verb(&args.verb)?;
    let text = std::fs::read_to_string(&args.config)?;
    let (mut cfg, defaults) = cli::parse_config(&text)?;
    if cfg.verb != verb {
        return Err(Error::Validation(format!(
            "config declares verb {} but the command line requests {}",
            cfg.verb.name(),
            verb.name()
        )));
    }
    if let Some(out) = &args.output {
        cfg.output_path = out.clone();
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cli::dispatch(&cfg, &defaults)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
