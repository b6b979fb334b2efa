//! Batch front end: config loading, subcommand implementations and the exit-code contract.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;

use cli::{Cli, Command};
use commands::Context;
use config::PipelineConfig;
use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(jobs) = cli.jobs {
        config.jobs = Some(jobs);
    }
    config.validate()?;
    let seed = cli.seed.unwrap_or(config.seed);
    let jobs = config.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Other(e.into()))?;
    let ctx = Context { config, seed };

    pool.install(|| match &cli.command {
        Command::Manifest(args) => commands::manifest(&ctx, args),
        Command::Build(args) => commands::build(&ctx, args),
        Command::Preprocess(args) => commands::preprocess(&ctx, args),
        Command::Augment(args) => commands::augment_pair(&ctx, args),
        Command::Split(args) => commands::split(&ctx, args),
        Command::Evaluate(args) => commands::evaluate(&ctx, args),
        Command::Report(args) => commands::report(args),
    })
}
