use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use smk_lab::commands::{exit_code, run, Command, Grid, OutputFormat, RunConfig};
use smk_lab::Error;

/// Evaluate the operators, their moments and error bounds as CSV or JSON tables.
#[derive(Debug, Parser)]
#[command(name = "smk-lab", version)]
struct Cli {
    /// eval, compare, moments, korovkin, density, certify or bivariate.
    #[arg(long)]
    command: Option<String>,
    /// Named preset f1..f8; explicit flags override its settings.
    #[arg(long)]
    preset: Option<String>,
    /// Catalog function id.
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long)]
    n: Vec<u64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    m: Vec<u64>,
    /// start:stop:step
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    tail_eps: Option<f64>,
    #[arg(long)]
    quad_points: Option<usize>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Weighted norm sup |.|/(1+x^2) for the korovkin command.
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    epsilon: Vec<f64>,
    #[arg(long)]
    horizon: Vec<u64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Exit with status 4 when any certificate fails.
    #[arg(long)]
    strict: bool,
    /// modulus, lipschitz, bivariate-modulus or bivariate-lipschitz.
    #[arg(long)]
    bound: Option<String>,
    /// inverse, alternating, counterexample, evens, squares or perturbed-e1.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long, hide = true)]
    halve_bound: bool,
}

fn build_config(cli: Cli) -> Result<(RunConfig, Option<PathBuf>), Error> {
    let mut config = match (&cli.preset, &cli.command) {
        (Some(p), _) => RunConfig::preset(p)?,
        (None, Some(c)) => RunConfig::new(c.parse::<Command>()?),
        (None, None) => return Err(Error::Config("one of --command or --preset is required".into())),
    };
    if let Some(c) = &cli.command {
        config.command = c.parse()?;
    }
    if cli.function.is_some() {
        config.function = cli.function;
    }
    if !cli.n.is_empty() {
        config.n = cli.n;
    }
    if cli.a.is_some() {
        config.a = cli.a;
    }
    if !cli.m.is_empty() {
        config.m = cli.m;
    }
    if let Some(g) = &cli.grid {
        config.grid = Some(g.parse::<Grid>()?);
    }
    if let Some(t) = cli.tail_eps {
        config.tail_eps = t;
    }
    if let Some(q) = cli.quad_points {
        config.quad_points = q;
    }
    if let Some(f) = &cli.format {
        config.format = f.parse::<OutputFormat>()?;
    }
    config.weighted |= cli.weighted;
    if !cli.epsilon.is_empty() {
        config.epsilons = cli.epsilon;
    }
    if !cli.horizon.is_empty() {
        config.horizons = cli.horizon;
    }
    if cli.beta.is_some() {
        config.beta = cli.beta;
    }
    config.strict |= cli.strict;
    if let Some(b) = &cli.bound {
        config.bound = Some(b.parse()?);
    }
    if let Some(s) = &cli.sequence {
        config.sequence = Some(s.parse()?);
    }
    if cli.halve_bound {
        config.bound_scale = 0.5;
    }
    Ok((config, cli.out))
}

fn main() -> ExitCode {
    let (config, out) = match build_config(Cli::parse()) {
        Ok(parts) => parts,
        Err(e) => {
            eprintln!("smk-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("smk-lab: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let text = outcome.render(config.format);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("smk-lab: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if config.strict && outcome.certificate_failures > 0 {
        eprintln!("smk-lab: {} certificate(s) failed", outcome.certificate_failures);
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}
