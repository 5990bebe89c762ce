//! `lpplab`: simulation, exact and Fredholm CDFs, limit laws and self-tests
//! for exponential last passage percolation.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpplab_core::Geometry;

use config::{CommandKind, Format, Grid, GridSpec, PartialConfig, RouteChoice, RunConfig, OUTPUT_DIR_ENV};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "lpplab", version, about = "Exponential last passage percolation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimate of P(tau <= u) on a u-grid.
    Simulate(Flags),
    /// Exact CDF from the determinant formula.
    Exact(Flags),
    /// Finite-N Fredholm determinant with refinement diagnostics.
    Fredholm(Flags),
    /// F1 and F2->1 on an s-grid.
    Limit(Flags),
    /// Finite-N CDF at u_N = 2N/gamma + r N^(1/3) against the limit laws.
    Converge(Flags),
    /// Ai and Ai' on an x-grid, with rescaled J_N for each N in --n-list.
    Airy(Flags),
    /// Runs the acceptance criteria; exit code 2 if any fails.
    Selftest(Flags),
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    s.parse()
}

/// Comma-separated values of one type.
#[derive(Clone, Debug)]
struct List<T>(Vec<T>);

fn list<T: std::str::FromStr>(s: &str) -> Result<List<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|e| format!("`{t}`: {e}"))).collect::<Result<_, _>>().map(List)
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// flat or half-flat.
    #[arg(long)]
    geometry: Option<Geometry>,
    /// Comma-separated alpha rates.
    #[arg(long, value_parser = list::<f64>, allow_hyphen_values = true)]
    alpha: Option<List<f64>>,
    /// Comma-separated beta rates.
    #[arg(long, value_parser = list::<f64>, allow_hyphen_values = true)]
    beta: Option<List<f64>>,
    /// Size N of the i.i.d. model (used when alpha/beta are absent).
    #[arg(long)]
    n: Option<usize>,
    /// i.i.d. rate parameter; all waiting times are Exp(2 gamma).
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// u values: `a,b,c` or `start:stop:step`.
    #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
    u_grid: Option<Grid>,
    #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
    s_grid: Option<Grid>,
    #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
    x_grid: Option<Grid>,
    #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
    r_grid: Option<Grid>,
    /// Comma-separated system sizes.
    #[arg(long, value_parser = list::<usize>)]
    n_list: Option<List<usize>>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    route: Option<RouteChoice>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; defaults to $LPPLAB_OUTPUT_DIR/<command>.<format>, else stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Truncation length of Fredholm determinants.
    #[arg(long, allow_hyphen_values = true)]
    length: Option<f64>,
    #[arg(long)]
    level_cap: Option<u32>,
    /// Trapezoid nodes per contour (power of two).
    #[arg(long)]
    contour_m: Option<usize>,
    /// Comma-separated criterion ids for selftest.
    #[arg(long, value_parser = list::<u32>)]
    criteria: Option<List<u32>>,
}

impl Flags {
    fn into_partial(self, command: CommandKind) -> (Option<PathBuf>, PartialConfig) {
        let grid = |g: Option<Grid>| g.map(|g| GridSpec::List(g.0));
        let p = PartialConfig {
            command: Some(command),
            geometry: self.geometry,
            alpha: self.alpha.map(|l| l.0),
            beta: self.beta.map(|l| l.0),
            n: self.n,
            gamma: self.gamma,
            u_grid: grid(self.u_grid),
            s_grid: grid(self.s_grid),
            x_grid: grid(self.x_grid),
            r_grid: grid(self.r_grid),
            n_list: self.n_list.map(|l| l.0),
            samples: self.samples,
            seed: self.seed,
            route: self.route,
            format: self.format,
            output: self.output,
            length: self.length,
            level_cap: self.level_cap,
            contour_m: self.contour_m,
            criteria: self.criteria.map(|l| l.0),
        };
        (self.config, p)
    }
}

fn resolve(command: Command) -> Result<RunConfig, CliError> {
    let (kind, flags) = match command {
        Command::Simulate(f) => (CommandKind::Simulate, f),
        Command::Exact(f) => (CommandKind::Exact, f),
        Command::Fredholm(f) => (CommandKind::Fredholm, f),
        Command::Limit(f) => (CommandKind::Limit, f),
        Command::Converge(f) => (CommandKind::Converge, f),
        Command::Airy(f) => (CommandKind::Airy, f),
        Command::Selftest(f) => (CommandKind::Selftest, f),
    };
    let (file, flags) = flags.into_partial(kind);
    let file = match file {
        Some(path) => PartialConfig::from_toml_file(&path)?,
        None => PartialConfig::default(),
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    RunConfig::resolve(flags.over(file), env_dir)
}

fn execute(command: Command) -> Result<(), CliError> {
    let cfg = resolve(command)?;
    let outcome = commands::run(&cfg)?;
    output::emit(&cfg, &outcome.table)?;
    outcome.deferred.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::from(1),
                kind => {
                    eprintln!("{}", CliError::invalid("arguments", kind.to_string()).record());
                    ExitCode::from(1)
                }
            };
        }
    };
    let Some(command) = cli.command else {
        use clap::CommandFactory;
        let _ = Cli::command().print_help();
        return ExitCode::from(1);
    };
    match execute(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
