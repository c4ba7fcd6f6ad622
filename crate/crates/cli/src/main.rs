mod commands;
mod report;
mod source;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use secgame_core::GameError;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        let code = match &e {
            GameError::Malformed(_) | GameError::Invalid(_) | GameError::TooLarge(_) => 2,
            GameError::AtStage { source, .. } => match **source {
                GameError::Malformed(_) | GameError::Invalid(_) | GameError::TooLarge(_) => 2,
                _ => 1,
            },
            GameError::Lp(_) => 1,
        };
        let message = match e {
            GameError::Invalid(list) => format!("invalid game:\n  {}", list.join("\n  ")),
            other => other.to_string(),
        };
        CliError { code, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Parser)]
#[command(name = "secgame", version, about = "Equilibria of finite Bayesian security games")]
pub struct Cli {
    /// Worker threads for the parallel solvers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the JSON report instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute equilibria.
    Solve {
        #[command(subcommand)]
        kind: SolveKind,
    },
    /// Recompute belief consistency and ε of a stored profile.
    Verify(VerifyArgs),
    /// Monte Carlo play-outs of a profile.
    Simulate(SimulateArgs),
    /// Built-in scenarios.
    Scenario {
        #[command(subcommand)]
        what: ScenarioCommand,
    },
}

#[derive(Args, Clone)]
pub struct GameArgs {
    /// Built-in scenario name (see `scenario list`).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Game description in JSON.
    #[arg(long)]
    pub game: Option<PathBuf>,
    /// JSON file overriding scenario parameters.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum InfoArg {
    Private,
    Uninformed,
}

#[derive(Subcommand)]
enum SolveKind {
    /// Complete-information Nash equilibria for every type pair.
    Ne(GameArgs),
    /// Bayesian Nash equilibria of a one-stage game.
    Bne {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum)]
        info: Option<InfoArg>,
    },
    /// Pure and mixed PBNE of a one-stage game read as a signaling game.
    Signaling {
        #[command(flatten)]
        game: GameArgs,
        /// Off-path belief grid resolution per dimension.
        #[arg(long, default_value_t = secgame_core::signaling::DEFAULT_GRID)]
        offpath_grid: usize,
    },
    /// Forward-backward PBNE iteration for multistage games.
    Pbne {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Strategy profile JSON, or a `solve pbne` report.
    #[arg(long)]
    pub profile: PathBuf,
    /// Belief system JSON; recomputed by Bayes' rule when absent.
    #[arg(long)]
    pub beliefs: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Strategy profile JSON, or a `solve pbne` report; solved first when absent.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(short = 'n', long, default_value_t = 10_000)]
    pub samples: u64,
    /// `none`, `gaussian:<sigma>` or `uniform:<half-width>`.
    #[arg(long, default_value = "none")]
    pub noise: String,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Subcommand)]
enum ScenarioCommand {
    List,
    /// Print a scenario as a game JSON.
    Show {
        name: String,
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::failure(format!("thread pool: {e}")))?;
    }
    let out = report::Output { json: cli.json, timings: cli.timings };
    match cli.command {
        Command::Solve { kind } => match kind {
            SolveKind::Ne(game) => commands::solve_ne(&out, &game),
            SolveKind::Bne { game, info } => commands::solve_bne(&out, &game, info),
            SolveKind::Signaling { game, offpath_grid } => commands::solve_signaling(&out, &game, offpath_grid),
            SolveKind::Pbne { game, solver } => commands::solve_pbne(&out, &game, &solver),
        },
        Command::Verify(args) => commands::verify(&out, &args),
        Command::Simulate(args) => commands::simulate(&out, &args),
        Command::Scenario { what } => match what {
            ScenarioCommand::List => commands::scenario_list(&out),
            ScenarioCommand::Show { name, params } => commands::scenario_show(&name, params.as_deref()),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code)
        }
    }
}
