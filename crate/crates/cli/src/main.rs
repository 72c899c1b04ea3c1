//! `cmj`: grow trees, evaluate the phase criteria and scan parameter grids.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CriterionCmd;
use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] cmj_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use cmj_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Config(_) | E::Argument(_) | E::UnsupportedFamily(_) | E::Mode(_) | E::State(_)) => 2,
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 1,
        }
    }
}

/// Declares one `--flag` per configuration key and the list of overrides it yields.
macro_rules! key_flags {
    ($($field:ident : $ty:ty => $key:literal),* $(,)?) => {
        #[derive(Debug, Args, Default)]
        struct KeyFlags {
            $(
                #[arg(long, value_name = "VALUE", help = concat!("Sets `", $key, "`"))]
                $field: Option<$ty>,
            )*
        }

        impl KeyFlags {
            fn overrides(&self) -> Vec<(&'static str, String)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push(($key, v.to_string()));
                    }
                )*
                out
            }
        }
    };
}

key_flags! {
    n: String => "run.n",
    nmin: String => "run.nmin",
    nmax: String => "run.nmax",
    replicas: String => "run.replicas",
    seed: String => "run.seed",
    mode: String => "run.mode",
    l: String => "run.l",
    explosion_alpha: String => "run.explosion_alpha",
    trees: bool => "run.trees",
    simulate: bool => "run.simulate",
    fitness: String => "fitness.family",
    g: String => "fitness.g",
    form: String => "fitness.form",
    sigma: String => "fitness.sigma",
    nu: String => "fitness.nu",
    alpha: String => "fitness.alpha",
    r: String => "fitness.r",
    fitness_table: String => "fitness.table",
    tail_exponent: String => "fitness.tail_exponent",
    beta: String => "fitness.beta",
    p: String => "fitness.p",
    growth_c: String => "fitness.growth_c",
    growth_n: String => "fitness.growth_n",
    weights: String => "weights.family",
    kappa: String => "weights.kappa",
    gamma: String => "weights.gamma",
    value: String => "weights.value",
    weights_table: String => "weights.table",
    c_lo: String => "weights.c_lo",
    c_hi: String => "weights.c_hi",
    delta: String => "criterion.delta",
    eps: String => "criterion.eps",
    c: String => "criterion.c",
    w: String => "criterion.w",
    ratio_form: String => "criterion.ratio_form",
    expectation: String => "criterion.expectation",
    h: String => "criterion.h",
    draws: String => "criterion.draws",
    theta: String => "criterion.theta",
    mgf_tol: String => "criterion.mgf_tol",
    per_decade: String => "criterion.per_decade",
    a1: String => "criterion.a1",
    m: String => "criterion.m",
    eps_b: String => "criterion.eps_b",
    kappa_max: String => "criterion.kappa_max",
    example: String => "criterion.example",
    out_dir: String => "output.out_dir",
    formats: String => "output.formats",
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overwrite a non-empty output directory.
    #[arg(long, global = true)]
    force: bool,
    #[command(flatten)]
    keys: KeyFlags,
}

#[derive(Debug, Parser)]
#[command(name = "cmj", version, about = "Explosive CMJ processes and super-linear preferential attachment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow trees in discrete or continuous time and record condensation statistics.
    Grow(Common),
    /// Grow in continuous time and bracket the explosion time.
    Embed(Common),
    /// Evaluate one phase criterion.
    Criterion {
        #[command(subcommand)]
        which: CriterionSub,
    },
    /// Closed-form and numerical verdicts over a parameter grid.
    PhaseScan(Common),
    /// Monte-Carlo check of the conservative-sequence bound.
    ValidateBound(Common),
    /// Trend check of the growth certificate on s.
    CheckAssumptions(Common),
}

#[derive(Debug, Subcommand)]
enum CriterionSub {
    /// Star-phase series.
    Star(Common),
    /// Path-phase series.
    Path(Common),
    /// Ratio forms of the star condition.
    Ratio(Common),
    /// Regularity ratio of s(i)/(i+1).
    Iyer(Common),
    /// Closed-form phase of a canonical example.
    ClosedForm(Common),
}

fn set_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("CMJ_THREADS") else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("CMJ_THREADS must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    set_threads()?;
    let load = |c: &Common| Config::load(c.config.as_deref(), &c.keys.overrides());
    match cli.command {
        Command::Grow(c) => commands::grow(&load(&c)?, c.force, false),
        Command::Embed(c) => commands::grow(&load(&c)?, c.force, true),
        Command::Criterion { which } => {
            let (c, kind) = match which {
                CriterionSub::Star(c) => (c, CriterionCmd::Star),
                CriterionSub::Path(c) => (c, CriterionCmd::Path),
                CriterionSub::Ratio(c) => (c, CriterionCmd::Ratio),
                CriterionSub::Iyer(c) => (c, CriterionCmd::Iyer),
                CriterionSub::ClosedForm(c) => (c, CriterionCmd::ClosedForm),
            };
            commands::criterion(&load(&c)?, c.force, kind)
        }
        Command::PhaseScan(c) => commands::phase_scan(&load(&c)?, c.force),
        Command::ValidateBound(c) => commands::validate_bound(&load(&c)?, c.force),
        Command::CheckAssumptions(c) => commands::check_assumptions(&load(&c)?, c.force),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
