mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{parse_file, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "ds2",
    version,
    about = "Numerical checks for the massless scalar field on two-dimensional de Sitter space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    resolution: Option<ResolutionArg>,
    /// Additive constant of the massless kernel.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,
    /// Coefficient of the current's correction term.
    #[arg(long, global = true, value_enum)]
    kappa: Option<KappaArg>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq)]
enum Command {
    /// Tabulate a kernel on a lambda grid (CSV).
    Kernel {
        /// Massive kernel parameter in (0, 1); omitted for the massless kernel.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Massless-limit convergence and the flat remark function.
    Limit,
    /// Anomaly, positivity and Krein-structure checks.
    Krein,
    /// Truncated Fock-space algebra.
    Fock,
    /// Conservation scan and winding of the dual potential.
    Charge,
    /// Group invariance of kernel, pairings and the v0 class.
    Invariance,
    /// Every suite.
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ResolutionArg {
    Half,
    Default,
    Double,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ConventionArg {
    Series,
    Paper,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum KappaArg {
    Paper,
    Derived,
}

fn flag_overrides(cli: &Cli) -> Overrides {
    let mut o = Overrides::new();
    let mut set = |k: &str, v: String| {
        o.insert(k.to_string(), v);
    };
    if let Some(p) = &cli.out {
        set("out", p.display().to_string());
    }
    if let Some(s) = cli.seed {
        set("seed", s.to_string());
    }
    if let Some(r) = cli.resolution {
        set("resolution", format!("{r:?}").to_lowercase());
    }
    if let Some(c) = cli.convention {
        set("convention", format!("{c:?}").to_lowercase());
    }
    if let Some(k) = cli.kappa {
        set("kappa", format!("{k:?}").to_lowercase());
    }
    if let Command::Kernel { alpha, lambda_min, lambda_max, points } = cli.command {
        if let Some(a) = alpha {
            set("alpha", a.to_string());
        }
        if let Some(v) = lambda_min {
            set("lambda_min", v.to_string());
        }
        if let Some(v) = lambda_max {
            set("lambda_max", v.to_string());
        }
        if let Some(v) = points {
            set("lambda_points", v.to_string());
        }
    }
    o
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut layers = Vec::new();
    if let Some(p) = &cli.config {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        layers.push(parse_file(&text).map_err(|e| format!("{}: {e}", p.display()))?);
    }
    layers.push(flag_overrides(cli));
    RunConfig::build(&layers)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ds2: {e}");
            return ExitCode::from(2);
        }
    };
    match run::dispatch(cli.command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(run::Failure::Usage(e)) => {
            eprintln!("ds2: {e}");
            ExitCode::from(2)
        }
        Err(run::Failure::Compute(e)) => {
            eprintln!("ds2: {e}");
            ExitCode::from(1)
        }
    }
}
