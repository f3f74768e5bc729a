use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lpg_cli::commands::{self, ConvergenceMode, GridChoice, SpectrumMatrix};
use lpg_cli::{parse_config, write_outputs, CliError, Result, RunConfig, RunOutput};
use lpg_core::experiments::ProfileCase;
use lpg_core::LpgError;

/// Environment variable naming the default output root.
const OUTPUT_ENV: &str = "LPG_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "lpg", version, about = "Legendre-Petrov-Galerkin solver experiments")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory (beats `output.dir` and $LPG_OUTPUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Temporal,
    Spatial,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Grid {
    BetaDt,
    AlphaBeta,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    /// `A^{-1} B`
    G,
    /// `A`
    A,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the manufactured problem and export the trajectory.
    Solve,
    /// Convergence study in dt or N.
    Convergence {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        /// Degrees for the spatial study.
        #[arg(long, value_delimiter = ',', default_value = "14,16,18,20,22,24,26")]
        degrees: Vec<usize>,
    },
    /// 20x20 parameter sweep.
    Sweep {
        #[arg(long, value_enum)]
        grid: Grid,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Eigenvalues of the amplification or step matrix.
    Spectrum {
        #[arg(long, default_value_t = 42)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.3)]
        beta: f64,
        #[arg(long, value_enum, default_value = "g")]
        matrix: Which,
    },
    /// Modal magnitudes of solution and source at one snapshot.
    Modal {
        #[arg(long, value_delimiter = ',', default_value = "32,64,80")]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        k: usize,
        #[arg(long, default_value_t = 1e-5)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.3)]
        beta: f64,
    },
    /// Time-varying coefficient case with its constant bounding runs.
    Cases {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: u8,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Compare closed-form matrix entries with quadrature of the weak form.
    Verify {
        #[arg(long)]
        n: usize,
        /// Fail when any entry disagrees, not only L and Q.
        #[arg(long)]
        strict: bool,
    },
}

fn output_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("lpg-out"))
}

fn emit(out: &RunOutput, dir: &std::path::Path) -> Result<()> {
    let (manifest, _) = write_outputs(out, dir)?;
    println!("{}", manifest.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = parse_config(cli.config.as_deref(), &cli.set)?;
    let dir = output_dir(&cli, &cfg);
    match &cli.command {
        Command::Solve => emit(&commands::solve(&cfg)?, &dir),
        Command::Convergence { mode, betas, degrees } => {
            let mode = match mode {
                Mode::Temporal => ConvergenceMode::Temporal,
                Mode::Spatial => ConvergenceMode::Spatial,
            };
            let betas = betas.clone().unwrap_or_else(|| commands::DEFAULT_BETAS.to_vec());
            emit(&commands::convergence(&cfg, mode, &betas, degrees)?, &dir)
        }
        Command::Sweep { grid, dt } => {
            let grid = match grid {
                Grid::BetaDt => GridChoice::BetaDt,
                Grid::AlphaBeta => GridChoice::AlphaBeta,
            };
            emit(&commands::sweep(&cfg, grid, *dt)?, &dir)
        }
        Command::Spectrum { n, dt, alpha, beta, matrix } => {
            let which = match matrix {
                Which::G => SpectrumMatrix::Amplification,
                Which::A => SpectrumMatrix::Step,
            };
            emit(&commands::spectrum(&cfg, *n, *dt, *alpha, *beta, which)?, &dir)
        }
        Command::Modal { degrees, k, dt, alpha, beta } => emit(&commands::modal(&cfg, degrees, *k, *dt, *alpha, *beta)?, &dir),
        Command::Cases { case, dt } => {
            let case = if *case == 1 { ProfileCase::Case1 } else { ProfileCase::Case2 };
            let dts = dt.map(|d| vec![d]).unwrap_or_else(|| commands::CASE_DTS.to_vec());
            let (out, failure) = commands::cases(&cfg, case, &dts)?;
            emit(&out, &dir)?;
            failure.map_or(Ok(()), |e| Err(e.into()))
        }
        Command::Verify { n, strict } => {
            let (out, empty) = commands::verify(&cfg, *n)?;
            emit(&out, &dir)?;
            if *strict && !empty {
                return Err(LpgError::Config(format!("closed forms disagree with the weak form at N = {n}")).into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Usage(first).one_line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.one_line());
            ExitCode::FAILURE
        }
    }
}
