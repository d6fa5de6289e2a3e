use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinstat_cli::config::{
    parse_tolerance, parse_vec3, Command, Parameters, RunConfig, DEFAULT_OUTPUT_DIR, DEFAULT_SEED,
};
use spinstat_cli::{run_config, EXIT_USAGE};

/// Numerical checks of spin rotation phases, the Galilean spinor wave
/// equation, exchange dynamics, and the interferometric protocols.
#[derive(Debug, Parser)]
#[command(name = "spinstat", version)]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for JSON and CSV artifacts.
    #[arg(long, global = true, env = "SPINSTAT_OUT_DIR")]
    output_dir: Option<PathBuf>,

    /// Override a tolerance, e.g. --tol phase=1e-6. Repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Algebraic conditions, squaring, nullity and boost covariance of the
    /// Galilean spinor equation.
    LlCheck {
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Full-turn rotation phases, spin algebra and the Majorana embedding.
    SpinRep(SpinArg),
    /// Exchange phase of the highest-weight state under rotation schedules.
    ExchangePhase {
        #[command(flatten)]
        spin: SpinArg,
        /// Coaxial segments t0:t1:omega_z,...
        #[arg(long)]
        schedule: Option<String>,
        /// JSON file {"samples": [[t, wx, wy, wz], ...]}.
        #[arg(long)]
        schedule_file: Option<PathBuf>,
    },
    /// Controlled-rotation interferometer read out on the control qubit.
    Interferometer {
        #[command(flatten)]
        spin: SpinArg,
        #[arg(long)]
        alpha: Option<f64>,
        /// dynamical or mode_relabeling.
        #[arg(long)]
        model: Option<String>,
    },
    /// Entanglement generated by partial swaps over an alpha grid.
    EntangleSweep {
        #[command(flatten)]
        spin: SpinArg,
        /// start:stop:step.
        #[arg(long)]
        alphas: Option<String>,
    },
    /// Vacuum correlator exchange chain on a two-mode Fock space.
    CorrelatorCheck(SpinArg),
    /// Finite-difference checks of the rotating-frame potential.
    GravitoCheck {
        /// x,y,z.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        omega: Option<[f64; 3]>,
        #[arg(long)]
        grid_h: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Every subcommand at its defaults plus a summary envelope.
    All,
    /// Run a TOML or JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SpinArg {
    /// Spin as the integer 2S.
    #[arg(long = "two-s")]
    two_s: Option<u32>,
}

fn build_config(cli: Cli) -> Result<(RunConfig, PathBuf), String> {
    let mut params = Parameters::default();
    let subcommand = match cli.command {
        Cmd::LlCheck { mass } => {
            params.mass = mass;
            Command::LlCheck
        }
        Cmd::SpinRep(s) => {
            params.two_s = s.two_s;
            Command::SpinRep
        }
        Cmd::ExchangePhase {
            spin,
            schedule,
            schedule_file,
        } => {
            params.two_s = spin.two_s;
            params.schedule = schedule;
            params.schedule_file = schedule_file;
            Command::ExchangePhase
        }
        Cmd::Interferometer { spin, alpha, model } => {
            params.two_s = spin.two_s;
            params.alpha = alpha;
            params.model = model;
            Command::Interferometer
        }
        Cmd::EntangleSweep { spin, alphas } => {
            params.two_s = spin.two_s;
            params.alphas = alphas;
            Command::EntangleSweep
        }
        Cmd::CorrelatorCheck(s) => {
            params.two_s = s.two_s;
            Command::CorrelatorCheck
        }
        Cmd::GravitoCheck { omega, grid_h, dt } => {
            params.omega = omega;
            params.grid_h = grid_h;
            params.dt = dt;
            Command::GravitoCheck
        }
        Cmd::All => Command::All,
        Cmd::Run { config } => {
            let mut cfg = RunConfig::load(&config).map_err(|e| e.to_string())?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            cfg.parameters.tolerances.extend(cli.tolerances);
            let dir = cli
                .output_dir
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
            return Ok((cfg, dir));
        }
    };
    params.tolerances.extend(cli.tolerances);
    let config = RunConfig::new(subcommand, params, cli.seed.unwrap_or(DEFAULT_SEED));
    let dir = cli
        .output_dir
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    Ok((config, dir))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let (config, dir) = match build_config(cli) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run_config(&config, &dir) {
        Ok(summary) => {
            for o in &summary.outcomes {
                let status = if o.envelope.pass { "pass" } else { "FAIL" };
                println!("{status} {}", o.stem);
                for f in &o.envelope.failed_checks {
                    println!("  {f}");
                }
            }
            for path in &summary.written {
                println!("wrote {}", path.display());
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
