use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swarmkit::mill::SpeedTurnBox;
use swarmkit_cli::*;

/// Binary-sensing swarm simulator.
#[derive(Parser)]
#[command(name = "swarmkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation from a config file.
    Simulate {
        config: PathBuf,
        /// Trajectory output file.
        #[arg(short, long)]
        out: PathBuf,
        /// Metrics CSV (default: <out>.metrics.csv).
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Also write the effective config, defaults filled in.
        #[arg(long)]
        echo_config: Option<PathBuf>,
    },
    /// Re-classify a stored trajectory.
    Classify {
        trajectory: PathBuf,
        /// Take classifier thresholds from this run config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Closed-form mill radius and sufficient-condition check.
    Predict {
        #[arg(long, required_unless_present = "config")]
        gamma: Option<f64>,
        #[arg(short, long, required_unless_present = "config")]
        n: Option<usize>,
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, conflicts_with = "phi_rad")]
        phi_deg: Option<f64>,
        #[arg(long)]
        phi_rad: Option<f64>,
        /// Read parameters from a run config instead.
        #[arg(long, conflicts_with_all = ["gamma", "n"])]
        config: Option<PathBuf>,
    },
    /// Sample parameter tuples that mill at a chosen radius (CSV on stdout).
    Deploy {
        #[arg(long)]
        r_star: f64,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        /// Samples per agent count.
        #[arg(short, long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        v_min: f64,
        #[arg(long, default_value_t = 2.0)]
        v_max: f64,
        #[arg(long, default_value_t = 0.05)]
        omega_min: f64,
        #[arg(long, default_value_t = 2.0)]
        omega_max: f64,
    },
    /// Evaluate a sweep file into a phase diagram.
    Sweep {
        spec: PathBuf,
        #[arg(short, long)]
        out_dir: PathBuf,
        /// Worker threads (default: SWARMKIT_WORKERS, else all cores).
        #[arg(short, long)]
        workers: Option<usize>,
    },
    /// Render trajectory snapshots as SVG frames.
    Replay {
        trajectory: PathBuf,
        #[arg(short, long)]
        out_dir: PathBuf,
        #[arg(short, long, default_value_t = 12)]
        frames: usize,
    },
}

fn dispatch(cmd: Command) -> swarmkit::Result<()> {
    let mut out = std::io::stdout().lock();
    match cmd {
        Command::Simulate {
            config,
            out: path,
            metrics,
            echo_config,
        } => {
            let args = SimulateArgs {
                config: &config,
                out: &path,
                metrics: metrics.as_deref(),
                echo_config: echo_config.as_deref(),
            };
            cmd_simulate(&args, &mut out).map(drop)
        }
        Command::Classify { trajectory, config } => cmd_classify(&trajectory, config.as_deref(), &mut out).map(drop),
        Command::Predict {
            gamma,
            n,
            v,
            omega,
            phi_deg,
            phi_rad,
            config,
        } => match config {
            Some(c) => cmd_predict_config(&c, &mut out),
            None => cmd_predict(
                &PredictArgs {
                    gamma: gamma.expect("required by clap"),
                    n: n.expect("required by clap"),
                    v,
                    omega,
                    phi: phi_rad.or(phi_deg.map(f64::to_radians)),
                },
                &mut out,
            ),
        },
        Command::Deploy {
            r_star,
            n_min,
            n_max,
            k,
            seed,
            v_min,
            v_max,
            omega_min,
            omega_max,
        } => cmd_deploy(
            &DeployArgs {
                r_star,
                n_min,
                n_max,
                k,
                seed,
                bounds: SpeedTurnBox {
                    v_min,
                    v_max,
                    omega_min,
                    omega_max,
                },
            },
            &mut out,
        ),
        Command::Sweep { spec, out_dir, workers } => cmd_sweep(&spec, &out_dir, workers, &mut out).map(drop),
        Command::Replay {
            trajectory,
            out_dir,
            frames,
        } => cmd_replay(&trajectory, &out_dir, frames, &mut out).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::from(1)
        }
    }
}
