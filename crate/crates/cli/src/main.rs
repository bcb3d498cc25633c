use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncs_cli::commands::{cmd_certify, cmd_design, cmd_generate, cmd_report, cmd_simulate, SCHEDULE_FILE};
use ncs_cli::error::CliError;
use ncs_core::ncs_graph::vertex_count;

#[derive(Parser)]
#[command(
    name = "ncs-sched",
    version,
    about = "Periodic scheduling logics for networked control systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mode-wise Lyapunov certificates for every plant.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Search for a T-contractive cycle and write the schedule.
    Design {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Simulate every plant under a designed schedule.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `<out>/schedule.json`.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides `simulate.rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        log_scale: bool,
    },
    /// Random unstable plants with LQR gains.
    Generate {
        #[arg(long)]
        plants: usize,
        #[arg(long)]
        capacity: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Markdown summary from a schedule and simulation artifacts.
    Report {
        /// Defaults to `<out>/schedule.json`.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Certify { config, out } => {
            let rep = cmd_certify(&config, &out)?;
            for c in &rep.certificates {
                println!(
                    "plant {}: lambda_s {} lambda_u {} kappa_s {:.4} kappa_u {:.4} mu_su {:.4} mu_us {:.4}",
                    c.plant, c.lambda_s, c.lambda_u, c.kappa_s, c.kappa_u, c.mu_su, c.mu_us
                );
            }
        }
        Command::Design { config, out } => {
            let art = cmd_design(&config, &out)?;
            println!("cycle {:?}", art.cycle);
            println!("t_factors {:?}", art.t_factors);
            println!("period {}", art.period);
            if let Some(r) = art.reference_period {
                println!("reference period {r}");
            }
            println!("xi_margins {:?}", art.xi_margins);
        }
        Command::Simulate {
            config,
            schedule,
            out,
            seed,
            log_scale,
        } => {
            let schedule = schedule.unwrap_or_else(|| out.join(SCHEDULE_FILE));
            let rep = cmd_simulate(&config, &schedule, &out, seed, log_scale)?;
            println!(
                "{} runs x {} plants, all periods within bound",
                rep.n_runs, rep.n_plants
            );
        }
        Command::Generate {
            plants,
            capacity,
            seed,
            out,
        } => {
            cmd_generate(plants, capacity, seed, &out)?;
            let v = vertex_count(plants, capacity).map_err(|e| CliError::Config(e.to_string()))?;
            println!("{plants} plants, capacity {capacity}, graph vertices {v}");
        }
        Command::Report { schedule, out } => {
            let schedule = schedule.unwrap_or_else(|| out.join(SCHEDULE_FILE));
            print!("{}", cmd_report(&schedule, &out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
