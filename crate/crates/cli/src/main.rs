use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use magbound_cli::bundle::{emit_plot_data, write_bundle};
use magbound_cli::config::{Command, Preset, RunConfig};
use magbound_cli::run::{run, CORNER_DELTAS, CURVED_DELTAS, WEAK_DELTAS};

#[derive(Parser)]
#[command(name = "magbound", version, about = "Bound states of the magnetic Neumann Laplacian")]
struct Cli {
    /// Directory for config.json, report.json, CSV tables and plot data.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Band function mu(xi) and the universal constants.
    Degennes {
        #[arg(long, default_value_t = 0.2)]
        xi_min: f64,
        #[arg(long, default_value_t = 1.6)]
        xi_max: f64,
        #[arg(long, default_value_t = 57)]
        points: usize,
    },
    /// Corner quasi-mode bounds over a delta sweep.
    CornerBound {
        #[arg(long, value_delimiter = ',', default_values_t = CORNER_DELTAS)]
        deltas: Vec<f64>,
    },
    /// Curved-boundary quasi-mode bounds over a delta sweep.
    CurvedBound {
        /// Curvature profile: bump, dipole or table.
        #[arg(long, default_value = "bump")]
        kappa: String,
        #[arg(long, default_value_t = 1.0)]
        mean: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Two-column CSV for the table profile.
        #[arg(long)]
        path: Option<String>,
        #[arg(long, value_delimiter = ',', default_values_t = CURVED_DELTAS)]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        c_hat: f64,
    },
    /// Lowest eigenvalue of -d^2 + delta V over a delta sweep.
    WeakCoupling {
        /// Potential: well, bump or kappa.
        #[arg(long, default_value = "well")]
        potential: String,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        mean: f64,
        #[arg(long, value_delimiter = ',', default_values_t = WEAK_DELTAS)]
        deltas: Vec<f64>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 16001)]
        n: usize,
    },
    /// Finite-element spectrum on a truncated corner or curved domain.
    Solve2d {
        /// Domain: corner, curved or halfplane.
        #[arg(long, default_value = "corner")]
        kind: String,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        mean: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Also write the lowest eigenfunction.
        #[arg(long)]
        field: bool,
    },
    /// A fixed preset.
    Reproduce { preset: Preset },
    /// Re-execute a persisted config.json.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn config_of(cmd: Cmd) -> magbound::Result<RunConfig> {
    let command = match cmd {
        Cmd::Degennes { xi_min, xi_max, points } => Command::Degennes { xi_min, xi_max, points },
        Cmd::CornerBound { deltas } => Command::CornerBound { deltas },
        Cmd::CurvedBound { kappa, mean, width, path, deltas, rho, c_hat } => {
            Command::CurvedBound { kappa, mean, width, path, deltas, rho, c_hat }
        }
        Cmd::WeakCoupling { potential, mean, deltas, window, n } => Command::WeakCoupling { potential, mean, deltas, window, n },
        Cmd::Solve2d { kind, delta, radius, h, k, mean, width, field } => Command::Solve2d { kind, delta, radius, h, k, mean, width, field },
        Cmd::Reproduce { preset } => Command::Reproduce { preset },
        Cmd::Run { config } => return RunConfig::load(&config),
    };
    Ok(RunConfig::new(command))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = config_of(cli.command).and_then(|config| {
        let bundle = run(&config)?;
        write_bundle(&bundle, &cli.out)?;
        Ok(bundle)
    });
    let bundle = match outcome {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for c in &bundle.contracts {
        let tag = c.criterion.map(|n| format!("[{n}] ")).unwrap_or_default();
        println!("{} {tag}{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(f) = &bundle.failure {
        println!("FAIL module {} stopped the run: {}", f.module, f.error);
    }
    if let Some(notice) = emit_plot_data(&bundle).notice {
        println!("{notice}");
    }
    println!("wrote {} (config hash {})", cli.out.display(), bundle.config_hash);
    if bundle.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
