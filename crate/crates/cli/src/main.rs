use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyprop::propagators::{suggest_dt_hermite, suggest_dt_laguerre};
use polyprop_cli::identity::{laguerre_hermite_identity, IDENTITY_POINTS};
use polyprop_cli::{benchmark_compare, init_threads, parse_config_with, run_experiment, BenchLeg, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "polyprop", version, about = "Polynomial-expansion propagators for exp(-iHt)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a value, as section.key=value. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Compare propagators on the configured model over a common horizon.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// A leg as method:dt or method:dt:tol. Repeatable.
        #[arg(long = "leg", required = true)]
        legs: Vec<String>,
        /// Physical end time; defaults to n_steps * dt of the configuration.
        #[arg(long)]
        horizon: Option<f64>,
        /// Also write the comparison as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the Laguerre-Hermite polynomial identity numerically.
    IdentityCheck {
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print the Hermite and Laguerre time-step bounds.
    AdviseDt {
        /// Energy cutoff E_m.
        #[arg(long = "e-m")]
        e_m: f64,
        #[arg(long, default_value_t = 30)]
        k: usize,
        /// The Hermite lambda.
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
    },
}

fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    Ok(parse_config_with(&text, overrides)?)
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run { config, overrides } => {
            let cfg = load(&config, &overrides)?;
            let out = run_experiment(&cfg)?;
            let s = out.summary;
            eprintln!(
                "{} steps, {} matvecs, max terms/step {}, max norm drift {:.3e}",
                s.steps, s.matvecs, s.max_terms_per_step, s.max_norm_drift
            );
            if let Some(path) = &cfg.output_path {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Bench { config, overrides, legs, horizon, csv } => {
            let cfg = load(&config, &overrides)?;
            let legs = legs.iter().map(|l| l.parse()).collect::<Result<Vec<BenchLeg>, _>>()?;
            let horizon = horizon.unwrap_or(cfg.n_steps as f64 * cfg.propagator.dt);
            let cmp = benchmark_compare(&cfg, &legs, horizon)?;
            print!("{}", cmp.to_table());
            if let Some(path) = csv {
                std::fs::write(&path, cmp.to_csv()).map_err(|source| RunError::Io { path, source })?;
            }
        }
        Command::IdentityCheck { k_max, tol } => {
            let rows = laguerre_hermite_identity(k_max, &IDENTITY_POINTS);
            println!("{:>3} {:>5} {:>24} {:>24} {:>10}", "k", "x", "L_k^(-1/2)(x^2)", "scaled H_2k(x)", "rel err");
            for r in &rows {
                println!("{:>3} {:>5} {:>24.16e} {:>24.16e} {:>10.2e}", r.k, r.x, r.laguerre, r.hermite, r.rel_error);
            }
            let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
            if worst > tol {
                return Err(RunError::Usage(format!("identity violated: max relative error {worst:.3e} > {tol:e}")));
            }
            println!("max relative error {worst:.3e}");
        }
        Command::AdviseDt { e_m, k, lambda } => {
            let h = suggest_dt_hermite(e_m, k, lambda).map_err(|e| RunError::Usage(e.to_string()))?;
            let l = suggest_dt_laguerre(e_m, k).map_err(|e| RunError::Usage(e.to_string()))?;
            println!("hermite  dt <= {h:.6e}  (E_m = {e_m}, k = {k}, lambda = {lambda})");
            println!("laguerre dt <= {l:.6e}  (E_m = {e_m}, k = {k})");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
