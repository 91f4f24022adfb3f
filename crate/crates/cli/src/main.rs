//! Command-line front end: single-point shifts, two-axis maps, eigenvalue
//! oracle comparisons, ringdown and hysteresis runs, and the
//! damping-maximum search.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical error
//! (pole/divergence/non-convergence), 4 invariant-check failure in oracle
//! mode.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod runs;
mod sweep;

use cavshift::maxsearch::SMALL_DAMPING_THRESHOLD;
use cavshift::ModelError;
use config::{Mode, RunConfig};

/// Everything a run can fail with, mapped onto the exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numeric(#[from] ModelError),
    #[error("invariant check failed: {0}")]
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(e) => match e {
                ModelError::Domain(_) | ModelError::Configuration(_) => 2,
                _ => 3,
            },
            CliError::Invariant(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Si,
    Normalized,
}

#[derive(Parser)]
#[command(name = "cavshift", version, about = "Coupling-induced complex frequency shift of a cavity mode: closed forms, eigenvalue perturbation and time-domain cross-checks")]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (overrides the config's 'out').
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for grid sweeps (0 = automatic; overrides 'threads').
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Unit system override (must match the config's intent).
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the shift decomposition at the configured operating point.
    Shift,
    /// Sweep the two configured axes and emit the shift map as CSV.
    Map,
    /// Compare closed-form, perturbative and numeric eigenvalues over the
    /// configured coupling list.
    Oracle,
    /// Kick the cavity and fit the effective damping rate from the decay.
    Ringdown,
    /// Drive the spins with a prescribed cavity oscillation and report the
    /// (x_a, p_z) loop and its signed area.
    Hysteresis,
    /// Locate the largest damping-rate change over detuning and drive.
    Maxsearch {
        /// Largest admissible gamma_2/omega_a for the search.
        #[arg(long, default_value_t = SMALL_DAMPING_THRESHOLD)]
        damping_threshold: f64,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(mode) = cli.mode {
        let want = match mode {
            ModeArg::Si => Mode::Si,
            ModeArg::Normalized => Mode::Normalized,
        };
        if cfg.mode() != want {
            return Err(CliError::Config(format!(
                "--mode {want:?} does not match the config's mode {:?}",
                cfg.mode()
            )));
        }
    }
    if let Some(threads) = cli.threads {
        cfg.raw.threads = Some(threads);
    }
    if let Some(out) = &cli.out {
        cfg.raw.out = Some(out.display().to_string());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Shift => {
            print!("{}", runs::shift_report(&cfg)?);
        }
        Command::Map => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads())
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            let grid = pool.install(|| sweep::map_sweep(&cfg))?;
            let mut body = Vec::new();
            sweep::write_map_csv(&grid, &mut body)
                .map_err(|e| CliError::Config(format!("csv: {e}")))?;
            let body = String::from_utf8(body).expect("csv is utf-8");
            match &cfg.raw.out {
                Some(path) => runs::write_output(path, &body)?,
                None => print!("{body}"),
            }
            let poles = grid.cells.iter().filter(|c| c.pole).count();
            eprintln!(
                "map: {} x {} cells, {poles} pole-flagged, config hash {:016x}",
                grid.axis1.count, grid.axis2.count, grid.config_hash
            );
        }
        Command::Oracle => {
            let report = runs::oracle_compare(&cfg)?;
            let body = runs::format_oracle_report(&report);
            match &cfg.raw.out {
                Some(path) => runs::write_output(path, &body)?,
                None => print!("{body}"),
            }
            if !report.scaling_ok() {
                return Err(CliError::Invariant(format!(
                    "|numeric - perturbative| scaling exponent {:.4} outside 3.0 +/- 0.3",
                    report.exponent
                )));
            }
        }
        Command::Ringdown => {
            let (r, csv) = runs::ringdown_run(&cfg)?;
            if let Some(path) = &cfg.raw.out {
                runs::write_output(path, &csv)?;
            }
            println!(
                "gamma_eff = {} ({} envelope points over window [{:.6e}, {:.6e}])",
                sweep::fmt_f64(r.gamma_eff),
                r.envelope_points,
                r.window.0,
                r.window.1
            );
        }
        Command::Hysteresis => {
            let (r, csv) = runs::hysteresis_run(&cfg)?;
            if let Some(path) = &cfg.raw.out {
                runs::write_output(path, &csv)?;
            }
            println!(
                "area = {} ({} loop points, {} settle cycles discarded)",
                sweep::fmt_f64(r.area),
                r.loop_points.len(),
                r.cycles_discarded
            );
        }
        Command::Maxsearch { damping_threshold } => {
            let m = runs::maxsearch_run(&cfg, *damping_threshold)?;
            println!(
                "gamma_aL_max/omega_a = {} at (delta_pL/omega_a, omega_1/omega_a) = ({}, {}) and ({}, {})",
                sweep::fmt_f64(m.gamma_al_max),
                sweep::fmt_f64(m.red.0),
                sweep::fmt_f64(m.red.1),
                sweep::fmt_f64(m.blue.0),
                sweep::fmt_f64(m.blue.1),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
