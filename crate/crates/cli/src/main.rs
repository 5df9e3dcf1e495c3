use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qkin_cli::{run_suite, Report, SuiteConfig};
use qkin_core::constants::{PhysicalConstants, UnitSystem};
use qkin_core::hegerfeldt::{spreading_report, SpreadingConfig};
use qkin_core::modular::unruh_chain;
use qkin_opexpr::{normal_order, parse};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "qkin", version, about = "Numerical checks for canonical quantization and modular theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite: fock, photon, scaffold, opexpr, modular, hegerfeldt or all.
    Run {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override ħ (natural units only).
        #[arg(long)]
        hbar: Option<f64>,
        /// Replace the configured seed list with a single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report.json and CSV tables; JSON goes to stdout otherwise.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the normal-ordered form of an operator expression.
    NormalOrder { expr: String },
    /// Print the thermal parameters seen by a uniformly accelerated observer.
    Unruh {
        #[arg(long, allow_negative_numbers = true)]
        accel: f64,
        #[arg(long, default_value = "SI")]
        units: UnitSystem,
    },
    /// Print the leakage table for a compactly supported free wavepacket.
    Hegerfeldt {
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn run(suite: &str, config: Option<PathBuf>, hbar: Option<f64>, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let mut cfg = match config {
        Some(p) => match SuiteConfig::load(&p) {
            Ok(c) => c,
            Err(e) => return fail(e),
        },
        None => SuiteConfig::default(),
    };
    if hbar.is_some() {
        if cfg.unit_system == UnitSystem::Si {
            eprintln!("warning: --hbar is ignored in SI mode");
        }
        cfg.hbar_value = hbar;
    }
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    let report: Report = match run_suite(suite, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    eprint!("{}", report.summary());
    match out {
        Some(dir) => {
            if let Err(e) = report.write_dir(&dir) {
                return fail(format!("cannot write report to {}: {e}", dir.display()));
            }
        }
        None => println!("{}", report.to_json()),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn unruh(accel: f64, units: UnitSystem) -> ExitCode {
    let p = match unruh_chain(accel, PhysicalConstants::for_units(units), 1.0) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let (rate, period, temp) = match units {
        UnitSystem::Si => ("1/s", "s", "K"),
        UnitSystem::Natural => ("", "", ""),
    };
    println!("rapidity_rate = {:.15e} {rate}", p.rapidity_rate());
    println!("beta_tau = {:.15e} {period}", p.beta_tau);
    println!("T_U = {:.15e} {temp}", p.temperature);
    ExitCode::SUCCESS
}

fn hegerfeldt(grid: Option<usize>, times: Option<Vec<f64>>) -> ExitCode {
    let mut cfg = SpreadingConfig::default();
    if let Some(n) = grid {
        cfg.grid_points = n;
    }
    if let Some(t) = times {
        cfg.times = t;
    }
    let report = match spreading_report(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    println!("t,leakage,leakage_doubled,lattice_leakage,lattice_envelope,norm_error");
    for r in &report.rows {
        println!(
            "{:e},{:e},{:e},{:e},{:e},{:e}",
            r.t, r.leakage, r.leakage_doubled, r.lattice_leakage, r.lattice_envelope, r.norm_error
        );
    }
    let checks = report.checks();
    for c in &checks {
        eprintln!("{}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { suite, config, hbar, seed, report } => run(&suite, config, hbar, seed, report),
        Command::NormalOrder { expr } => match parse(&expr) {
            Ok(e) => {
                println!("{}", normal_order(&e));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_USAGE)
            }
        },
        Command::Unruh { accel, units } => unruh(accel, units),
        Command::Hegerfeldt { grid, t } => hegerfeldt(grid, t),
    }
}
