//! Command-line front end: `sweep` runs a Monte-Carlo grid from a config
//! file and writes CSV, `single` runs one trial with per-subcarrier
//! diagnostics, `selftest` runs the built-in oracle checks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fdsic::sweep::{
    run_single_trial_detailed, run_sweep, sweep_points, write_csv, SweepConfig, SweepPoint,
};
use fdsic::{selftest, Result};

#[derive(Parser)]
#[command(name = "fdsic", version, about = "Full-duplex self-interference cancellation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodChoice {
    Fica,
    Ls,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep from a key=value config file and write a CSV table
    Sweep {
        /// Config file path
        config: PathBuf,
        /// Override the output path from the config file
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads for trial execution
        #[arg(long, default_value_t = default_parallelism())]
        parallelism: usize,
    },
    /// Run one trial at one operating point and print the reports
    Single {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        soi_tx_db: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        si_tx_db: f64,
        #[arg(long, default_value_t = 200.0)]
        hpr3_db: f64,
        /// Payload symbols per frame
        #[arg(long, default_value_t = 100)]
        frame_len: usize,
        #[arg(long, default_value_t = 5e-5)]
        noise_power: f64,
        #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
        method: MethodChoice,
        /// Print the per-subcarrier diagnostic table
        #[arg(long)]
        verbose: bool,
    },
    /// Run the built-in oracle checks and report pass/fail per check
    Selftest,
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Sweep { config, output, parallelism } => {
            let mut cfg = SweepConfig::from_file(&config)?;
            if let Some(path) = output {
                cfg.output = path;
            }
            let rows = run_sweep(&cfg, parallelism)?;
            let path = cfg.resolved_output();
            write_csv(&rows, &path)?;
            println!(
                "{} points x {} trials x 2 methods -> {} rows in {}",
                sweep_points(&cfg).len(),
                cfg.trials,
                rows.len(),
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Single {
            seed,
            soi_tx_db,
            si_tx_db,
            hpr3_db,
            frame_len,
            noise_power,
            method,
            verbose,
        } => {
            let cfg = SweepConfig {
                base_seed: seed,
                trials: 1,
                si_tx_db,
                soi_tx_db: vec![soi_tx_db],
                hpr3_db: vec![hpr3_db],
                frame_len: vec![frame_len],
                noise_power,
                ..SweepConfig::default()
            };
            let point = SweepPoint { soi_tx_db, hpr3_db, frame_len };
            let detail = run_single_trial_detailed(&cfg, &point, 0)?;
            let n_fft = 64; // both built-in layouts use a 64-point grid
            let show_fica = matches!(method, MethodChoice::Fica | MethodChoice::Both);
            let show_ls = matches!(method, MethodChoice::Ls | MethodChoice::Both);
            if show_fica {
                print_report("fica", &detail.fica);
                if verbose {
                    print_diag(&detail.fica_diag, n_fft);
                }
            }
            if show_ls {
                print_report("ls", &detail.ls);
                if verbose {
                    print_diag(&detail.ls_diag, n_fft);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let checks = selftest::run_all();
            let mut failed = 0;
            for c in &checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("selftest {}: {} ({})", c.name, verdict, c.detail);
                failed += usize::from(!c.pass);
            }
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn print_report(name: &str, r: &fdsic::metrics::SinrReport) {
    println!(
        "{name}: isinr {:+.2} dB  osinr {:+.2} dB  sic {:+.2} dB  ber {:.2e}  evm {:+.2} dB  ({} bits, seed {})",
        r.isinr_db, r.osinr_db, r.sic_db, r.ber, r.evm_db, r.n_bits, r.trial_seed
    );
}

fn print_diag(diag: &[fdsic::ls_sic::SubcarrierDiag], n_fft: usize) {
    println!("    k  conv  iter      cond      cplx  slotratio  leak  fellback  unrec");
    for d in diag {
        let centered = if d.subcarrier > (n_fft - 1) / 2 {
            d.subcarrier as i64 - n_fft as i64
        } else {
            d.subcarrier as i64
        };
        println!(
            "  {centered:>3}  {:>4}  {:>4}  {:>8}  {:>8}  {:>9}  {:>4}  {:>8}  {:>5}",
            if d.converged { "yes" } else { "no" },
            d.iterations,
            d.condition_number.map_or("-".into(), |v| format!("{v:.2}")),
            d.complexness.map_or("-".into(), |v| format!("{v:.4}")),
            d.silent_slot_ratio.map_or("-".into(), |v| format!("{v:.2e}")),
            if d.si_leak { "yes" } else { "no" },
            if d.fell_back { "yes" } else { "no" },
            if d.unrecoverable { "yes" } else { "no" },
        );
    }
}
