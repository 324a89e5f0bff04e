use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{builder::PossibleValuesParser, Parser, Subcommand};
use qfluid::output::{execute_compare, execute_run, fmt_f64, write_error_record};
use qfluid::scenario::{load_scenario, Scenario};
use qfluid::verify::{run_suite, scan_table, truncation_scan, ScanKernel, Suite};
use qfluid::Error;

/// Exit status for a numerical failure (solver abort, failed criterion).
const EXIT_FAILED: u8 = 1;
/// Exit status for bad input (unreadable or invalid scenario, bad arguments).
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "qfluid", version, about = "Ideal quantum fluid laboratory")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the hydrodynamic equations for a scenario.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run an acceptance suite and print one verdict per criterion.
    Verify {
        #[arg(value_parser = PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        /// Seed for the randomized test densities.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the hydrodynamic solver and the wave-function oracle side by side.
    Compare {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sweep the gradient-series truncation error over kernel lengths.
    Scan {
        /// gaussian | dog
        #[arg(long, default_value = "dog")]
        kernel: ScanKernel,
        /// Kernel lengths as fractions of the box.
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.04,0.08")]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        /// Directory for scan.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, out: Option<&Path>) -> Result<Scenario, ExitCode> {
    load_scenario(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        if let Some(dir) = out {
            if std::fs::create_dir_all(dir).is_ok() {
                let _ = write_error_record(dir, &e);
            }
        }
        ExitCode::from(EXIT_USAGE)
    })
}

fn failure(e: &Error) -> ExitCode {
    eprintln!("status: {}", e.kind());
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } | Error::Io(_) | Error::Csv { .. } | Error::InvalidParameter(_) | Error::InvalidGrid(_) => {
            ExitCode::from(EXIT_USAGE)
        }
        _ => ExitCode::from(EXIT_FAILED),
    }
}

fn cmd_run(path: &Path, out: &Path) -> ExitCode {
    let scenario = match load(path, Some(out)) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match execute_run(&scenario, out) {
        Ok(report) => {
            let last = report.trajectory.diagnostics.last().expect("at least the initial state");
            println!(
                "{}: {} snapshots, t = {}, mass = {}, energy = {}",
                scenario.name,
                report.trajectory.snapshots.len(),
                last.t,
                last.mass,
                last.energy
            );
            println!("outputs in {}", out.display());
            match report.status {
                Ok(()) => {
                    println!("status: ok");
                    ExitCode::SUCCESS
                }
                Err(e) => failure(&e),
            }
        }
        Err(e) => failure(&e),
    }
}

fn cmd_verify(suite: &str, seed: u64) -> ExitCode {
    let suite: Suite = suite.parse().expect("validated by clap");
    let results = run_suite(suite, seed);
    for r in &results {
        println!("{r}");
        for line in &r.table {
            println!("    {line}");
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn cmd_compare(path: &Path, out: &Path) -> ExitCode {
    let scenario = match load(path, Some(out)) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match execute_compare(&scenario, out) {
        Ok(cmp) => {
            println!(
                "{}: {} snapshots, max L2 density error {:.3e}, max phase error {:.3e}",
                scenario.name,
                cmp.snapshots.len(),
                cmp.max_density_l2,
                cmp.max_phase
            );
            println!("outputs in {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => failure(&e),
    }
}

fn cmd_scan(kernel: ScanKernel, fractions: &[f64], max_order: usize, out: Option<&Path>) -> ExitCode {
    let rows = match truncation_scan(kernel, fractions, max_order) {
        Ok(r) => r,
        Err(e) => return failure(&e),
    };
    for line in scan_table(&rows) {
        println!("{line}");
    }
    if let Some(dir) = out {
        let mut text = String::from("a_over_l");
        for n in 1..=max_order {
            let _ = write!(text, ",err_n{n}");
        }
        text.push('\n');
        for r in &rows {
            text.push_str(&fmt_f64(r.a_over_l));
            for e in &r.errors {
                text.push(',');
                text.push_str(&fmt_f64(*e));
            }
            text.push('\n');
        }
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("scan.csv"), text)) {
            return failure(&Error::from(e));
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    match &cli.command {
        Command::Run { scenario, out } => cmd_run(scenario, out),
        Command::Verify { suite, seed } => cmd_verify(suite, *seed),
        Command::Compare { scenario, out } => cmd_compare(scenario, out),
        Command::Scan { kernel, fractions, max_order, out } => cmd_scan(*kernel, fractions, *max_order, out.as_deref()),
    }
}
