use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use ccrflow_cli::report::convergence_csv;
use ccrflow_cli::{emit_convergence, run_suite, ExperimentConfig, SUITES};

const OUT_ENV: &str = "CCRFLOW_OUT";
const DEFAULT_OUT: &str = "ccrflow-out";

#[derive(Parser)]
#[command(name = "ccrflow", version, about = "Run ccrflow verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured suite, or just one, and write a CSV per suite.
    Run {
        config: PathBuf,
        #[arg(long)]
        suite: Option<String>,
        /// Output directory; falls back to the config's `output_dir`, then to
        /// $CCRFLOW_OUT, then to `ccrflow-out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for Monte Carlo replicates. Results do not depend
        /// on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the suite names.
    ListSuites,
    /// Rerun one Monte Carlo check over a ladder of replicate counts and write
    /// (n, |error|, stderr) rows.
    EmitConvergence {
        config: PathBuf,
        /// Check id as printed in the suite CSV, e.g. `sigma-inner/b~b`.
        #[arg(long)]
        check: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1_000usize, 10_000, 100_000, 1_000_000])]
        ladder: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write(dir: &Path, file: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(file);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn run(
    config: &Path,
    suite: Option<String>,
    out: Option<PathBuf>,
    workers: Option<usize>,
) -> Result<bool> {
    let cfg = ExperimentConfig::load(config)?;
    let selected: Vec<String> = match suite {
        Some(s) => {
            if !SUITES.contains(&s.as_str()) {
                bail!("unknown suite '{s}' (known: {})", SUITES.join(", "));
            }
            vec![s]
        }
        None => SUITES
            .iter()
            .filter(|s| cfg.suites.contains_key(**s))
            .map(|s| s.to_string())
            .collect(),
    };
    if selected.is_empty() {
        bail!("{} configures no suites", config.display());
    }
    let dir = out_dir(out, &cfg);
    let mut all_pass = true;
    for name in &selected {
        let report = run_suite(&cfg, name, workers)?;
        let path = write(&dir, &format!("{name}.csv"), &report.to_csv())?;
        let passed = report.rows.iter().filter(|r| r.pass).count();
        println!(
            "{name}: {passed}/{} passed in {:.2?} -> {}",
            report.rows.len(),
            report.duration,
            path.display()
        );
        for row in report.failures() {
            println!(
                "  FAIL {} value={} target={} z={:?}",
                row.check_id, row.value, row.target, row.z
            );
        }
        all_pass &= report.passed();
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListSuites => {
            for s in SUITES {
                println!("{s}");
            }
            Ok(true)
        }
        Command::Run {
            config,
            suite,
            out,
            workers,
        } => run(&config, suite, out, workers),
        Command::EmitConvergence {
            config,
            check,
            ladder,
            out,
            workers,
        } => (|| {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = emit_convergence(&cfg, &check, &ladder, workers)?;
            let file = format!(
                "convergence-{}.csv",
                check.replace(['/', '~', '*', '(', ')', ';', '='], "_")
            );
            let path = write(&out_dir(out, &cfg), &file, &convergence_csv(&rows))?;
            println!("{check}: {} rows -> {}", rows.len(), path.display());
            Ok(true)
        })(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
