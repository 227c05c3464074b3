use clap::{Parser, Subcommand};
use fsi_cli::bench::{run_suite, Suite};
use fsi_cli::config::{load_config, ConfigError, SolverConfig};
use fsi_cli::report::exit;
use fsi_cli::runner::{self, RunError};
use fsi_cli::verify::{run_criterion, table, VerifyContext};
use fsi_cli::{plot, scenarios};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Fluid-structure solver for a channel closed by an elastic beam.
#[derive(Parser)]
#[command(name = "fsi", version)]
struct Cli {
    /// Worker threads (nonlinear evaluation in `run`, scenarios in `bench`).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Output directory; overrides `output.dir` of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve from the initial data up to `run.target`.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Continue from a slab-end snapshot.
    Restart {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Acceptance checks; prints a table and writes verify.json.
    Verify {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        /// Seed of the randomized checks.
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
    /// Benchmark sweep: contraction (a), graph-rect (b), small-data (c),
    /// grid (d) or all.
    Bench {
        suite: String,
        /// Grid size `n` of the `n x n` fluid grid.
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// SVG figures from a run directory.
    Plot {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Print the TOML of a built-in scenario.
    Template {
        name: String,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
}

fn out_dir(cli: &Option<PathBuf>, cfg: &SolverConfig) -> PathBuf {
    cli.clone().unwrap_or_else(|| cfg.output.dir.clone())
}

fn load(path: &Path) -> Result<(SolverConfig, PathBuf), ExitCode> {
    load_config(path).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(exit::CONFIG as u8)
    })
}

fn run_error(e: RunError) -> ExitCode {
    eprintln!("{e}");
    match e {
        RunError::Config(_) | RunError::Snapshot { .. } | RunError::Mismatch { .. } => ExitCode::from(exit::CONFIG as u8),
        RunError::Output { .. } => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FSI_LOG", "warn")).init();
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { ref config } => {
            let (cfg, base) = match load(config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let out = out_dir(&cli.out, &cfg);
            match runner::execute(&cfg, &base, &out, cli.workers) {
                Ok(r) => {
                    println!("{:?}: t = {:.6} of {} in {} slabs -> {}", r.status, r.end_time, r.target, r.slabs.len(), out.display());
                    ExitCode::from(r.exit_code as u8)
                }
                Err(e) => run_error(e),
            }
        }
        Cmd::Restart { ref snapshot, ref config } => {
            let (cfg, base) = match load(config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let out = out_dir(&cli.out, &cfg);
            match runner::restart(&cfg, &base, snapshot, &out, cli.workers) {
                Ok(r) => {
                    println!("{:?}: t = {:.6} of {} in {} slabs -> {}", r.status, r.end_time, r.target, r.slabs.len(), out.display());
                    ExitCode::from(r.exit_code as u8)
                }
                Err(e) => run_error(e),
            }
        }
        Cmd::Verify { criteria, seed } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("verify"));
            if let Err(e) = std::fs::create_dir_all(&out) {
                eprintln!("{}: {e}", out.display());
                return ExitCode::from(1);
            }
            let ids: Vec<u8> = if criteria.is_empty() { (1..=13).collect() } else { criteria };
            let ctx = VerifyContext {
                seed,
                workers: cli.workers,
                scratch: out.join("scratch"),
            };
            let mut results = Vec::new();
            for id in ids {
                let r = run_criterion(id, &ctx);
                print!("{}", table(std::slice::from_ref(&r)));
                results.push(r);
            }
            let path = out.join("verify.json");
            let json = serde_json::to_string_pretty(&results).expect("results serialize");
            if let Err(e) = std::fs::write(&path, json) {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(1);
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} passed; report in {}", results.len() - failed, results.len(), path.display());
            ExitCode::from(u8::from(failed > 0))
        }
        Cmd::Bench { ref suite, grid } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                match Suite::parse(suite) {
                    Some(s) => vec![s],
                    None => {
                        eprintln!("unknown suite {suite:?}; use a, b, c, d, their names, or all");
                        return ExitCode::from(exit::CONFIG as u8);
                    }
                }
            };
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("bench"));
            for s in suites {
                match run_suite(s, grid, cli.workers, &out) {
                    Ok(files) => {
                        for f in files {
                            println!("{}", f.display());
                        }
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", s.name());
                        return ExitCode::from(exit::SOLVER as u8);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Plot { ref dir } => {
            let out = cli.out.clone().unwrap_or_else(|| dir.join("plots"));
            match plot::plot_dir(dir, &out) {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
            }
        }
        Cmd::Template { ref name, grid } => match scenarios::by_name(name, grid) {
            Some(c) => {
                print!("{}", c.to_toml());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("{}", ConfigError::Invalid(vec![format!("unknown scenario {name:?}; known: {}", scenarios::NAMES.join(", "))]));
                ExitCode::from(exit::CONFIG as u8)
            }
        },
    }
}
