use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mimo_sched::experiment::{run_experiment, ExperimentConfig};
use mimo_sched::Error;

/// Multiuser MIMO scheduling experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured method and write metrics.csv, summary.json and summary.txt.
    Run(RunArgs),
    /// Report every problem with a config without running it.
    Validate {
        /// Config file or built-in preset name (s1-desk ... s6-desk).
        config: PathBuf,
    },
    /// Run only the exhaustive-search methods.
    Oracle(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file or built-in preset name (s1-desk ... s6-desk).
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated method names, e.g. mse-lmmse,random,aua,es-mse,file:sus.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Directory of raw channel files named <realization>.txt.
    #[arg(long)]
    channel_dir: Option<PathBuf>,
    /// Directory holding <name>/<realization>.txt for file:<name> methods.
    #[arg(long)]
    schedule_dir: Option<PathBuf>,
}

impl RunArgs {
    fn apply(self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.out {
            cfg.output_dir = Some(v);
        }
        if let Some(v) = self.realizations {
            cfg.realizations = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.methods {
            cfg.methods = v;
        }
        if let Some(v) = self.channel_dir {
            cfg.channel_dir = Some(v);
        }
        if let Some(v) = self.schedule_dir {
            cfg.schedule_dir = Some(v);
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::Config(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::FAILURE,
    }
}

fn run(args: RunArgs, oracle_only: bool) -> ExitCode {
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    args.apply(&mut cfg);
    if oracle_only {
        let es: Vec<String> = cfg.methods.iter().filter(|m| m.starts_with("es-")).cloned().collect();
        cfg.methods = if es.is_empty() {
            vec!["es-mse".into(), "es-capacity".into(), "es-rate".into()]
        } else {
            es
        };
    }
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let dir = cfg.output_dir();
    if let Err(e) = report.write(&dir) {
        return fail(&e);
    }
    print!("{}", report.summary_table());
    println!("wrote {}", dir.display());
    if report.has_failures() {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => run(args, false),
        Command::Oracle(args) => run(args, true),
        Command::Validate { config } => match ExperimentConfig::load(&config) {
            Err(e) => fail(&e),
            Ok(cfg) => {
                let problems = cfg.diagnostics();
                if problems.is_empty() {
                    println!("{}: ok", config.display());
                    ExitCode::SUCCESS
                } else {
                    for p in &problems {
                        println!("{p}");
                    }
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        },
    }
}
