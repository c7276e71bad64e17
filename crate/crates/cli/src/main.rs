use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use otoc_core::Exec;
use otoc_lab::checks::CheckKind;
use otoc_lab::{record, Config, ExperimentKind, LabError, LabResult};

#[derive(Debug, Parser)]
#[command(name = "otoc-lab", version, about = "Seeded OTOC and operator-entanglement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write `<stem>.csv` and `<stem>.json`.
    Run {
        /// TOML config; omit to run `--experiment` with defaults.
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        experiment: Option<ExperimentKind>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "OTOC_LAB_OUT", default_value = "out")]
        out: PathBuf,
        /// Worker threads for the parallel loops.
        #[arg(long)]
        threads: Option<usize>,
        /// Evaluate every loop on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Re-check a stored record (either the .csv or the .json file).
    Verify { record: PathBuf },
    /// Print the experiment names.
    ListExperiments,
}

fn load_config(config: Option<&Path>, experiment: Option<ExperimentKind>, seed: Option<u64>) -> LabResult<(Config, String)> {
    let (mut cfg, stem) = match (config, experiment) {
        (Some(path), kind) => {
            let cfg = Config::load(path)?;
            if let Some(k) = kind.filter(|k| *k != cfg.experiment) {
                return Err(LabError::Usage(format!(
                    "--experiment {k} disagrees with the config, which selects {}",
                    cfg.experiment
                )));
            }
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(cfg.experiment.name()).to_string();
            (cfg, stem)
        }
        (None, Some(kind)) => (Config::new(kind, 0), kind.name().to_string()),
        (None, None) => return Err(LabError::Usage("give a config file or --experiment".into())),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok((cfg, stem))
}

fn run(cli: Cli) -> LabResult<bool> {
    match cli.command {
        Command::ListExperiments => {
            for kind in ExperimentKind::ALL {
                println!("{:<20} {}", kind.name(), kind.summary());
            }
            Ok(true)
        }
        Command::Run { config, experiment, seed, out, threads, sequential } => {
            let (cfg, stem) = load_config(config.as_deref(), experiment, seed)?;
            if let Some(n) = threads {
                if n == 0 {
                    return Err(LabError::Usage("--threads must be positive".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| LabError::Usage(format!("thread pool: {e}")))?;
            }
            let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
            let result = record::run(&cfg, exec)?;
            let written = record::write(&out, &stem, &cfg, &result)?;
            for c in &result.checks {
                println!("{}", c.line());
            }
            println!("wrote {} ({} rows)", written.csv.display(), result.table.len());
            println!("wrote {}", written.json.display());
            Ok(result.passed())
        }
        Command::Verify { record: path } => {
            let v = record::verify(&path)?;
            for c in &v.checks {
                println!("{}", c.line());
            }
            let failed = v.checks.iter().filter(|c| c.kind == CheckKind::Assertion && !c.passed).count();
            println!("{}: {}", v.csv.display(), if failed == 0 { "verified".to_string() } else { format!("{failed} failed") });
            Ok(v.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("otoc-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
