//! Run records: the CSV rows plus a JSON sidecar holding the config echo,
//! check outcomes and metadata.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use otoc_core::Exec;

use crate::checks::{self, Check};
use crate::config::Config;
use crate::error::{LabError, LabResult};
use crate::experiments::run_experiment;
use crate::table::Table;

pub const TOOL: &str = "otoc-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config: Config,
    pub columns: Vec<String>,
    pub rows: usize,
    pub csv: String,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub runtime_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub checks: Vec<Check>,
    pub runtime_seconds: f64,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        checks::all_passed(&self.checks)
    }
}

pub fn run(cfg: &Config, exec: Exec) -> LabResult<RunOutput> {
    let start = Instant::now();
    let table = run_experiment(cfg, exec)?;
    let checks = checks::evaluate(cfg, &table)?;
    Ok(RunOutput { table, checks, runtime_seconds: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write(dir: &Path, stem: &str, cfg: &Config, out: &RunOutput) -> LabResult<Written> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    let mut bytes = Vec::new();
    out.table.write_csv(&mut bytes)?;
    fs::write(&csv, bytes).map_err(|e| LabError::io(&csv, e))?;
    let sidecar = Sidecar {
        tool: TOOL.into(),
        version: VERSION.into(),
        experiment: cfg.experiment.name().into(),
        seed: cfg.seed,
        config: cfg.clone(),
        columns: out.table.columns().to_vec(),
        rows: out.table.len(),
        csv: format!("{stem}.csv"),
        checks: out.checks.clone(),
        passed: out.passed(),
        runtime_seconds: out.runtime_seconds,
        threads: rayon::current_num_threads(),
    };
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serialises");
    fs::write(&json, text + "\n").map_err(|e| LabError::io(&json, e))?;
    Ok(Written { csv, json })
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub csv: PathBuf,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        checks::all_passed(&self.checks)
    }
}

/// Re-evaluates every invariant from the stored rows. Accepts either file of
/// the pair.
pub fn verify(path: &Path) -> LabResult<Verification> {
    let json = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => path.to_path_buf(),
        Some("csv") => path.with_extension("json"),
        _ => return Err(LabError::Usage(format!("{}: expected a .csv or .json record", path.display()))),
    };
    let text = fs::read_to_string(&json).map_err(|e| LabError::io(&json, e))?;
    let sidecar: Sidecar = serde_json::from_str(&text)
        .map_err(|e| LabError::Parse(format!("{}: line {}, column {}: {e}", json.display(), e.line(), e.column())))?;
    if sidecar.tool != TOOL {
        return Err(LabError::Parse(format!("{}: not a {TOOL} record", json.display())));
    }
    let csv = json.with_file_name(&sidecar.csv);
    let file = fs::File::open(&csv).map_err(|e| LabError::io(&csv, e))?;
    let table = Table::read_csv(std::io::BufReader::new(file)).map_err(|e| match e {
        LabError::Parse(msg) => LabError::Parse(format!("{}: {msg}", csv.display())),
        other => other,
    })?;
    let mut found = Vec::new();
    let same_rows = table.len() == sidecar.rows && table.columns() == sidecar.columns.as_slice();
    found.push(Check {
        name: "sidecar-match".into(),
        kind: checks::CheckKind::Assertion,
        passed: same_rows,
        detail: format!("{} rows on file, {} recorded", table.len(), sidecar.rows),
    });
    let config = sidecar.config.clone();
    if config.experiment.name() != sidecar.experiment {
        return Err(LabError::Parse(format!("{}: experiment field disagrees with the config", json.display())));
    }
    found.extend(checks::evaluate(&config, &table).map_err(|e| match e {
        LabError::Parse(msg) => LabError::Parse(format!("{}: {msg}", csv.display())),
        other => other,
    })?);
    Ok(Verification { csv, checks: found })
}
