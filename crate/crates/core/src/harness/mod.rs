//! Experiment runner: configuration, the experiments and their CSV output.
//!
//! Every run writes `<experiment>.csv`, any extra tables as
//! `<experiment>.<name>.csv`, `<experiment>.checks.csv` with one row per
//! check, and `<experiment>.summary.csv` with the pass count.

pub mod config;
mod experiments;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{ConfigEntry, Experiment, ExperimentConfig, Origin, Sweep, TestFunction};
pub use experiments::{
    orthonormality_error, run_experiment, Check, ExperimentOutput, Status, DENSE_BUDGET, GRAM_BUDGET,
    KERNEL_BUDGET, NAIVE_BUDGET, TENSOR_BUDGET,
};

use crate::error::{Error, Result};

/// Result of one experiment written to disk.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub experiment: Experiment,
    pub output: ExperimentOutput,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.output.all_passed()
    }
}

/// Write `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn checks_csv(out: &ExperimentOutput) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "status", "value"])?;
    for c in &out.checks {
        w.write_record([c.name.as_str(), c.status.label(), c.value.as_str()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn summary_csv(name: &str, out: &ExperimentOutput) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "checks_passed", "checks_total"])?;
    w.write_record([name.to_string(), out.passed().to_string(), out.total().to_string()])?;
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Run one experiment and write its files under `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let mut output = run_experiment(cfg)?;
    output.checks.push(Check::info("seed", cfg.seed));
    let name = cfg.experiment.name();
    let dir = Path::new(&cfg.out);
    let mut files = Vec::new();
    let mut emit = |file: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(file);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    emit(format!("{name}.csv"), &output.table)?;
    for (suffix, bytes) in &output.extras {
        emit(format!("{name}.{suffix}.csv"), bytes)?;
    }
    emit(format!("{name}.checks.csv"), &checks_csv(&output)?)?;
    emit(format!("{name}.summary.csv"), &summary_csv(name, &output)?)?;
    Ok(RunOutcome {
        experiment: cfg.experiment,
        output,
        files,
    })
}
