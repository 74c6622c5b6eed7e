//! Run reports and their on-disk layout.
//!
//! Every invocation lands in `<output>/<run-id>/` with three artifacts:
//! `config.json` (the effective configuration, replayable as-is),
//! `report.json` (verdicts, residual and solution tables, notes, timings),
//! and `tables/<name>.csv` (the same tables, one file each). Two runs with
//! the same effective config produce byte-identical reports except for the
//! `timings` object, which is why timings live under their own top-level key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sovlab_core::C64;

use crate::config::RunConfig;
use crate::CliError;

/// Complex scalar rendered as `re+imj`, e.g. `1.3-0.25j`.
pub fn fmt_c(z: C64) -> String {
    format!("{}{:+}j", z.re, z.im)
}

pub fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub value: f64,
    pub bound: f64,
    /// `"<="` for residual bounds, `">"` for rank/margin floors.
    pub op: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)
            .and_then(|_| self.rows.iter().try_for_each(|r| w.write_record(r)))
            .map_err(|e| CliError::Config(format!("csv serialization failed: {e}")))?;
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Config(format!("csv serialization failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Config(format!("csv not utf-8: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub verdicts: Vec<Verdict>,
    pub tables: BTreeMap<String, Table>,
    pub notes: Vec<String>,
    /// Wall-clock phase timings in seconds. Deliberately the only
    /// nondeterministic part of the report.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, config: RunConfig) -> Self {
        RunReport {
            command: command.to_string(),
            config,
            verdicts: Vec::new(),
            tables: BTreeMap::new(),
            notes: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Residual-style verdict: pass iff `value <= bound`.
    pub fn le(&mut self, check: &str, value: f64, bound: f64) -> bool {
        let pass = value <= bound && value.is_finite();
        self.verdicts.push(Verdict {
            check: check.to_string(),
            value,
            bound,
            op: "<=".into(),
            pass,
        });
        pass
    }

    /// Certificate-style verdict: pass iff `value > bound`.
    pub fn ge(&mut self, check: &str, value: f64, bound: f64) -> bool {
        let pass = value > bound && value.is_finite();
        self.verdicts.push(Verdict {
            check: check.to_string(),
            value,
            bound,
            op: ">".into(),
            pass,
        });
        pass
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.insert(name.to_string(), table);
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// `<timestamp>-<8 hex chars of the config hash>`, suffixed if the second
/// ticks twice for the same config. Existing run directories are never
/// touched again.
fn unique_run_dir(base: &Path, config: &RunConfig) -> Result<PathBuf, CliError> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let body = serde_json::to_vec(config)
        .map_err(|e| CliError::Config(format!("cannot hash config: {e}")))?;
    let digest = Sha256::digest(&body);
    let short: String = digest.iter().take(4).map(|b| format!("{b:02x}")).collect();
    let stem = format!("{stamp}-{short}");
    for attempt in 0..1000 {
        let name = if attempt == 0 {
            stem.clone()
        } else {
            format!("{stem}-{attempt}")
        };
        let dir = base.join(&name);
        match std::fs::create_dir_all(dir.parent().unwrap_or(base))
            .and_then(|_| std::fs::create_dir(&dir))
        {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => {
                return Err(CliError::Config(format!(
                    "cannot create run directory {}: {e}",
                    dir.display()
                )))
            }
        }
    }
    Err(CliError::Config("run directory namespace exhausted".into()))
}

/// Persist the three artifacts; returns the run directory.
pub fn persist(report: &RunReport) -> Result<PathBuf, CliError> {
    let dir = unique_run_dir(Path::new(&report.config.output), &report.config)?;
    let write = |path: PathBuf, text: String| -> Result<(), CliError> {
        std::fs::write(&path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
    };
    let config_json = serde_json::to_string_pretty(&report.config)
        .map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))?;
    write(dir.join("config.json"), config_json + "\n")?;
    let report_json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))?;
    write(dir.join("report.json"), report_json + "\n")?;
    let tables_dir = dir.join("tables");
    std::fs::create_dir_all(&tables_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", tables_dir.display())))?;
    for (name, table) in &report.tables {
        write(tables_dir.join(format!("{name}.csv")), table.to_csv()?)?;
    }
    Ok(dir)
}
