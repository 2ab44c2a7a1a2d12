//! Solver output on disk: JSON reports that rebuild their grid on load,
//! CSV tables with round-trip precision, and run manifests with digests.

use crate::error::{Error, Result};
use crate::geometry::{build_grid, DomainSpec, ScalarField};
use crate::solver::{Certificates, LevelRecord, SolveReport, SolverConfig, Verdict};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub domain: DomainSpec,
    pub h: f64,
    pub active_nodes: usize,
}

/// A [`SolveReport`] with its grid description and configuration.
/// `u` lists one value per active node in grid order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub grid: GridRecord,
    pub u: Vec<f64>,
    pub residuals: Vec<f64>,
    pub levels: Vec<LevelRecord>,
    pub probe_nodes: Vec<usize>,
    pub certificates: Certificates,
    pub verdict: Verdict,
    pub config: SolverConfig,
}

impl ReportFile {
    pub fn new(report: &SolveReport, config: &SolverConfig) -> ReportFile {
        let grid = report.u.grid();
        ReportFile {
            grid: GridRecord { domain: grid.domain().clone(), h: grid.h(), active_nodes: grid.len() },
            u: report.u.values().to_vec(),
            residuals: report.residuals.clone(),
            levels: report.levels.clone(),
            probe_nodes: report.probe_nodes.clone(),
            certificates: report.certificates.clone(),
            verdict: report.verdict,
            config: config.clone(),
        }
    }

    /// Rebuild the grid and the report; the node count must match.
    pub fn to_report(&self) -> Result<SolveReport> {
        let grid = build_grid(&self.grid.domain, self.grid.h)?;
        if grid.len() != self.grid.active_nodes || self.u.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(SolveReport {
            u: ScalarField::new(&grid, self.u.clone())?,
            residuals: self.residuals.clone(),
            levels: self.levels.clone(),
            probe_nodes: self.probe_nodes.clone(),
            certificates: self.certificates.clone(),
            verdict: self.verdict,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn read(path: &Path) -> Result<ReportFile> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Comma-separated table with a header line and `\n` line endings.
pub fn csv_table<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (i, v) in row.as_ref().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Columns `x, y, u`.
pub fn field_csv(u: &ScalarField) -> String {
    let grid = u.grid();
    csv_table(&["x", "y", "u"], grid.nodes().iter().zip(u.values()).map(|(n, v)| [n.point.x, n.point.y, *v]))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<FileDigest> {
        Ok(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&std::fs::read(path)?) })
    }
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Everything needed to repeat a run and check that it reproduced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Command line after the program name.
    pub argv: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Acceptance thresholds applied by the command.
    pub tolerances: BTreeMap<String, f64>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn start(argv: Vec<String>) -> RunManifest {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            argv,
            domain: None,
            config: None,
            h: None,
            tolerances: BTreeMap::new(),
            started_unix: unix_seconds(),
            finished_unix: 0.0,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self) {
        self.finished_unix = unix_seconds();
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Recorded outputs whose current contents differ from their digest.
    pub fn mismatched_outputs(&self) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for d in &self.outputs {
            if FileDigest::of(Path::new(&d.path))?.sha256 != d.sha256 {
                bad.push(d.path.clone());
            }
        }
        Ok(bad)
    }
}
