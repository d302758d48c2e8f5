//! File emission: JSON report, CSV tables, and a plot-data manifest.
//! Every float in the CSVs is printed with 17 significant digits so the
//! files round-trip bit exactly; the JSON uses serde_json's shortest
//! exact representation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;

use super::report::RunReport;

/// Lists every emitted file so a plotting tool can find them blindly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputManifest {
    pub task: String,
    pub seed: u64,
    pub report: String,
    pub fidelity_table: String,
    pub pulse_tables: Vec<String>,
    pub bloch_table: Option<String>,
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path)
}

/// Write all artifacts of a run into `dir`; returns the emitted paths
/// (manifest last).
pub fn emit_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();

    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?;
    paths.push(write_file(dir, "report.json", &json)?);

    let mut fidelity = String::from("lambda,strategy,noise_kind,realization,fidelity\n");
    for row in &report.fidelity_rows {
        let _ = writeln!(
            fidelity,
            "{},{},{},{},{}",
            fmt_float(row.lambda),
            row.strategy,
            row.noise_kind,
            row.realization,
            fmt_float(row.fidelity)
        );
    }
    let fidelity_path = write_file(dir, "fidelity.csv", &fidelity)?;
    paths.push(fidelity_path.clone());

    let mut pulse_paths = Vec::new();
    for s in &report.strategies {
        let n_lines = s.pulse_samples.first().map_or(0, |row| row.len().saturating_sub(1));
        let mut csv = String::from("t");
        for i in 1..=n_lines {
            let _ = write!(csv, ",u_{i}");
        }
        csv.push('\n');
        for row in &s.pulse_samples {
            let mut it = row.iter();
            if let Some(t) = it.next() {
                csv.push_str(&fmt_float(*t));
            }
            for v in it {
                csv.push(',');
                csv.push_str(&fmt_float(*v));
            }
            csv.push('\n');
        }
        let name = format!("pulses_{}.csv", s.strategy);
        let p = write_file(dir, &name, &csv)?;
        pulse_paths.push(name);
        paths.push(p);
    }

    let bloch_name = if report.bloch.is_empty() {
        None
    } else {
        let mut csv = String::from("t,rx,ry,rz,strategy\n");
        for b in &report.bloch {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_float(b.t),
                fmt_float(b.rx),
                fmt_float(b.ry),
                fmt_float(b.rz),
                b.strategy
            );
        }
        paths.push(write_file(dir, "bloch.csv", &csv)?);
        Some("bloch.csv".to_string())
    };

    let manifest = OutputManifest {
        task: report.task.to_string(),
        seed: report.config.seed,
        report: "report.json".into(),
        fidelity_table: "fidelity.csv".into(),
        pulse_tables: pulse_paths,
        bloch_table: bloch_name,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    paths.push(write_file(dir, "manifest.json", &manifest_json)?);
    Ok(paths)
}
