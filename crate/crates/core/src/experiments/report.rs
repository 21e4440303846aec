//! Run outcomes, assertions, and deterministic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::config::{ExperimentConfig, ExperimentKind};

/// One named check evaluated during a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn check(name: &str, passed: bool, detail: String) -> Self {
        Assertion {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Everything a run leaves behind: provenance, per-run assertions, and the
/// list of data files written next to the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutcome {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub package_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub files: Vec<String>,
    pub assertions: Vec<Assertion>,
}

impl RunOutcome {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunOutcome {
            schema_version: config.version,
            kind: config.kind,
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            seed: config.seed,
            files: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn push(&mut self, assertion: Assertion) {
        self.assertions.push(assertion);
    }

    /// Writes `manifest.json` (and returns its path). Output is fully
    /// deterministic for a given config and seed.
    pub fn write_manifest(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let mut file = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut file, self)?;
        file.write_all(b"\n")?;
        Ok(path)
    }
}

/// Writes a CSV file with the given header and rows (already formatted).
pub fn write_csv(out_dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<String> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    writeln!(&mut text, "{header}").expect("string write");
    for row in rows {
        writeln!(&mut text, "{row}").expect("string write");
    }
    std::fs::write(&path, text)?;
    Ok(name.to_string())
}

/// Ordinary least squares fit y ≈ slope·x + intercept with the coefficient
/// of determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return (0.0, mean_y, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_sq = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r_sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, b, r2) = linear_fit(&xs, &ys);
        assert!((s - 2.5).abs() < 1e-12);
        assert!((b + 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
