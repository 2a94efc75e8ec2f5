//! Run reports and CSV output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Verdict {
    /// PASS iff `residual <= tolerance` (a NaN residual fails).
    pub fn new(check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { check: check.into(), pass: residual <= tolerance, residual, tolerance, detail: String::new() }
    }

    /// A check that could not be evaluated.
    pub fn failed(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { check: check.into(), pass: false, residual: f64::NAN, tolerance: 0.0, detail: detail.into() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}: residual {:.3e} (tol {:.1e})", self.check, self.residual, self.tolerance);
        if !self.detail.is_empty() {
            s.push_str(" - ");
            s.push_str(&self.detail);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub verdicts: Vec<Verdict>,
    pub files: Vec<String>,
    pub timings: Vec<Timing>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            verdicts: Vec::new(),
            files: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn push(&mut self, verdict: Verdict) {
        log::info!("{}", verdict.line());
        self.verdicts.push(verdict);
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing { stage: stage.to_string(), seconds: start.elapsed().as_secs_f64() });
        out
    }

    pub fn write(&mut self, dir: &Path) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join("report.json");
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV with a fixed header and LF line endings; returns the file name.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<String> {
    fs::create_dir_all(dir)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(dir.join(name))
        .map_err(std::io::Error::other)?;
    w.write_record(header).map_err(std::io::Error::other)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_num(x))).map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        assert!(Verdict::new("a", 1e-9, 1e-8).pass);
        assert!(!Verdict::new("a", 2e-8, 1e-8).pass);
        assert!(!Verdict::new("a", f64::NAN, 1e-8).pass);
        assert!(Verdict::new("a", 0.0, 0.0).line().starts_with("PASS a"));
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(-0.0995037190209989), "-9.9503719020998901e-2");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        write_csv(dir.path(), "a.csv", &["t", "v"], &[vec![0.0, 1.0], vec![0.5, 0.25]]).unwrap();
        let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
        assert_eq!(text, "t,v\n0.0000000000000000e0,1.0000000000000000e0\n5.0000000000000000e-1,2.5000000000000000e-1\n");
    }
}
