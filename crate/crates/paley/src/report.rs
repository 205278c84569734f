//! Structured experiment reports.
//!
//! A report is a single JSON-compatible object; numeric sequences can
//! additionally be written as CSV side files with `k,value` columns. Field
//! order is fixed by struct declaration, and no wall-clock data is recorded,
//! so identical runs serialize byte-identically.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Parameters a run was configured with; unused entries stay `null`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Parameters {
    pub n: Option<usize>,
    pub size: Option<usize>,
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub v_scale: Option<f64>,
}

/// A named numeric sequence (dyadic coefficients, band norms, ...).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedSequence {
    pub name: String,
    pub values: Vec<f64>,
}

impl NamedSequence {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    /// CSV with columns `k,value`, matching the dyadic-coefficient schema.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,value\n");
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{k},{v:.17e}\n"));
        }
        out
    }
}

/// A named fitted constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedConstant {
    pub name: String,
    pub value: f64,
}

/// A pass/fail judgment together with the tolerance it was judged against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Observed quantity the verdict compares.
    pub observed: f64,
    /// Threshold the observation was compared to.
    pub threshold: f64,
    /// Human-readable statement of the tolerance.
    pub tolerance: String,
}

/// Where the numbers came from: grid, seed, and scan window.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub grid_dim: Option<usize>,
    pub grid_size: Option<usize>,
    pub seed: Option<u64>,
    pub scan_band_lo: Option<usize>,
    pub scan_band_hi: Option<usize>,
}

/// Structured record of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: Parameters,
    pub sequences: Vec<NamedSequence>,
    pub constants: Vec<FittedConstant>,
    pub verdicts: Vec<Verdict>,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            parameters: Parameters::default(),
            sequences: Vec::new(),
            constants: Vec::new(),
            verdicts: Vec::new(),
            provenance: Provenance::default(),
            notes: Vec::new(),
        }
    }

    pub fn push_constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.push(FittedConstant {
            name: name.into(),
            value,
        });
    }

    pub fn push_verdict(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        observed: f64,
        threshold: f64,
        tolerance: impl Into<String>,
    ) {
        self.verdicts.push(Verdict {
            name: name.into(),
            passed,
            observed,
            threshold,
            tolerance: tolerance.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// Flat CSV rendering: rows of `section,name,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,name,value\n");
        out.push_str(&format!("report,experiment,{}\n", self.experiment));
        let params = [
            ("n", self.parameters.n.map(|v| v.to_string())),
            ("size", self.parameters.size.map(|v| v.to_string())),
            ("alpha", self.parameters.alpha.map(|v| v.to_string())),
            ("s", self.parameters.s.map(|v| v.to_string())),
            ("rho", self.parameters.rho.map(|v| v.to_string())),
            ("seed", self.parameters.seed.map(|v| v.to_string())),
            ("p", self.parameters.p.map(|v| v.to_string())),
            ("epsilon", self.parameters.epsilon.map(|v| v.to_string())),
            ("delta", self.parameters.delta.map(|v| v.to_string())),
            ("v_scale", self.parameters.v_scale.map(|v| v.to_string())),
        ];
        for (name, value) in params {
            if let Some(v) = value {
                out.push_str(&format!("parameter,{name},{v}\n"));
            }
        }
        for c in &self.constants {
            out.push_str(&format!("constant,{},{:.17e}\n", c.name, c.value));
        }
        for v in &self.verdicts {
            out.push_str(&format!("verdict,{},{}\n", v.name, v.passed));
        }
        for (i, n) in self.notes.iter().enumerate() {
            out.push_str(&format!("note,{i},\"{}\"\n", n.replace('"', "'")));
        }
        out
    }

    /// Writes `<stem>.<sequence name>.csv` next to the report for every
    /// sequence; returns the written paths.
    pub fn write_sequence_csvs(&self, stem: &Path) -> Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        for seq in &self.sequences {
            let mut path = stem.to_path_buf();
            let base = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "report".to_string());
            path.set_file_name(format!("{base}.{}.csv", seq.name));
            std::fs::write(&path, seq.to_csv())?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo");
        r.parameters.n = Some(2);
        r.parameters.alpha = Some(0.75);
        r.sequences
            .push(NamedSequence::new("a_k", vec![1.0, 0.5, 0.25]));
        r.push_constant("c2", 0.125);
        r.push_verdict("decay", true, 0.1, 0.2, "observed < threshold");
        r.notes.push("scan clipped to upper half".into());
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample_report();
        let text = r.to_json().unwrap();
        let back = ExperimentReport::from_json(&text).unwrap();
        assert_eq!(back.experiment, "demo");
        assert_eq!(back.sequences[0].values, vec![1.0, 0.5, 0.25]);
        assert!(back.all_passed());
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = sample_report().to_json().unwrap();
        let b = sample_report().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_has_expected_rows() {
        let csv = sample_report().to_csv();
        assert!(csv.starts_with("section,name,value\n"));
        assert!(csv.contains("parameter,alpha,0.75"));
        assert!(csv.contains("verdict,decay,true"));
    }

    #[test]
    fn failing_verdict_fails_report() {
        let mut r = sample_report();
        r.push_verdict("bad", false, 1.0, 0.5, "observed < threshold");
        assert!(!r.all_passed());
    }
}
