//! Serializable description of a run and the files it writes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use coopcensor::Result;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    SolveExact,
    SolveAsymptotic,
    Simulate,
    Sweep,
}

/// What varies across the points of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "kebab-case")]
pub enum Sweep {
    /// Number of nodes.
    Size { values: Vec<u64> },
    /// Transmission cost `E_T`.
    Et { values: Vec<u64> },
    /// `E_T / E_R` with `E_R` held at the builder's value.
    Ratio { values: Vec<f64> },
    /// Energy direction `e = r (cos φ, sin φ)` of a 2-node network.
    Phi { radius: f64, steps: usize },
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::Size { .. } => "size",
            Sweep::Et { .. } => "et",
            Sweep::Ratio { .. } => "ratio",
            Sweep::Phi { .. } => "phi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Scenario file path or builder string.
    pub scenario: String,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub strategies: Vec<String>,
    #[serde(default)]
    pub n_runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Draw a fresh random tree for every run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topologies: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emax: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<u64>,
    /// Where the files go; not part of the hash.
    #[serde(skip)]
    pub output: PathBuf,
}

impl ExperimentSpec {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub spec_hash: String,
    pub spec: ExperimentSpec,
    pub files: Vec<String>,
}

/// Output directory of one run. Every CSV starts with a comment line carrying
/// the spec hash and seed, followed by its header row.
pub struct Output {
    dir: PathBuf,
    stamp: String,
    files: Vec<String>,
}

impl Output {
    pub fn new(spec: &ExperimentSpec) -> Result<Self> {
        std::fs::create_dir_all(&spec.output)?;
        Ok(Self {
            dir: spec.output.clone(),
            stamp: format!("# spec_hash={},seed={}", spec.hash(), spec.base_seed),
            files: Vec::new(),
        })
    }

    pub fn csv(&mut self, name: &str) -> Result<BufWriter<File>> {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        writeln!(w, "{}", self.stamp)?;
        self.files.push(name.to_string());
        Ok(w)
    }

    pub fn finish(self, spec: &ExperimentSpec) -> Result<PathBuf> {
        let manifest = Manifest { spec_hash: spec.hash(), spec: spec.clone(), files: self.files };
        let path = self.dir.join(MANIFEST);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            scenario: "line:n=3".into(),
            task: Task::Sweep,
            sweep: Some(Sweep::Et { values: vec![1, 2] }),
            strategies: vec!["ns".into()],
            n_runs: 2,
            base_seed: 9,
            topologies: None,
            emax: None,
            budget: None,
            energy: None,
            max_epochs: None,
            output: "a".into(),
        }
    }

    #[test]
    fn hash_ignores_output_and_tracks_content() {
        let a = spec();
        let b = ExperimentSpec { output: "b".into(), ..spec() };
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let c = ExperimentSpec { base_seed: 10, ..spec() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn spec_round_trips() {
        let a = spec();
        let text = serde_json::to_string(&a).unwrap();
        assert!(text.contains("\"axis\":\"et\""));
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ExperimentSpec { output: PathBuf::new(), ..a });
    }
}
