//! JSON scenario documents.
//!
//! Node indices in the document are 1-based; `parent[i] == 0` means the
//! node forwards directly to the sink and `p[0]` is the probability of an
//! epoch without messages. Matrices are row-major with rows indexed by node
//! and columns by message source.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CostModel, ImportanceModel, RoutingTree, Scenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImportanceSpec {
    Shared(ImportanceModel),
    PerSource(Vec<ImportanceModel>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub nodes: usize,
    pub parent: Vec<usize>,
    #[serde(rename = "C0")]
    pub c0: Vec<Vec<u64>>,
    #[serde(rename = "C1")]
    pub c1: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub silent_cost: Option<Vec<u64>>,
    pub p: Vec<f64>,
    pub importance: ImportanceSpec,
    pub initial_energy: Vec<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let models = s.importance_models();
        let importance = if models.iter().all(|m| m == &models[0]) {
            ImportanceSpec::Shared(models[0].clone())
        } else {
            ImportanceSpec::PerSource(models.to_vec())
        };
        let silent = s.costs().silent_costs();
        ScenarioFile {
            nodes: s.node_count(),
            parent: s.tree().parents().iter().map(|p| p.map_or(0, |v| v + 1)).collect(),
            c0: s.costs().censor_matrix().to_vec(),
            c1: s.costs().transmit_matrix().to_vec(),
            silent_cost: silent.iter().any(|&c| c != 0).then(|| silent.to_vec()),
            p: s.probs().to_vec(),
            importance,
            initial_energy: s.initial_energy().to_vec(),
            seed: s.seed(),
        }
    }
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        let n = f.nodes;
        if f.parent.len() != n {
            return Err(Error::InvalidScenario(format!(
                "`parent` has {} entries, `nodes` is {n}",
                f.parent.len()
            )));
        }
        let parent = f
            .parent
            .iter()
            .map(|&p| match p {
                0 => Ok(None),
                p if p <= n => Ok(Some(p - 1)),
                p => Err(Error::InvalidScenario(format!("parent index {p} out of range"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let tree = RoutingTree::new(parent)?;
        let silent = f.silent_cost.unwrap_or_else(|| vec![0; n]);
        let costs = CostModel::new(f.c0, f.c1, silent)?;
        let importance = match f.importance {
            ImportanceSpec::Shared(m) => vec![m; n],
            ImportanceSpec::PerSource(v) => v,
        };
        Ok(Scenario::new(tree, costs, f.p, importance, f.initial_energy)?.with_seed(f.seed))
    }
}

impl Scenario {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ScenarioFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_line_scenario, build_random_tree_scenario, EnergyParams};

    #[test]
    fn round_trip_line() {
        let s = build_line_scenario(4, EnergyParams::default(), 50).unwrap();
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn document_shape() {
        let s = build_line_scenario(2, EnergyParams::default(), 7).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(v["nodes"], 2);
        assert_eq!(v["parent"], serde_json::json!([2, 0]));
        assert_eq!(v["C1"], serde_json::json!([[6, 0], [10, 6]]));
        assert_eq!(v["importance"]["kind"], "exponential");
        assert_eq!(v["importance"]["params"]["mean"], 1.0);
        assert_eq!(v["p"], serde_json::json!([0.0, 0.5, 0.5]));
    }

    #[test]
    fn random_tree_serialization_is_reproducible() {
        let a = build_random_tree_scenario(30, 99, 1, 5, 5..=20, 1000).unwrap();
        let b = build_random_tree_scenario(30, 99, 1, 5, 5..=20, 1000).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = build_random_tree_scenario(30, 100, 1, 5, 5..=20, 1000).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn per_source_importance_and_errors() {
        let text = r#"{
            "nodes": 2, "parent": [2, 0],
            "C0": [[1, 0], [0, 1]], "C1": [[2, 0], [3, 2]],
            "p": [0.2, 0.4, 0.4],
            "importance": [
                {"kind": "exponential", "params": {"mean": 2.0}},
                {"kind": "discrete", "params": {"values": [1.0, 3.0], "probabilities": [0.5, 0.5]}}
            ],
            "initial_energy": [10, 10]
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.importance(0).mean(), 2.0);
        assert_eq!(s.importance(1).mean(), 2.0);
        assert_eq!(s.silent_prob(), 0.2);
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);

        let cyclic = text.replace(r#""parent": [2, 0]"#, r#""parent": [2, 1]"#);
        assert!(Scenario::from_json(&cyclic).is_err());
        let bad_costs = text.replace(r#""C1": [[2, 0], [3, 2]]"#, r#""C1": [[0, 0], [3, 2]]"#);
        assert!(Scenario::from_json(&bad_costs).is_err());
    }
}
