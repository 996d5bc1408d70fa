//! `--scenario` sources: a JSON scenario file or a builder such as
//! `line:n=10,battery=10000` or `tree:n=50,seed=7`.

use std::collections::BTreeMap;

use coopcensor::model::{
    build_line_scenario, build_random_tree_scenario, single_node_scenario, two_node_example,
    EnergyParams, ImportanceModel,
};
use coopcensor::{Error, Result, Scenario};

const BUILDERS: [&str; 4] = ["line", "tree", "two-node", "single"];

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(String),
    Builder { name: String, params: BTreeMap<String, String> },
}

impl Source {
    pub fn parse(text: &str) -> Result<Self> {
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        if !BUILDERS.contains(&head) {
            return Ok(Source::File(text.to_string()));
        }
        let mut params = BTreeMap::new();
        for item in rest.unwrap_or("").split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| invalid(format!("builder parameter `{item}` is not key=value")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Source::Builder { name: head.to_string(), params })
    }

    pub fn is_builder(&self, name: &str) -> bool {
        matches!(self, Source::Builder { name: n, .. } if n == name)
    }

    /// Copy of the source with `key` set, for sweeps and topology seeds.
    pub fn with(&self, key: &str, value: impl ToString) -> Result<Self> {
        match self {
            Source::File(path) => Err(invalid(format!("cannot override `{key}` on scenario file {path}"))),
            Source::Builder { name, params } => {
                let mut params = params.clone();
                params.insert(key.to_string(), value.to_string());
                Ok(Source::Builder { name: name.clone(), params })
            }
        }
    }

    /// Value of a builder parameter, falling back to the builder default.
    pub fn param(&self, key: &str, default: u64) -> Result<u64> {
        match self {
            Source::File(_) => Ok(default),
            Source::Builder { params, .. } => Params(params).get(key, default),
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        let (name, params) = match self {
            Source::File(path) => return Scenario::load(path),
            Source::Builder { name, params } => (name.as_str(), Params(params)),
        };
        let known: &[&str] = match name {
            "line" => &["n", "battery", "es", "er", "et"],
            "tree" => &["n", "seed", "battery", "es", "er", "et", "et_min", "et_max"],
            "two-node" => &["battery"],
            _ => &["c0", "c1", "mean", "battery"],
        };
        if let Some(k) = params.0.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(invalid(format!("unknown parameter `{k}` for builder `{name}`")));
        }
        let battery = params.get("battery", 10_000)?;
        match name {
            "line" => build_line_scenario(
                params.get("n", 10)? as usize,
                EnergyParams {
                    sense: params.get("es", 1)?,
                    receive: params.get("er", 5)?,
                    transmit: params.get("et", 5)?,
                },
                battery,
            ),
            "tree" => {
                let (lo, hi) = match params.0.get("et") {
                    Some(_) => {
                        let et = params.get("et", 0)?;
                        (et, et)
                    }
                    None => (params.get("et_min", 5)?, params.get("et_max", 20)?),
                };
                if !params.0.contains_key("seed") {
                    return Err(invalid("tree builder needs `seed` (or --topologies)".into()));
                }
                build_random_tree_scenario(
                    params.get("n", 50)? as usize,
                    params.get("seed", 0)?,
                    params.get("es", 1)?,
                    params.get("er", 5)?,
                    lo..=hi,
                    battery,
                )
            }
            "two-node" => Ok(two_node_example(params.get("battery", 0)?)),
            _ => {
                let mean: f64 = match params.0.get("mean") {
                    Some(v) => v.parse().map_err(|_| invalid(format!("`mean={v}` is not a number")))?,
                    None => 1.0,
                };
                single_node_scenario(
                    params.get("c0", 1)?,
                    params.get("c1", 2)?,
                    ImportanceModel::exponential(mean),
                    params.get("battery", 0)?,
                )
            }
        }
    }
}

struct Params<'a>(&'a BTreeMap<String, String>);

impl Params<'_> {
    fn get(&self, key: &str, default: u64) -> Result<u64> {
        match self.0.get(key) {
            Some(v) => v.parse().map_err(|_| invalid(format!("`{key}={v}` is not a non-negative integer"))),
            None => Ok(default),
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}
