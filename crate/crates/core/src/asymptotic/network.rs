use crate::error::{Error, Result};
use crate::model::Scenario;

/// A connected part of a scenario: an ancestor-closed node set. Sources
/// outside the set can no longer reach the sink, so their messages are
/// always censored.
#[derive(Debug, Clone)]
pub struct Subnetwork<'a> {
    scenario: &'a Scenario,
    nodes: Vec<usize>,
    member: Vec<bool>,
    silent_prob: f64,
}

impl<'a> Subnetwork<'a> {
    pub fn full(scenario: &'a Scenario) -> Self {
        let n = scenario.node_count();
        Self {
            scenario,
            nodes: (0..n).collect(),
            member: vec![true; n],
            silent_prob: scenario.silent_prob(),
        }
    }

    /// Restrict to `nodes`; every member's next hop must be a member or the sink.
    pub fn new(scenario: &'a Scenario, mut nodes: Vec<usize>) -> Result<Self> {
        let n = scenario.node_count();
        nodes.sort_unstable();
        nodes.dedup();
        let mut member = vec![false; n];
        for &i in &nodes {
            if i >= n {
                return Err(Error::InvalidParameter(format!("no node {}", i + 1)));
            }
            member[i] = true;
        }
        for &i in &nodes {
            if let Some(p) = scenario.tree().parent(i) {
                if !member[p] {
                    return Err(Error::InvalidParameter(format!(
                        "node {} is cut off from the sink in the subnetwork",
                        i + 1
                    )));
                }
            }
        }
        let live: f64 = nodes.iter().map(|&j| scenario.source_prob(j)).sum();
        Ok(Self { scenario, nodes, member, silent_prob: (1.0 - live).max(0.0) })
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn contains(&self, node: usize) -> bool {
        self.member[node]
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Probability that no source of the set produces a message,
    /// `p̃0 = 1 - Σ_{j in set} p_j`.
    pub fn silent_prob(&self) -> f64 {
        self.silent_prob
    }

    pub fn source_prob(&self, node: usize) -> f64 {
        self.scenario.source_prob(node)
    }

    /// `c̄_i`: expected per-epoch consumption of node `i` if everything is
    /// censored. Cut-off sources keep charging their censoring column, which
    /// is what the exact recursion does once a route node is empty.
    pub fn mean_censor_cost(&self, node: usize) -> f64 {
        let s = self.scenario;
        let costs = s.costs();
        s.silent_prob() * costs.silent(node) as f64
            + (0..s.node_count())
                .map(|j| s.source_prob(j) * costs.censor(node, j) as f64)
                .sum::<f64>()
    }

    pub fn delta(&self, source: usize, node: usize) -> f64 {
        self.scenario.costs().delta(source, node) as f64
    }
}
