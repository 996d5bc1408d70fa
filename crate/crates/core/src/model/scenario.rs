use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CostModel, ImportanceModel, RoutingTree};
use crate::error::{Error, Result};

const PROB_TOLERANCE: f64 = 1e-9;

/// Complete network model: routing, costs, traffic and batteries.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    tree: RoutingTree,
    costs: CostModel,
    // p[0] = P(no message), p[j + 1] = P(source is node j).
    probs: Vec<f64>,
    importance: Vec<ImportanceModel>,
    initial_energy: Vec<u64>,
    seed: Option<u64>,
}

impl Scenario {
    pub fn new(
        tree: RoutingTree,
        costs: CostModel,
        probs: Vec<f64>,
        importance: Vec<ImportanceModel>,
        initial_energy: Vec<u64>,
    ) -> Result<Self> {
        let n = tree.node_count();
        if costs.node_count() != n {
            return Err(Error::InvalidScenario(format!(
                "cost matrices cover {} nodes, tree has {n}",
                costs.node_count()
            )));
        }
        if probs.len() != n + 1 {
            return Err(Error::InvalidScenario(format!(
                "source probability vector must have {} entries (p0 first), got {}",
                n + 1,
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidScenario("source probabilities must be non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidScenario(format!(
                "source probabilities sum to {total}, expected 1"
            )));
        }
        if importance.len() != n {
            return Err(Error::InvalidScenario(format!(
                "need one importance model per source ({n}), got {}",
                importance.len()
            )));
        }
        for m in &importance {
            m.validate()?;
        }
        if initial_energy.len() != n {
            return Err(Error::InvalidScenario(format!(
                "initial energy vector must have {n} entries, got {}",
                initial_energy.len()
            )));
        }
        Ok(Self { tree, costs, probs, importance, initial_energy, seed: None })
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_initial_energy(mut self, energy: Vec<u64>) -> Result<Self> {
        if energy.len() != self.node_count() {
            return Err(Error::InvalidScenario("initial energy length mismatch".into()));
        }
        self.initial_energy = energy;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.tree.node_count()
    }

    pub fn tree(&self) -> &RoutingTree {
        &self.tree
    }

    pub fn costs(&self) -> &CostModel {
        &self.costs
    }

    /// `P(no message generated)`.
    pub fn silent_prob(&self) -> f64 {
        self.probs[0]
    }

    /// `P(source = node)` for a 0-based node index.
    pub fn source_prob(&self, node: usize) -> f64 {
        self.probs[node + 1]
    }

    /// The full vector with the silent probability first.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn importance(&self, source: usize) -> &ImportanceModel {
        &self.importance[source]
    }

    pub fn importance_models(&self) -> &[ImportanceModel] {
        &self.importance
    }

    pub fn initial_energy(&self) -> &[u64] {
        &self.initial_energy
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Path feasibility: every node on the route of `source` can pay its
    /// transmission cost.
    pub fn path_feasible(&self, energy: &[u64], source: usize) -> bool {
        self.tree
            .path(source)
            .iter()
            .all(|&i| energy[i] >= self.costs.transmit(i, source))
    }

    /// Expected censoring consumption `c̄ = C0 p`, including silent epochs.
    pub fn mean_censor_cost(&self) -> Vec<f64> {
        let n = self.node_count();
        (0..n)
            .map(|i| {
                self.probs[0] * self.costs.silent(i) as f64
                    + (0..n)
                        .map(|j| self.source_prob(j) * self.costs.censor(i, j) as f64)
                        .sum::<f64>()
            })
            .collect()
    }
}

/// Energy parameters shared by the builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyParams {
    pub sense: u64,
    pub receive: u64,
    pub transmit: u64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self { sense: 1, receive: 5, transmit: 5 }
    }
}

fn routed_costs(
    tree: &RoutingTree,
    sense: u64,
    receive: u64,
    transmit_per_node: &[u64],
) -> Result<CostModel> {
    // C0 = E_S I, C1 = C0 + E_R T (1 - I) + diag(E_T) T
    let n = tree.node_count();
    let t = tree.routing_matrix();
    let mut c0 = vec![vec![0u64; n]; n];
    let mut c1 = vec![vec![0u64; n]; n];
    for i in 0..n {
        c0[i][i] = sense;
        for j in 0..n {
            c1[i][j] = c0[i][j];
            if t[i][j] == 1 {
                c1[i][j] += transmit_per_node[i];
                if i != j {
                    c1[i][j] += receive;
                }
            }
        }
    }
    CostModel::new(c0, c1, vec![0; n])
}

fn uniform_sources(n: usize) -> Vec<f64> {
    std::iter::once(0.0).chain(std::iter::repeat_n(1.0 / n as f64, n)).collect()
}

/// Line network `1 -> 2 -> ... -> n -> sink` with uniform sources and
/// exponential(1) importance.
pub fn build_line_scenario(n: usize, energy: EnergyParams, battery: u64) -> Result<Scenario> {
    if n == 0 {
        return Err(Error::InvalidParameter("line network needs at least one node".into()));
    }
    let tree = RoutingTree::line(n)?;
    let costs = routed_costs(&tree, energy.sense, energy.receive, &vec![energy.transmit; n])?;
    Scenario::new(
        tree,
        costs,
        uniform_sources(n),
        vec![ImportanceModel::exponential(1.0); n],
        vec![battery; n],
    )
}

/// Random tree: node `i` picks its next hop uniformly among the higher
/// indices `i+1..=n` (index `n` being the sink). Per-node transmission cost is
/// drawn once, uniformly over the integer range `transmit`.
pub fn build_random_tree_scenario(
    n: usize,
    seed: u64,
    sense: u64,
    receive: u64,
    transmit: RangeInclusive<u64>,
    battery: u64,
) -> Result<Scenario> {
    if n == 0 {
        return Err(Error::InvalidParameter("tree network needs at least one node".into()));
    }
    if transmit.is_empty() {
        return Err(Error::InvalidParameter("empty transmission cost range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parent = (0..n)
        .map(|i| {
            let next = rng.gen_range(i + 1..=n);
            (next < n).then_some(next)
        })
        .collect();
    let per_node: Vec<u64> = (0..n).map(|_| rng.gen_range(transmit.clone())).collect();
    let tree = RoutingTree::new(parent)?;
    let costs = routed_costs(&tree, sense, receive, &per_node)?;
    Ok(Scenario::new(
        tree,
        costs,
        uniform_sources(n),
        vec![ImportanceModel::exponential(1.0); n],
        vec![battery; n],
    )?
    .with_seed(Some(seed)))
}

/// The 2-node line used to illustrate the exact threshold surfaces:
/// `c0(1) = (3,1)`, `c0(2) = (1,3)`, `c1(1) = (11,10)`, `c1(2) = (1,10)`,
/// equiprobable sources and exponential(1) importance.
pub fn two_node_example(battery: u64) -> Scenario {
    let tree = RoutingTree::line(2).expect("two-node line");
    let costs = CostModel::new(
        vec![vec![3, 1], vec![1, 3]],
        vec![vec![11, 1], vec![10, 10]],
        vec![0, 0],
    )
    .expect("valid costs");
    Scenario::new(
        tree,
        costs,
        vec![0.0, 0.5, 0.5],
        vec![ImportanceModel::exponential(1.0); 2],
        vec![battery; 2],
    )
    .expect("valid scenario")
}

/// One node with censoring cost `c0`, transmission cost `c1`, a message every
/// epoch and the given importance model.
pub fn single_node_scenario(
    c0: u64,
    c1: u64,
    importance: ImportanceModel,
    battery: u64,
) -> Result<Scenario> {
    Scenario::new(
        RoutingTree::line(1)?,
        CostModel::new(vec![vec![c0]], vec![vec![c1]], vec![0])?,
        vec![0.0, 1.0],
        vec![importance],
        vec![battery],
    )
}
