//! Epoch-driven Monte Carlo simulation of censoring strategies.
//!
//! Each epoch one source is drawn (or none), its message gets an importance,
//! the strategy decides whether to send it and every node pays the cost of
//! what happened. A send succeeds only if every node on the route can pay its
//! transmission cost. The network is dead once no source can reach the sink.

mod replicate;
mod strategy;

pub use replicate::{derive_seed, run_replications, run_topologies, write_runs_csv, Aggregate, ReplicationSummary};
pub use strategy::{local_thresholds, Policy, RefreshRecord, Strategy, DEFAULT_REFRESH_INTERVAL};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotic::AsymptoticConfig;
use crate::error::Result;
use crate::model::{ImportanceSampler, Scenario};

pub const DEFAULT_MAX_EPOCHS: u64 = 50_000_000;

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Runs are cut off after this many epochs and flagged as truncated.
    pub max_epochs: u64,
    /// Solver settings for the threshold-based strategies.
    pub asymptotic: AsymptoticConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { max_epochs: DEFAULT_MAX_EPOCHS, asymptotic: AsymptoticConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub energy: Vec<u64>,
    pub epoch: u64,
    pub reward: f64,
    pub generated: u64,
    pub received: u64,
    pub discarded: u64,
    pub lost: u64,
    /// Total energy removed from batteries so far.
    pub charged: u64,
    /// Epoch at which each node's battery reached zero.
    pub death_epochs: Vec<Option<u64>>,
}

impl SimState {
    pub fn new(scenario: &Scenario) -> Self {
        let energy = scenario.initial_energy().to_vec();
        let death_epochs = energy.iter().map(|&e| (e == 0).then_some(0)).collect();
        Self {
            energy,
            epoch: 0,
            reward: 0.0,
            generated: 0,
            received: 0,
            discarded: 0,
            lost: 0,
            charged: 0,
            death_epochs,
        }
    }

    pub fn alive(&self, node: usize) -> bool {
        self.energy[node] > 0
    }

    /// Every node on the route of `source` still has energy.
    pub fn route_alive(&self, scenario: &Scenario, source: usize) -> bool {
        scenario.tree().path(source).iter().all(|&i| self.energy[i] > 0)
    }

    /// Nodes with a live route to the sink, ascending.
    pub fn live_nodes(&self, scenario: &Scenario) -> Vec<usize> {
        (0..scenario.node_count()).filter(|&j| self.route_alive(scenario, j)).collect()
    }

    /// No source with positive probability can reach the sink.
    pub fn terminated(&self, scenario: &Scenario) -> bool {
        !(0..scenario.node_count())
            .any(|j| scenario.source_prob(j) > 0.0 && self.route_alive(scenario, j))
    }
}

/// What happened in one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: u64,
    /// `None` for a silent epoch, including draws of cut-off sources.
    pub source: Option<usize>,
    pub importance: f64,
    pub transmitted: bool,
    pub delivered: bool,
    pub reward: f64,
    pub charged: u64,
}

/// Source draw plus per-source importance samplers.
#[derive(Debug, Clone)]
pub struct Sampler {
    source: WeightedIndex<f64>,
    importance: Vec<ImportanceSampler>,
}

impl Sampler {
    pub fn new(scenario: &Scenario) -> Self {
        Self {
            source: WeightedIndex::new(scenario.probs()).expect("validated probabilities"),
            importance: scenario.importance_models().iter().map(|m| m.sampler()).collect(),
        }
    }
}

fn charge(state: &mut SimState, node: usize, cost: u64) {
    let e = &mut state.energy[node];
    let paid = cost.min(*e);
    *e -= paid;
    state.charged += paid;
    if paid > 0 && *e == 0 {
        state.death_epochs[node] = Some(state.epoch);
    }
}

/// Advance `state` by one epoch.
///
/// A failed send charges the transmission cost to route nodes up to and
/// including the first one that cannot pay; nodes after it pay nothing and
/// nodes off the route pay their censoring cost.
pub fn run_epoch<R: Rng + ?Sized>(
    state: &mut SimState,
    scenario: &Scenario,
    sampler: &Sampler,
    policy: &Policy,
    rng: &mut R,
) -> EpochRecord {
    state.epoch += 1;
    let costs = scenario.costs();
    let n = scenario.node_count();
    let before = state.charged;
    let drawn = sampler.source.sample(rng);
    let source = (drawn > 0).then(|| drawn - 1).filter(|&j| state.route_alive(scenario, j));

    let mut record = EpochRecord {
        epoch: state.epoch,
        source,
        importance: 0.0,
        transmitted: false,
        delivered: false,
        reward: 0.0,
        charged: 0,
    };
    let Some(j) = source else {
        for i in 0..n {
            charge(state, i, costs.silent(i));
        }
        record.charged = state.charged - before;
        return record;
    };

    let x = sampler.importance[j].sample(rng);
    record.importance = x;
    state.generated += 1;
    if !policy.decide(j, x) {
        state.discarded += 1;
        for i in 0..n {
            charge(state, i, costs.censor(i, j));
        }
        record.charged = state.charged - before;
        return record;
    }

    record.transmitted = true;
    let path = scenario.tree().path(j);
    let blocked = path.iter().position(|&i| state.energy[i] < costs.transmit(i, j));
    let mut on_path = vec![false; n];
    for (k, &i) in path.iter().enumerate() {
        on_path[i] = true;
        if blocked.is_none_or(|b| k <= b) {
            charge(state, i, costs.transmit(i, j));
        }
    }
    for i in (0..n).filter(|&i| !on_path[i]) {
        let cost = if blocked.is_some() { costs.censor(i, j) } else { costs.transmit(i, j) };
        charge(state, i, cost);
    }
    if blocked.is_none() {
        record.delivered = true;
        record.reward = x;
        state.received += 1;
        state.reward += x;
    } else {
        state.lost += 1;
    }
    record.charged = state.charged - before;
    record
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub seed: u64,
    pub strategy: String,
    pub importance_sum: f64,
    pub generated: u64,
    pub received: u64,
    pub discarded: u64,
    /// Sends that failed on the route.
    pub lost: u64,
    /// Epochs until no source could reach the sink.
    pub lifetime_epochs: u64,
    pub death_epochs: Vec<Option<u64>>,
    pub final_energy: Vec<u64>,
    pub charged: u64,
    /// The epoch cap was hit before the network died.
    pub truncated: bool,
}

impl SimMetrics {
    fn from_state(state: &SimState, seed: u64, strategy: &Strategy, truncated: bool) -> Self {
        Self {
            seed,
            strategy: strategy.name().to_string(),
            importance_sum: state.reward,
            generated: state.generated,
            received: state.received,
            discarded: state.discarded,
            lost: state.lost,
            lifetime_epochs: state.epoch,
            death_epochs: state.death_epochs.clone(),
            final_energy: state.energy.clone(),
            charged: state.charged,
            truncated,
        }
    }
}

/// Generator for a run seed.
pub fn run_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simulate until the network dies.
pub fn simulate(scenario: &Scenario, strategy: &Strategy, seed: u64) -> Result<SimMetrics> {
    simulate_with(scenario, strategy, seed, &SimConfig::default()).map(|(m, _)| m)
}

/// Like [`simulate`], also returning every threshold refresh.
pub fn simulate_with(
    scenario: &Scenario,
    strategy: &Strategy,
    seed: u64,
    config: &SimConfig,
) -> Result<(SimMetrics, Vec<RefreshRecord>)> {
    let mut policy = Policy::with_config(scenario, strategy, config.asymptotic.clone())?;
    let sampler = Sampler::new(scenario);
    let mut rng = run_rng(seed);
    let mut state = SimState::new(scenario);
    let mut live = state.live_nodes(scenario);
    let mut truncated = false;
    while !state.terminated(scenario) {
        if state.epoch >= config.max_epochs {
            truncated = true;
            break;
        }
        policy.prepare(scenario, state.epoch, &state.energy, &live)?;
        let rec = run_epoch(&mut state, scenario, &sampler, &policy, &mut rng);
        if rec.charged > 0 && live.iter().any(|&i| state.energy[i] == 0) {
            live = state.live_nodes(scenario);
        }
    }
    Ok((SimMetrics::from_state(&state, seed, strategy, truncated), policy.into_refreshes()))
}

#[cfg(test)]
mod tests;
