use rayon::prelude::*;

use super::{simulate_with, SimConfig, SimMetrics, Strategy};
use crate::error::{Error, Result};
use crate::model::Scenario;

/// Seed of replication `run`: a SplitMix64 step over `base ^ golden·run`,
/// so neighbouring runs get unrelated generators.
pub fn derive_seed(base: u64, run: u64) -> u64 {
    let mut z = base ^ run.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample mean, standard deviation (n - 1) and 95% normal CI half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub ci_half_width: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std, ci_half_width: 1.96 * std / n.sqrt() }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci_half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci_half_width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub strategy: String,
    pub base_seed: u64,
    /// Runs in replication order.
    pub runs: Vec<SimMetrics>,
    pub importance_sum: Aggregate,
    pub generated: Aggregate,
    pub received: Aggregate,
    pub discarded: Aggregate,
    pub lost: Aggregate,
    pub lifetime_epochs: Aggregate,
}

/// `n_runs` independent runs with seeds `derive_seed(base_seed, r)`,
/// executed in parallel and reduced in run order.
pub fn run_replications(
    scenario: &Scenario,
    strategy: &Strategy,
    n_runs: usize,
    base_seed: u64,
    config: &SimConfig,
) -> Result<ReplicationSummary> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    let runs = (0..n_runs as u64)
        .into_par_iter()
        .map(|r| simulate_with(scenario, strategy, derive_seed(base_seed, r), config).map(|(m, _)| m))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(strategy, base_seed, runs))
}

/// One run on each of `n_topologies` random networks. Topology `t` is built
/// from seed `derive_seed(base_seed, t)` and simulated with
/// `derive_seed(that seed, 0)`.
pub fn run_topologies<F>(
    build: F,
    strategy: &Strategy,
    n_topologies: usize,
    base_seed: u64,
    config: &SimConfig,
) -> Result<ReplicationSummary>
where
    F: Fn(u64) -> Result<Scenario> + Sync,
{
    if n_topologies == 0 {
        return Err(Error::InvalidParameter("need at least one topology".into()));
    }
    let runs = (0..n_topologies as u64)
        .into_par_iter()
        .map(|t| {
            let topology = derive_seed(base_seed, t);
            let scenario = build(topology)?;
            simulate_with(&scenario, strategy, derive_seed(topology, 0), config).map(|(m, _)| m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(strategy, base_seed, runs))
}

fn summarize(strategy: &Strategy, base_seed: u64, runs: Vec<SimMetrics>) -> ReplicationSummary {
    let agg = |f: fn(&SimMetrics) -> f64| Aggregate::of(&runs.iter().map(f).collect::<Vec<_>>());
    ReplicationSummary {
        strategy: strategy.name().to_string(),
        base_seed,
        importance_sum: agg(|m| m.importance_sum),
        generated: agg(|m| m.generated as f64),
        received: agg(|m| m.received as f64),
        discarded: agg(|m| m.discarded as f64),
        lost: agg(|m| m.lost as f64),
        lifetime_epochs: agg(|m| m.lifetime_epochs as f64),
        runs,
    }
}

/// Per-run records:
/// `run,seed,strategy,importance_sum,generated,received,discarded,lifetime_epochs,death_epoch_1..N`.
/// Nodes that never died get an empty death epoch.
pub fn write_runs_csv<W: std::io::Write>(runs: &[SimMetrics], node_count: usize, mut out: W) -> Result<()> {
    write!(out, "run,seed,strategy,importance_sum,generated,received,discarded,lifetime_epochs")?;
    for i in 1..=node_count {
        write!(out, ",death_epoch_{i}")?;
    }
    writeln!(out)?;
    for (r, m) in runs.iter().enumerate() {
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r, m.seed, m.strategy, m.importance_sum, m.generated, m.received, m.discarded, m.lifetime_epochs
        )?;
        for d in &m.death_epochs {
            match d {
                Some(k) => write!(out, ",{k}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
