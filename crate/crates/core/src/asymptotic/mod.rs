//! Asymptotic constant thresholds from the critical-node recursion.
//!
//! Far from the energy axes the optimal value function is close to linear,
//! `λ(e) ≈ wᵀe + w0`, and thresholds become `μ = Δ·w`. The slope vector is
//! pinned down by which node is expected to run out of energy first (the
//! critical node `i`):
//!
//! * nodes routed through `i` gain nothing from extra energy, `w_D = 0`;
//! * the surviving nodes get their slopes from the same procedure applied to
//!   the subnetwork left after `i` dies, with energies reduced by the
//!   expected consumption over `i`'s lifetime;
//! * `w_i` solves `c̄_i w_i + c̄_Sᵀ w_S = Σ_j p_j h_j(Δ_ji w_i + (Δ_S w_S)_j)`.
//!
//! [`solve`] alternates critical-node identification and threshold
//! computation, starting from `μ = 0`, until the thresholds stop changing.

mod lifetime;
mod network;
mod partition;
mod slope;
mod sweep;

pub use lifetime::{critical_node, stationary_lifetimes, LifetimeEstimate};
pub(crate) use lifetime::estimate;
pub use network::Subnetwork;
pub use partition::{split_graph, NodePartition};
pub use slope::solve_w_i;
pub use sweep::{polar_sweep, write_sweep_csv, PolarPoint};

use crate::error::{Error, Result};
use crate::model::Scenario;

#[derive(Debug, Clone)]
pub struct AsymptoticConfig {
    /// Convergence tolerance on `‖μ - μ_prev‖_∞`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Absolute tolerance of the slope root finder.
    pub bisection_tol: f64,
    /// Per-source success probability `Q_j`; `None` means 1 everywhere.
    pub success: Option<Vec<f64>>,
    /// Energies below this floor are flagged as outside the asymptotic regime.
    pub validity_floor: f64,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 100,
            bisection_tol: 1e-10,
            success: None,
            validity_floor: 0.0,
        }
    }
}

impl AsymptoticConfig {
    pub(crate) fn success(&self, source: usize) -> f64 {
        self.success.as_ref().map_or(1.0, |q| q[source])
    }
}

/// Slope of the linear value approximation per node (`w0` is not needed).
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeVector(pub Vec<f64>);

/// Constant threshold per message source; `+∞` for sources outside the
/// solved subnetwork.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticThresholds(pub Vec<f64>);

impl AsymptoticThresholds {
    pub fn get(&self, source: usize) -> f64 {
        self.0[source]
    }
}

/// One pass of the outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub critical: usize,
    pub lifetime: f64,
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSolution {
    pub thresholds: AsymptoticThresholds,
    pub slopes: SlopeVector,
    pub partition: NodePartition,
    /// Stationary lifetimes that selected the critical node.
    pub lifetimes: LifetimeEstimate,
    /// Solution of the surviving subnetwork, if any.
    pub surviving: Option<Box<AsymptoticSolution>>,
    pub iterations: usize,
    /// Set when the partition alternated between two values at any level.
    pub oscillated: bool,
    pub below_validity_floor: bool,
    pub trace: Vec<IterationRecord>,
}

impl AsymptoticSolution {
    /// Critical nodes from this level down to the last surviving subnetwork.
    pub fn critical_sequence(&self) -> Vec<usize> {
        let mut out = vec![self.partition.critical];
        let mut cur = &self.surviving;
        while let Some(s) = cur {
            out.push(s.partition.critical);
            cur = &s.surviving;
        }
        out
    }

    /// Critical-node lifetimes from this level down.
    pub fn lifetime_sequence(&self) -> Vec<f64> {
        let mut out = vec![self.partition.lifetime];
        let mut cur = &self.surviving;
        while let Some(s) = cur {
            out.push(s.partition.lifetime);
            cur = &s.surviving;
        }
        out
    }

    /// Human-readable iteration trace, one line per pass.
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let mu: Vec<String> = r
                    .thresholds
                    .iter()
                    .map(|m| if m.is_finite() { format!("{m:.6}") } else { "inf".into() })
                    .collect();
                format!(
                    "iter {} critical={} lifetime={:.3} mu=[{}]",
                    k + 1,
                    r.critical + 1,
                    r.lifetime,
                    mu.join(", ")
                )
            })
            .collect()
    }
}

/// Thresholds for the full network at energy `energy`.
pub fn solve(scenario: &Scenario, energy: &[f64], config: &AsymptoticConfig) -> Result<AsymptoticSolution> {
    if energy.len() != scenario.node_count() {
        return Err(Error::InvalidParameter(format!(
            "need {} energies, got {}",
            scenario.node_count(),
            energy.len()
        )));
    }
    solve_subnetwork(&Subnetwork::full(scenario), energy, config)
}

/// Thresholds for a connected subnetwork; `energy` is indexed by node over
/// the whole scenario.
pub fn solve_subnetwork(
    net: &Subnetwork<'_>,
    energy: &[f64],
    config: &AsymptoticConfig,
) -> Result<AsymptoticSolution> {
    if net.is_empty() {
        return Err(Error::InvalidParameter("empty subnetwork".into()));
    }
    if let Some(q) = &config.success {
        if q.len() != net.scenario().node_count() || q.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
            return Err(Error::InvalidParameter(
                "success probabilities must be in (0, 1], one per source".into(),
            ));
        }
    }
    iterate(net, energy, config, None)
}

fn max_diff(net: &Subnetwork<'_>, a: &[f64], b: &[f64]) -> f64 {
    net.nodes().iter().map(|&j| (a[j] - b[j]).abs()).fold(0.0, f64::max)
}

/// Outer loop: critical node given thresholds, thresholds given critical node.
///
/// `warm` is the previous solution of the same subnetwork; recursive levels
/// start from it instead of `μ = 0` so that an unchanged partition chain is
/// confirmed in one pass.
fn iterate(
    net: &Subnetwork<'_>,
    energy: &[f64],
    config: &AsymptoticConfig,
    warm: Option<&AsymptoticSolution>,
) -> Result<AsymptoticSolution> {
    let n = net.scenario().node_count();
    let mut mu: Vec<f64> = match warm {
        Some(w) => w.thresholds.0.clone(),
        None => (0..n).map(|j| if net.contains(j) { 0.0 } else { f64::INFINITY }).collect(),
    };
    let mut history: Vec<AsymptoticSolution> = Vec::new();
    let mut trace = Vec::new();

    for it in 1..=config.max_iterations {
        let est = lifetime::estimate(net, &mu, energy, config);
        let (critical, life) = critical_node_in(net, &est)?;
        let part = partition::partition(net, critical, life);
        let sub_warm = history
            .last()
            .or(warm)
            .and_then(|p| p.surviving.as_deref())
            .filter(|s| s.partition_nodes() == part.surviving.as_slice());
        let mut sol = thresholds(net, part, &est, energy, config, sub_warm)?;
        trace.push(IterationRecord {
            critical,
            lifetime: life,
            thresholds: sol.thresholds.0.clone(),
        });
        sol.iterations = it;

        if max_diff(net, &sol.thresholds.0, &mu) <= config.tolerance {
            sol.trace = trace;
            return Ok(sol);
        }
        if let Some(k) = history
            .iter()
            .position(|h| max_diff(net, &sol.thresholds.0, &h.thresholds.0) <= config.tolerance)
        {
            // cycle: keep the member whose depletion sequence starts earliest
            let mut pick = sol;
            for c in history.drain(k + 1..) {
                if c.lifetime_sequence() < pick.lifetime_sequence() {
                    pick = c;
                }
            }
            pick.oscillated = true;
            pick.iterations = it;
            pick.trace = trace;
            return Ok(pick);
        }
        mu = sol.thresholds.0.clone();
        history.push(sol);
    }
    Err(Error::NoConvergence {
        iterations: config.max_iterations,
        trace: AsymptoticSolution {
            trace,
            ..history.pop().expect("at least one iteration")
        }
        .trace_lines(),
    })
}

impl AsymptoticSolution {
    /// Node set this solution was computed on.
    fn partition_nodes(&self) -> Vec<usize> {
        let p = &self.partition;
        let mut nodes: Vec<usize> =
            p.disconnected.iter().chain(&p.surviving).copied().chain([p.critical]).collect();
        nodes.sort_unstable();
        nodes
    }
}

fn critical_node_in(net: &Subnetwork<'_>, est: &LifetimeEstimate) -> Result<(usize, f64)> {
    // entries outside the subnetwork are +∞ and never selected
    critical_node(est).map_err(|_| {
        Error::Degenerate(format!(
            "no node of subnetwork {:?} has a finite lifetime",
            net.nodes().iter().map(|i| i + 1).collect::<Vec<_>>()
        ))
    })
}

/// Thresholds and slopes given the critical node of `net`.
fn thresholds(
    net: &Subnetwork<'_>,
    part: NodePartition,
    est: &LifetimeEstimate,
    energy: &[f64],
    config: &AsymptoticConfig,
    warm: Option<&AsymptoticSolution>,
) -> Result<AsymptoticSolution> {
    let scenario = net.scenario();
    let n = scenario.node_count();
    let mut w = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut surviving = None;
    let mut oscillated = false;

    if !part.surviving.is_empty() {
        let sub = Subnetwork::new(scenario, part.surviving.clone())?;
        // expected energy left when the critical node dies
        let mut reduced = energy.to_vec();
        for &s in &part.surviving {
            reduced[s] = (energy[s] - part.lifetime * est.consumption[s]).max(0.0);
        }
        let sub_sol = iterate(&sub, &reduced, config, warm)?;
        for &s in &part.surviving {
            w[s] = sub_sol.slopes.0[s];
        }
        for &j in net.nodes() {
            beta[j] = part.surviving.iter().map(|&s| net.delta(j, s) * w[s]).sum();
        }
        oscillated = sub_sol.oscillated;
        surviving = Some(Box::new(sub_sol));
    }

    w[part.critical] = slope::slope_with_surviving(net, part.critical, &part.surviving, &beta, config)?;
    // w_D stays zero: energy behind the critical node is never used

    let mut mu = vec![f64::INFINITY; n];
    for &j in net.nodes() {
        mu[j] = net.nodes().iter().map(|&k| net.delta(j, k) * w[k]).sum();
    }
    let below_validity_floor = net.nodes().iter().any(|&i| energy[i] < config.validity_floor)
        || surviving.as_ref().is_some_and(|s| s.below_validity_floor);

    Ok(AsymptoticSolution {
        thresholds: AsymptoticThresholds(mu),
        slopes: SlopeVector(w),
        partition: part,
        lifetimes: est.clone(),
        surviving,
        iterations: 0,
        oscillated,
        below_validity_floor,
        trace: Vec::new(),
    })
}

/// Threshold export: `source,mu,w_node,w_value` (1-based indices).
pub fn write_thresholds_csv<W: std::io::Write>(sol: &AsymptoticSolution, mut out: W) -> Result<()> {
    writeln!(out, "source,mu,w_node,w_value")?;
    for (j, (mu, w)) in sol.thresholds.0.iter().zip(&sol.slopes.0).enumerate() {
        writeln!(out, "{},{},{},{}", j + 1, mu, j + 1, w)?;
    }
    Ok(())
}
