use super::{AsymptoticConfig, Subnetwork};
use crate::error::{Error, Result};

/// Renewal-theory lifetimes under constant thresholds.
///
/// `consumption[i]` is `E{g_i}`, the expected per-epoch energy use of node
/// `i`; `lifetime[i] = e_i / E{g_i}`. Entries for nodes outside the
/// evaluated subnetwork are `0` and `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeEstimate {
    pub lifetime: Vec<f64>,
    pub consumption: Vec<f64>,
}

/// `E{g_i} = c̄_i + Σ_j p_j Δ[j][i] F_j`, `F_j = P(x >= μ_j / Q_j)`.
pub(crate) fn estimate(
    net: &Subnetwork<'_>,
    thresholds: &[f64],
    energy: &[f64],
    config: &AsymptoticConfig,
) -> LifetimeEstimate {
    let scenario = net.scenario();
    let n = scenario.node_count();
    let pass: Vec<f64> = (0..n)
        .map(|j| {
            if !net.contains(j) {
                return 0.0;
            }
            let q = config.success(j);
            if q <= 0.0 {
                0.0
            } else {
                scenario.importance(j).tail(thresholds[j] / q)
            }
        })
        .collect();
    let mut consumption = vec![0.0; n];
    let mut lifetime = vec![f64::INFINITY; n];
    for &i in net.nodes() {
        let extra: f64 = net
            .nodes()
            .iter()
            .map(|&j| net.source_prob(j) * net.delta(j, i) * pass[j])
            .sum();
        let g = net.mean_censor_cost(i) + extra;
        consumption[i] = g;
        lifetime[i] = if energy[i] <= 0.0 {
            0.0
        } else if g > 0.0 {
            energy[i] / g
        } else {
            f64::INFINITY
        };
    }
    LifetimeEstimate { lifetime, consumption }
}

/// Stationary lifetimes of every node of the full network.
pub fn stationary_lifetimes(
    scenario: &crate::model::Scenario,
    thresholds: &[f64],
    energy: &[f64],
    config: &AsymptoticConfig,
) -> Result<LifetimeEstimate> {
    let n = scenario.node_count();
    if thresholds.len() != n || energy.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need {n} thresholds and energies, got {} and {}",
            thresholds.len(),
            energy.len()
        )));
    }
    Ok(estimate(&Subnetwork::full(scenario), thresholds, energy, config))
}

/// The node with the smallest stationary lifetime (lowest index on ties).
pub fn critical_node(estimate: &LifetimeEstimate) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &t) in estimate.lifetime.iter().enumerate() {
        if t.is_finite() && best.is_none_or(|(_, b)| t < b) {
            best = Some((i, t));
        }
    }
    best.ok_or_else(|| Error::Degenerate("every node has an infinite lifetime".into()))
}
