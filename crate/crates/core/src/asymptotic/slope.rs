use super::{AsymptoticConfig, Subnetwork};
use crate::error::{Error, Result};
use crate::roots::bisect;

/// One source term `p_j (h_j(Δ_ji w + β_j) - b_j)` of the slope equation.
pub(crate) struct SourceTerm<'a> {
    pub prob: f64,
    pub delta: f64,
    pub offset: f64,
    pub baseline: f64,
    pub success: f64,
    pub model: &'a crate::model::ImportanceModel,
}

/// Solve `c̄ w + α = Σ_j p_j (h_j(Δ_j w + β_j) - b_j)` for `w >= 0`.
///
/// The left side is strictly increasing and the right side non-increasing,
/// so the root is unique. A root below zero is clamped to zero.
pub(crate) fn solve_slope(censor_cost: f64, alpha: f64, terms: &[SourceTerm<'_>], tol: f64) -> Result<f64> {
    if !(censor_cost > 0.0) {
        return Err(Error::Degenerate(
            "critical node has zero expected censoring cost".into(),
        ));
    }
    let rhs = |w: f64| -> f64 {
        terms
            .iter()
            .map(|t| {
                t.prob * (t.model.scaled_partial_expectation(t.success, t.delta * w + t.offset) - t.baseline)
            })
            .sum()
    };
    let f = |w: f64| censor_cost * w + alpha - rhs(w);
    let hi = rhs(0.0) / censor_cost;
    if f(0.0) >= 0.0 {
        return Ok(0.0);
    }
    debug_assert!(f(hi) >= 0.0);
    bisect(f, 0.0, hi, tol)
}

/// Slope `w_i` of the critical node given the surviving-set contribution
/// `α = c̄_Sᵀ w_S` and per-source offsets `β = Δ_S w_S` (full-length).
pub fn solve_w_i(
    scenario: &crate::model::Scenario,
    node: usize,
    alpha: f64,
    beta: &[f64],
    config: &AsymptoticConfig,
) -> Result<f64> {
    let net = Subnetwork::full(scenario);
    if beta.len() != scenario.node_count() {
        return Err(Error::InvalidParameter("β must have one entry per source".into()));
    }
    let terms: Vec<SourceTerm<'_>> = net.nodes().iter().map(|&j| term(&net, node, j, beta, config)).collect();
    solve_slope(net.mean_censor_cost(node), alpha, &terms, config.bisection_tol)
}

fn term<'a>(net: &Subnetwork<'a>, node: usize, j: usize, beta: &[f64], config: &AsymptoticConfig) -> SourceTerm<'a> {
    SourceTerm {
        prob: net.source_prob(j),
        delta: net.delta(j, node),
        offset: beta[j],
        baseline: 0.0,
        success: config.success(j),
        model: net.scenario().importance(j),
    }
}

/// Slope of the critical node when `w_S` solves the surviving subnetwork.
///
/// That sub-solution satisfies `c̄_Sᵀ w_S = Σ_{j∈S} p_j h_j(β_j)`, so `α`
/// cancels against the surviving sources' terms at `w = 0`. Solving the
/// cancelled form keeps a branch's slope independent of the order in which
/// unrelated branches were peeled off.
pub(crate) fn slope_with_surviving(
    net: &Subnetwork<'_>,
    node: usize,
    surviving: &[usize],
    beta: &[f64],
    config: &AsymptoticConfig,
) -> Result<f64> {
    let terms: Vec<SourceTerm<'_>> = net
        .nodes()
        .iter()
        .filter_map(|&j| {
            let mut t = term(net, node, j, beta, config);
            if surviving.binary_search(&j).is_ok() {
                if t.delta == 0.0 {
                    return None;
                }
                t.baseline = t.model.scaled_partial_expectation(t.success, t.offset);
            }
            Some(t)
        })
        .collect();
    solve_slope(net.mean_censor_cost(node), 0.0, &terms, config.bisection_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_line_scenario, single_node_scenario, EnergyParams, ImportanceModel};

    // Omega constant: w = e^{-w}.
    const OMEGA: f64 = 0.567_143_290_409_784;

    #[test]
    fn single_node_omega() {
        let s = single_node_scenario(1, 2, ImportanceModel::exponential(1.0), 0).unwrap();
        let w = solve_w_i(&s, 0, 0.0, &[0.0], &Default::default()).unwrap();
        assert!((w - OMEGA).abs() < 1e-9);
    }

    #[test]
    fn two_node_line_sink_neighbour() {
        let s = build_line_scenario(2, EnergyParams::default(), 0).unwrap();
        let w = solve_w_i(&s, 1, 0.0, &[0.0, 0.0], &Default::default()).unwrap();
        // independent check: 0.5 w = 0.5 e^{-10 w} + 0.5 e^{-5 w}
        let residual = 0.5 * w - 0.5 * (-10.0 * w).exp() - 0.5 * (-5.0 * w).exp();
        assert!(residual.abs() < 1e-9);
        assert!((w - 0.2897).abs() < 5e-4, "w = {w}");
    }

    #[test]
    fn zero_reward_gives_zero_slope() {
        let s = single_node_scenario(1, 2, ImportanceModel::discrete(vec![0.0], vec![1.0]), 0).unwrap();
        assert_eq!(solve_w_i(&s, 0, 0.0, &[0.0], &Default::default()).unwrap(), 0.0);
        assert_eq!(solve_w_i(&s, 0, 3.0, &[0.0], &Default::default()).unwrap(), 0.0);
    }

    #[test]
    fn zero_censor_cost_is_degenerate() {
        let s = single_node_scenario(0, 2, ImportanceModel::exponential(1.0), 0).unwrap();
        assert!(matches!(
            solve_w_i(&s, 0, 0.0, &[0.0], &Default::default()),
            Err(Error::Degenerate(_))
        ));
    }
}
