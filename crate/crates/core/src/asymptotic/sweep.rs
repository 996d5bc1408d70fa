use super::{critical_node, solve, stationary_lifetimes, AsymptoticConfig};
use crate::error::{Error, Result};
use crate::model::Scenario;

/// Asymptotic thresholds and lifetimes at `e = r (cos φ, sin φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    pub phi: f64,
    pub energy: [f64; 2],
    pub thresholds: [f64; 2],
    pub critical: usize,
    /// Stationary lifetimes that selected the critical node.
    pub lifetimes: [f64; 2],
    /// The critical node is also the shortest-lived node under the returned
    /// thresholds (false inside an oscillation band).
    pub consistent: bool,
}

/// Sweep a 2-node network along the open quarter circle of radius `radius`,
/// with `steps` interior angles `φ_k = k π / (2 (steps + 1))`.
pub fn polar_sweep(
    scenario: &Scenario,
    radius: f64,
    steps: usize,
    config: &AsymptoticConfig,
) -> Result<Vec<PolarPoint>> {
    if scenario.node_count() != 2 {
        return Err(Error::InvalidParameter("polar sweep needs a 2-node network".into()));
    }
    if !(radius > 0.0) || steps == 0 {
        return Err(Error::InvalidParameter("radius and step count must be positive".into()));
    }
    let step = std::f64::consts::FRAC_PI_2 / (steps + 1) as f64;
    (1..=steps)
        .map(|k| {
            let phi = k as f64 * step;
            let energy = [radius * phi.cos(), radius * phi.sin()];
            let sol = solve(scenario, &energy, config)?;
            let mu = [sol.thresholds.0[0], sol.thresholds.0[1]];
            let own = stationary_lifetimes(scenario, &mu, &energy, config)?;
            let critical = sol.partition.critical;
            Ok(PolarPoint {
                phi,
                energy,
                thresholds: mu,
                critical,
                lifetimes: [sol.lifetimes.lifetime[0], sol.lifetimes.lifetime[1]],
                consistent: critical_node(&own)?.0 == critical,
            })
        })
        .collect()
}

/// `phi,e_1,e_2,mu_1,mu_2,critical,T_1,T_2,consistent` with a 1-based
/// critical node.
pub fn write_sweep_csv<W: std::io::Write>(points: &[PolarPoint], mut out: W) -> Result<()> {
    writeln!(out, "phi,e_1,e_2,mu_1,mu_2,critical,T_1,T_2,consistent")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.phi,
            p.energy[0],
            p.energy[1],
            p.thresholds[0],
            p.thresholds[1],
            p.critical + 1,
            p.lifetimes[0],
            p.lifetimes[1],
            p.consistent
        )?;
    }
    Ok(())
}
