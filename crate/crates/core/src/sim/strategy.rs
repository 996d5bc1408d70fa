use std::fmt;
use std::str::FromStr;

use crate::asymptotic::{self, AsymptoticConfig, Subnetwork};
use crate::error::{Error, Result};
use crate::model::{single_node_scenario, Scenario};

pub const DEFAULT_REFRESH_INTERVAL: u64 = 500;

/// Censoring strategy evaluated by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Transmit every message.
    NonSelective,
    /// Constant per-source thresholds.
    FixedThreshold(Vec<f64>),
    /// Each source uses the asymptotic threshold of a lone node with its own
    /// sensing and transmission costs.
    LocalThreshold,
    /// Asymptotic thresholds of the live network, recomputed when the
    /// critical node changes and every `refresh_interval` epochs.
    GlobalCooperative { refresh_interval: u64 },
}

impl Strategy {
    pub fn gct() -> Self {
        Strategy::GlobalCooperative { refresh_interval: DEFAULT_REFRESH_INTERVAL }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::NonSelective => "ns",
            Strategy::FixedThreshold(_) => "fixed",
            Strategy::LocalThreshold => "local",
            Strategy::GlobalCooperative { .. } => "gct",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `ns`, `local`, `gct`, `gct:<interval>` or `fixed:<mu_1>/<mu_2>/...`
/// (`inf` allowed).
impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("unknown strategy '{s}'"));
        match (head.trim().to_ascii_lowercase().as_str(), arg) {
            ("ns" | "nonselective", None) => Ok(Strategy::NonSelective),
            ("local" | "st", None) => Ok(Strategy::LocalThreshold),
            ("gct", None) => Ok(Strategy::gct()),
            ("gct", Some(a)) => {
                let refresh_interval = a.trim().parse().map_err(|_| bad())?;
                if refresh_interval == 0 {
                    return Err(bad());
                }
                Ok(Strategy::GlobalCooperative { refresh_interval })
            }
            ("fixed", Some(a)) => a
                .split('/')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(Strategy::FixedThreshold),
            _ => Err(bad()),
        }
    }
}

/// One recomputation of the cooperative thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct RefreshRecord {
    pub epoch: u64,
    pub energy: Vec<u64>,
    pub live: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub critical: usize,
}

/// Run-time state of a strategy: the thresholds in force and, for the
/// cooperative strategy, what is needed to decide when to refresh them.
#[derive(Debug, Clone)]
pub struct Policy {
    strategy: Strategy,
    thresholds: Vec<f64>,
    config: AsymptoticConfig,
    consumption: Vec<f64>,
    live: Vec<usize>,
    critical: Option<usize>,
    last_refresh: u64,
    refreshes: Vec<RefreshRecord>,
}

/// Threshold of a lone node with censoring cost `C0[j][j]` and extra
/// transmission cost `C1[j][j] - C0[j][j]`.
pub fn local_thresholds(scenario: &Scenario, config: &AsymptoticConfig) -> Result<Vec<f64>> {
    let costs = scenario.costs();
    (0..scenario.node_count())
        .map(|j| {
            let c0 = costs.censor(j, j);
            let c1 = costs.transmit(j, j);
            let lone = single_node_scenario(c0, c1, scenario.importance(j).clone(), 0)?;
            let w = asymptotic::solve_w_i(&lone, 0, 0.0, &[0.0], config)?;
            Ok((c1 - c0) as f64 * w)
        })
        .collect()
}

impl Policy {
    pub fn new(scenario: &Scenario, strategy: &Strategy) -> Result<Self> {
        Self::with_config(scenario, strategy, AsymptoticConfig::default())
    }

    pub fn with_config(scenario: &Scenario, strategy: &Strategy, config: AsymptoticConfig) -> Result<Self> {
        let n = scenario.node_count();
        let thresholds = match strategy {
            Strategy::NonSelective => vec![f64::NEG_INFINITY; n],
            Strategy::FixedThreshold(mu) => {
                if mu.len() != n || mu.iter().any(|m| m.is_nan()) {
                    return Err(Error::InvalidParameter(format!(
                        "fixed strategy needs {n} thresholds, got {}",
                        mu.len()
                    )));
                }
                mu.clone()
            }
            Strategy::LocalThreshold => local_thresholds(scenario, &config)?,
            Strategy::GlobalCooperative { refresh_interval } => {
                if *refresh_interval == 0 {
                    return Err(Error::InvalidParameter("refresh interval must be positive".into()));
                }
                vec![f64::INFINITY; n]
            }
        };
        Ok(Self {
            strategy: strategy.clone(),
            thresholds,
            config,
            consumption: vec![0.0; n],
            live: Vec::new(),
            critical: None,
            last_refresh: 0,
            refreshes: Vec::new(),
        })
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn refreshes(&self) -> &[RefreshRecord] {
        &self.refreshes
    }

    pub fn into_refreshes(self) -> Vec<RefreshRecord> {
        self.refreshes
    }

    /// Transmit iff the importance reaches the threshold.
    pub fn decide(&self, source: usize, importance: f64) -> bool {
        crate::exact::decide(self.thresholds[source], 1.0, importance)
    }

    /// Called before every epoch with the current energies and live set.
    pub fn prepare(&mut self, scenario: &Scenario, epoch: u64, energy: &[u64], live: &[usize]) -> Result<()> {
        let Strategy::GlobalCooperative { refresh_interval } = self.strategy else {
            return Ok(());
        };
        if live.is_empty() {
            return Ok(());
        }
        let stale = self.critical.is_none()
            || live != self.live.as_slice()
            || epoch - self.last_refresh >= refresh_interval
            || self.implied_critical(energy, live) != self.critical;
        if stale {
            self.refresh(scenario, epoch, energy, live)?;
        }
        Ok(())
    }

    /// Critical node under the consumption rates of the thresholds in force.
    fn implied_critical(&self, energy: &[u64], live: &[usize]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &i in live {
            let g = self.consumption[i];
            let t = if g > 0.0 { energy[i] as f64 / g } else { f64::INFINITY };
            if t.is_finite() && best.is_none_or(|(_, b)| t < b) {
                best = Some((i, t));
            }
        }
        best.map(|(i, _)| i)
    }

    fn refresh(&mut self, scenario: &Scenario, epoch: u64, energy: &[u64], live: &[usize]) -> Result<()> {
        let net = Subnetwork::new(scenario, live.to_vec())?;
        let e: Vec<f64> = energy.iter().map(|&v| v as f64).collect();
        let sol = asymptotic::solve_subnetwork(&net, &e, &self.config)?;
        self.thresholds = sol.thresholds.0;
        let est = asymptotic::estimate(&net, &self.thresholds, &e, &self.config);
        self.consumption = est.consumption;
        self.live = live.to_vec();
        self.critical = self.implied_critical(energy, live);
        self.last_refresh = epoch;
        self.refreshes.push(RefreshRecord {
            epoch,
            energy: energy.to_vec(),
            live: live.to_vec(),
            thresholds: self.thresholds.clone(),
            critical: sol.partition.critical,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_line_scenario, EnergyParams};

    #[test]
    fn parse_strategies() {
        assert_eq!("ns".parse::<Strategy>().unwrap(), Strategy::NonSelective);
        assert_eq!("LOCAL".parse::<Strategy>().unwrap(), Strategy::LocalThreshold);
        assert_eq!("gct".parse::<Strategy>().unwrap(), Strategy::gct());
        assert_eq!(
            "gct:50".parse::<Strategy>().unwrap(),
            Strategy::GlobalCooperative { refresh_interval: 50 }
        );
        assert_eq!(
            "fixed:1.5/inf".parse::<Strategy>().unwrap(),
            Strategy::FixedThreshold(vec![1.5, f64::INFINITY])
        );
        assert!("gct:0".parse::<Strategy>().is_err());
        assert!("fixed".parse::<Strategy>().is_err());
        assert!("sf".parse::<Strategy>().is_err());
    }

    #[test]
    fn local_threshold_on_line() {
        // lone node: censor 1, extra 5, w = e^{-5w}
        let s = build_line_scenario(10, EnergyParams::default(), 10_000).unwrap();
        let mu = local_thresholds(&s, &Default::default()).unwrap();
        let w = mu[0] / 5.0;
        assert!((w - (-5.0 * w).exp()).abs() < 1e-9);
        assert!((mu[0] - 1.3265).abs() < 1e-3);
        assert!(mu.iter().all(|&m| m == mu[0]));
    }

    #[test]
    fn fixed_threshold_length_checked() {
        let s = build_line_scenario(3, EnergyParams::default(), 10).unwrap();
        assert!(Policy::new(&s, &Strategy::FixedThreshold(vec![1.0])).is_err());
    }
}
