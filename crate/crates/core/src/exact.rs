//! Exact optimal censoring thresholds by backward recursion over the integer
//! energy lattice.
//!
//! For deterministic costs and path-feasibility success, the value function
//! satisfies
//!
//! ```text
//! μ(e, j) = λ((e - c0(j))⁺) - λ((e - c1(j))⁺)
//! λ(e)    = Σ_j p_j [ λ((e - c0(j))⁺) + E{(Q(e,j)·x - μ(e,j))⁺ | y = j} ]
//! ```
//!
//! with `Q(e, j) = 1` iff every node on the route of `j` can pay `c1(j)`.
//! Every shifted state is coordinate-wise below `e`, so a single sweep in
//! row-major index order sees all dependencies before the state itself. A
//! shifted state equal to `e` (zero cost along every non-empty coordinate)
//! makes the state's equation implicit; it is solved as a scalar monotone
//! equation in `λ(e)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{ImportanceModel, Scenario};
use crate::roots::bisect;

pub const DEFAULT_CELL_BUDGET: u128 = 40_000_000;

/// Optimal action for a message: transmit iff `q·x >= μ`.
pub fn decide(mu: f64, q: f64, x: f64) -> bool {
    q * x >= mu
}

#[derive(Debug, Clone, Copy)]
pub struct ExactConfig {
    pub cell_budget: u128,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { cell_budget: DEFAULT_CELL_BUDGET }
    }
}

/// Dense integer lattice `[0, cap_1] × ... × [0, cap_N]`, row-major with the
/// last node varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyLattice {
    caps: Vec<u64>,
    strides: Vec<usize>,
    len: usize,
}

impl EnergyLattice {
    pub fn new(caps: &[u64], budget: u128) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::InvalidParameter("lattice needs at least one dimension".into()));
        }
        let required = caps
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128 + 1))
            .unwrap_or(u128::MAX);
        if required > budget || required > usize::MAX as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let mut strides = vec![1usize; caps.len()];
        for i in (0..caps.len() - 1).rev() {
            strides[i] = strides[i + 1] * (caps[i + 1] as usize + 1);
        }
        Ok(Self { caps: caps.to_vec(), strides, len: required as usize })
    }

    pub fn dims(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, e: &[u64]) -> bool {
        e.len() == self.caps.len() && e.iter().zip(&self.caps).all(|(v, c)| v <= c)
    }

    pub fn index(&self, e: &[u64]) -> usize {
        e.iter().zip(&self.strides).map(|(&v, &s)| v as usize * s).sum()
    }

    pub fn point(&self, mut idx: usize) -> Vec<u64> {
        self.strides
            .iter()
            .map(|&s| {
                let v = idx / s;
                idx %= s;
                v as u64
            })
            .collect()
    }

    /// Index of `(e - cost)⁺`.
    fn shifted(&self, e: &[u64], cost: &[u64]) -> usize {
        e.iter()
            .zip(cost)
            .zip(&self.strides)
            .map(|((&v, &c), &s)| v.saturating_sub(c) as usize * s)
            .sum()
    }
}

/// `λ(e)` over the lattice.
#[derive(Debug, Clone)]
pub struct ValueTable {
    lattice: EnergyLattice,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn lattice(&self) -> &EnergyLattice {
        &self.lattice
    }

    pub fn get(&self, e: &[u64]) -> f64 {
        self.values[self.lattice.index(e)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `μ(e, y)` over the lattice for every source `y`.
#[derive(Debug, Clone)]
pub struct ThresholdTable {
    lattice: EnergyLattice,
    sources: usize,
    values: Vec<f64>,
}

impl ThresholdTable {
    pub fn lattice(&self) -> &EnergyLattice {
        &self.lattice
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    pub fn get(&self, e: &[u64], source: usize) -> f64 {
        self.values[self.lattice.index(e) * self.sources + source]
    }
}

#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub value: ValueTable,
    pub thresholds: ThresholdTable,
}

/// A message class in the recursion; `model == None` is the silent epoch.
struct Class<'a> {
    prob: f64,
    censor: Vec<u64>,
    transmit: Vec<u64>,
    path: &'a [usize],
    model: Option<&'a ImportanceModel>,
}

impl Class<'_> {
    fn success(&self, e: &[u64]) -> f64 {
        if self.path.iter().all(|&i| e[i] >= self.transmit[i]) {
            1.0
        } else {
            0.0
        }
    }

    fn max_importance(&self) -> f64 {
        self.model.map_or(0.0, ImportanceModel::max_value)
    }

    /// `E{(q x - μ)⁺}`; zero importance for silent epochs.
    fn excess(&self, q: f64, mu: f64) -> f64 {
        match self.model {
            Some(m) => m.scaled_partial_expectation(q, mu),
            None => (-mu).max(0.0),
        }
    }
}

fn classes(scenario: &Scenario) -> Vec<Class<'_>> {
    let costs = scenario.costs();
    let mut out = vec![Class {
        prob: scenario.silent_prob(),
        censor: costs.censor_column(None),
        transmit: costs.transmit_column(None),
        path: &[],
        model: None,
    }];
    for j in 0..scenario.node_count() {
        out.push(Class {
            prob: scenario.source_prob(j),
            censor: costs.censor_column(Some(j)),
            transmit: costs.transmit_column(Some(j)),
            path: scenario.tree().path(j),
            model: Some(scenario.importance(j)),
        });
    }
    out
}

/// Solve the backward recursion on `[0, caps]`.
pub fn solve_exact(scenario: &Scenario, caps: &[u64], config: &ExactConfig) -> Result<ExactSolution> {
    let n = scenario.node_count();
    if caps.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need {n} energy caps, got {}",
            caps.len()
        )));
    }
    let lattice = EnergyLattice::new(caps, config.cell_budget)?;
    let classes = classes(scenario);
    let mut lambda = vec![0.0f64; lattice.len()];
    let mut mu = vec![0.0f64; lattice.len() * n];
    let mut e = vec![0u64; n];

    // (prob, q, λ1, class) for classes whose censor shift is a self-loop.
    let mut implicit: Vec<(f64, f64, f64, &Class)> = Vec::new();
    for idx in 0..lattice.len() {
        let mut known = 0.0;
        let mut self_prob = 0.0;
        let mut self_reward = 0.0;
        implicit.clear();
        for class in classes.iter().filter(|c| c.prob > 0.0) {
            let i0 = lattice.shifted(&e, &class.censor);
            let i1 = lattice.shifted(&e, &class.transmit);
            let q = class.success(&e);
            match (i0 == idx, i1 == idx) {
                (false, _) => {
                    debug_assert!(i1 != idx, "transmit cost below censor cost");
                    let (l0, l1) = (lambda[i0], lambda[i1]);
                    known += class.prob * (l0 + class.excess(q, l0 - l1));
                }
                (true, true) => {
                    self_prob += class.prob;
                    self_reward += class.prob * class.excess(q, 0.0);
                }
                (true, false) => {
                    self_prob += class.prob;
                    implicit.push((class.prob, q, lambda[i1], class));
                }
            }
        }

        let free = 1.0 - self_prob;
        lambda[idx] = if implicit.is_empty() {
            if free > 1e-12 {
                (known + self_reward) / free
            } else if self_reward == 0.0 && known == 0.0 {
                0.0
            } else {
                return Err(Error::Degenerate(format!(
                    "state {e:?} earns reward without consuming energy"
                )));
            }
        } else {
            if free <= 1e-12 {
                // Waiting is free: the value is the best reward reachable by
                // holding out for the largest importance.
                if known != 0.0 || self_reward != 0.0 {
                    return Err(Error::Degenerate(format!(
                        "state {e:?} earns reward without consuming energy"
                    )));
                }
                let best = implicit
                    .iter()
                    .map(|(_, q, l1, c)| l1 + q * c.max_importance())
                    .fold(0.0f64, f64::max);
                if !best.is_finite() {
                    return Err(Error::Degenerate(format!(
                        "state {e:?} can censor forever at zero cost"
                    )));
                }
                best
            } else {
                let g = |l: f64| {
                    free * l
                        - known
                        - self_reward
                        - implicit.iter().map(|(p, q, l1, c)| p * c.excess(*q, l - l1)).sum::<f64>()
                };
                let max_shift = implicit.iter().map(|t| t.2).fold(0.0f64, f64::max);
                let reward_cap: f64 = implicit
                    .iter()
                    .map(|(p, q, _, c)| p * c.excess(*q, 0.0))
                    .sum::<f64>();
                let mut hi = max_shift.max((known + self_reward + reward_cap) / free);
                // the bound is exact in real arithmetic; nudge past rounding
                let mut step = hi.abs().max(1.0) * 1e-12;
                while g(hi) < 0.0 {
                    hi += step;
                    step *= 2.0;
                }
                bisect(g, 0.0, hi, 0.0)?
            }
        };

        for (j, class) in classes[1..].iter().enumerate() {
            let i0 = lattice.shifted(&e, &class.censor);
            let i1 = lattice.shifted(&e, &class.transmit);
            mu[idx * n + j] = lambda[i0] - lambda[i1];
        }

        // odometer increment, last coordinate fastest
        for d in (0..n).rev() {
            if e[d] < caps[d] {
                e[d] += 1;
                break;
            }
            e[d] = 0;
        }
    }

    Ok(ExactSolution {
        value: ValueTable { lattice: lattice.clone(), values: lambda },
        thresholds: ThresholdTable { lattice, sources: n, values: mu },
    })
}

impl ExactSolution {
    pub fn lambda(&self, e: &[u64]) -> f64 {
        self.value.get(e)
    }

    /// Threshold for a message from the 0-based `source` at energy `e`.
    pub fn mu(&self, e: &[u64], source: usize) -> f64 {
        self.thresholds.get(e, source)
    }

    pub fn lattice(&self) -> &EnergyLattice {
        &self.value.lattice
    }

    /// Largest `|λ(e) - max_a E{r + λ(e')}|` over the lattice, evaluated from
    /// the stored values.
    pub fn max_bellman_residual(&self, scenario: &Scenario) -> f64 {
        let lattice = self.lattice();
        let classes = classes(scenario);
        let mut worst = 0.0f64;
        for idx in 0..lattice.len() {
            let e = lattice.point(idx);
            let rhs: f64 = classes
                .iter()
                .filter(|c| c.prob > 0.0)
                .map(|c| {
                    let l0 = self.value.values[lattice.shifted(&e, &c.censor)];
                    let l1 = self.value.values[lattice.shifted(&e, &c.transmit)];
                    // max(censor, transmit) = l0 + (q x - (l0 - l1))⁺
                    c.prob * (l0 + c.excess(c.success(&e), l0 - l1))
                })
                .sum();
            worst = worst.max((self.value.values[idx] - rhs).abs());
        }
        worst
    }

    /// Dense 1-D or 2-D slice of `λ`; `fixed[i] == None` marks a free axis.
    pub fn slice_lambda(&self, fixed: &[Option<u64>]) -> Result<GridSlice> {
        self.slice(fixed, |e| self.lambda(e))
    }

    /// Dense 1-D or 2-D slice of `μ(·, source)`.
    pub fn slice_mu(&self, fixed: &[Option<u64>], source: usize) -> Result<GridSlice> {
        if source >= self.thresholds.sources {
            return Err(Error::SliceOutOfRange(format!("no source {}", source + 1)));
        }
        self.slice(fixed, |e| self.mu(e, source))
    }

    fn slice(&self, fixed: &[Option<u64>], get: impl Fn(&[u64]) -> f64) -> Result<GridSlice> {
        let caps = self.lattice().caps();
        if fixed.len() != caps.len() {
            return Err(Error::SliceOutOfRange(format!(
                "slice spec has {} axes, lattice has {}",
                fixed.len(),
                caps.len()
            )));
        }
        let axes: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::SliceOutOfRange(format!(
                "slice needs one or two free axes, got {}",
                axes.len()
            )));
        }
        for (i, v) in fixed.iter().enumerate() {
            if let Some(v) = v {
                if *v > caps[i] {
                    return Err(Error::SliceOutOfRange(format!(
                        "e_{} = {v} exceeds cap {}",
                        i + 1,
                        caps[i]
                    )));
                }
            }
        }
        let shape: Vec<usize> = axes.iter().map(|&a| caps[a] as usize + 1).collect();
        let mut e: Vec<u64> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        let mut values = Vec::with_capacity(shape.iter().product());
        let inner = if axes.len() == 2 { shape[1] } else { 1 };
        for a in 0..shape[0] {
            e[axes[0]] = a as u64;
            for b in 0..inner {
                if axes.len() == 2 {
                    e[axes[1]] = b as u64;
                }
                values.push(get(&e));
            }
        }
        Ok(GridSlice { axes, shape, values })
    }

    /// CSV `e_1,...,e_N,lambda` over the whole lattice.
    pub fn write_lambda_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let lattice = self.lattice();
        writeln!(out, "{},lambda", energy_header(lattice.dims()))?;
        for idx in 0..lattice.len() {
            writeln!(out, "{},{}", join(&lattice.point(idx)), self.value.values[idx])?;
        }
        Ok(())
    }

    /// CSV `e_1,...,e_N,source,mu` over the whole lattice (1-based sources).
    pub fn write_mu_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let lattice = self.lattice();
        let n = self.thresholds.sources;
        writeln!(out, "{},source,mu", energy_header(lattice.dims()))?;
        for idx in 0..lattice.len() {
            let point = join(&lattice.point(idx));
            for j in 0..n {
                writeln!(out, "{point},{},{}", j + 1, self.thresholds.values[idx * n + j])?;
            }
        }
        Ok(())
    }
}

fn energy_header(n: usize) -> String {
    (1..=n).map(|i| format!("e_{i}")).collect::<Vec<_>>().join(",")
}

fn join(e: &[u64]) -> String {
    e.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Row-major grid of values over one or two lattice axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSlice {
    pub axes: Vec<usize>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl GridSlice {
    pub fn at(&self, a: usize, b: usize) -> f64 {
        let inner = self.shape.get(1).copied().unwrap_or(1);
        self.values[a * inner + b]
    }
}
