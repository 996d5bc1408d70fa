use crate::error::{Error, Result};

/// Deterministic per-source energy costs.
///
/// `censor[i][j]` / `transmit[i][j]` is the energy node `i` spends when a
/// message from source `j` is censored / transmitted. `silent[i]` is charged
/// on epochs in which no message is generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    censor: Vec<Vec<u64>>,
    transmit: Vec<Vec<u64>>,
    silent: Vec<u64>,
}

impl CostModel {
    pub fn new(censor: Vec<Vec<u64>>, transmit: Vec<Vec<u64>>, silent: Vec<u64>) -> Result<Self> {
        let n = censor.len();
        if n == 0 {
            return Err(Error::InvalidScenario("empty cost matrices".into()));
        }
        let square = |m: &Vec<Vec<u64>>| m.len() == n && m.iter().all(|row| row.len() == n);
        if !square(&censor) || !square(&transmit) || silent.len() != n {
            return Err(Error::InvalidScenario(format!(
                "cost matrices must be {n}x{n} and the silent cost vector of length {n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if transmit[i][j] < censor[i][j] {
                    return Err(Error::InvalidScenario(format!(
                        "C1[{}][{}] = {} is below C0 = {}",
                        i + 1,
                        j + 1,
                        transmit[i][j],
                        censor[i][j]
                    )));
                }
            }
        }
        Ok(Self { censor, transmit, silent })
    }

    pub fn node_count(&self) -> usize {
        self.censor.len()
    }

    pub fn censor(&self, node: usize, source: usize) -> u64 {
        self.censor[node][source]
    }

    pub fn transmit(&self, node: usize, source: usize) -> u64 {
        self.transmit[node][source]
    }

    pub fn silent(&self, node: usize) -> u64 {
        self.silent[node]
    }

    pub fn censor_matrix(&self) -> &[Vec<u64>] {
        &self.censor
    }

    pub fn transmit_matrix(&self) -> &[Vec<u64>] {
        &self.transmit
    }

    pub fn silent_costs(&self) -> &[u64] {
        &self.silent
    }

    /// Incremental cost `Δ[source][node] = C1[node][source] - C0[node][source]`.
    pub fn delta(&self, source: usize, node: usize) -> u64 {
        self.transmit[node][source] - self.censor[node][source]
    }

    /// The full `Δ = C1ᵀ - C0ᵀ`, rows indexed by source.
    pub fn delta_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.node_count();
        (0..n).map(|j| (0..n).map(|i| self.delta(j, i)).collect()).collect()
    }

    /// Censoring cost vector of source `j` (`c0(j)`); `None` is the silent epoch.
    pub fn censor_column(&self, source: Option<usize>) -> Vec<u64> {
        match source {
            None => self.silent.clone(),
            Some(j) => self.censor.iter().map(|row| row[j]).collect(),
        }
    }

    pub fn transmit_column(&self, source: Option<usize>) -> Vec<u64> {
        match source {
            None => self.silent.clone(),
            Some(j) => self.transmit.iter().map(|row| row[j]).collect(),
        }
    }
}
