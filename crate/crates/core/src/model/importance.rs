use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the importance value carried by a message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ImportanceModel {
    Exponential { mean: f64 },
    Discrete { values: Vec<f64>, probabilities: Vec<f64> },
}

impl ImportanceModel {
    pub fn exponential(mean: f64) -> Self {
        ImportanceModel::Exponential { mean }
    }

    pub fn discrete(values: Vec<f64>, probabilities: Vec<f64>) -> Self {
        ImportanceModel::Discrete { values, probabilities }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ImportanceModel::Exponential { mean } => {
                if !(mean.is_finite() && *mean > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential mean must be positive, got {mean}"
                    )));
                }
            }
            ImportanceModel::Discrete { values, probabilities } => {
                if values.is_empty() || values.len() != probabilities.len() {
                    return Err(Error::InvalidParameter(
                        "discrete importance needs matching, non-empty values and probabilities"
                            .into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidParameter(
                        "discrete importance values must be finite and non-negative".into(),
                    ));
                }
                if probabilities.iter().any(|p| !(*p >= 0.0)) {
                    return Err(Error::InvalidParameter(
                        "discrete probabilities must be non-negative".into(),
                    ));
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "discrete probabilities sum to {total}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            ImportanceModel::Exponential { mean } => *mean,
            ImportanceModel::Discrete { values, probabilities } => {
                values.iter().zip(probabilities).map(|(v, p)| v * p).sum()
            }
        }
    }

    /// Supremum of the support (`+∞` for unbounded models).
    pub fn max_value(&self) -> f64 {
        match self {
            ImportanceModel::Exponential { .. } => f64::INFINITY,
            ImportanceModel::Discrete { values, probabilities } => values
                .iter()
                .zip(probabilities)
                .filter(|(_, p)| **p > 0.0)
                .map(|(v, _)| *v)
                .fold(0.0, f64::max),
        }
    }

    /// `P(x >= t)`.
    pub fn tail(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 0.0;
        }
        match self {
            ImportanceModel::Exponential { mean } => {
                if t <= 0.0 {
                    1.0
                } else {
                    (-t / mean).exp()
                }
            }
            ImportanceModel::Discrete { values, probabilities } => values
                .iter()
                .zip(probabilities)
                .filter(|(v, _)| **v >= t)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    /// `E{(x - t)^+}`.
    pub fn partial_expectation(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 0.0;
        }
        match self {
            ImportanceModel::Exponential { mean } => {
                if t <= 0.0 {
                    mean - t
                } else {
                    mean * (-t / mean).exp()
                }
            }
            ImportanceModel::Discrete { values, probabilities } => values
                .iter()
                .zip(probabilities)
                .map(|(v, p)| p * (v - t).max(0.0))
                .sum(),
        }
    }

    /// `E{(q x - t)^+}` for a success probability `q` in `[0, 1]`.
    pub fn scaled_partial_expectation(&self, q: f64, t: f64) -> f64 {
        if q <= 0.0 {
            (-t).max(0.0)
        } else {
            q * self.partial_expectation(t / q)
        }
    }

    pub fn sampler(&self) -> ImportanceSampler {
        match self {
            ImportanceModel::Exponential { mean } => ImportanceSampler::Exponential(*mean),
            ImportanceModel::Discrete { values, probabilities } => ImportanceSampler::Discrete {
                values: values.clone(),
                index: WeightedIndex::new(probabilities).expect("validated probabilities"),
            },
        }
    }
}

/// Pre-built sampler for an [`ImportanceModel`].
#[derive(Debug, Clone)]
pub enum ImportanceSampler {
    Exponential(f64),
    Discrete { values: Vec<f64>, index: WeightedIndex<f64> },
}

impl ImportanceSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ImportanceSampler::Exponential(mean) => {
                let x: f64 = Exp1.sample(rng);
                x * mean
            }
            ImportanceSampler::Discrete { values, index } => values[index.sample(rng)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Composite Simpson on [t, t + 60] for exponential(1); the tail beyond is < e^-60.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            let x = a + k as f64 * h;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn exponential_partial_expectation_matches_quadrature() {
        let m = ImportanceModel::exponential(1.0);
        assert_eq!(m.partial_expectation(0.0), 1.0);
        let t = 2f64.ln();
        let quad = simpson(|x| (x - t) * (-x).exp(), t, t + 60.0, 20_000);
        assert!((quad - 0.5).abs() < 1e-9);
        assert!((m.partial_expectation(t) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exponential_tail_matches_quadrature() {
        let m = ImportanceModel::exponential(1.0);
        assert_eq!(m.tail(0.0), 1.0);
        let quad = simpson(|x| (-x).exp(), 1.0, 61.0, 20_000);
        assert!((quad - (-1f64).exp()).abs() < 1e-9);
        assert!((m.tail(1.0) - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(m.tail(f64::INFINITY), 0.0);
    }

    #[test]
    fn discrete_single_atom() {
        let m = ImportanceModel::discrete(vec![1.0], vec![1.0]);
        assert!((m.partial_expectation(0.4) - 0.6).abs() < 1e-15);
        assert_eq!(m.tail(1.0), 1.0);
        assert_eq!(m.tail(1.0001), 0.0);
        assert_eq!(m.tail(f64::INFINITY), 0.0);
    }

    #[test]
    fn negative_threshold_returns_mean_minus_t() {
        let m = ImportanceModel::exponential(2.0);
        assert_eq!(m.partial_expectation(-1.0), 3.0);
        let d = ImportanceModel::discrete(vec![1.0, 3.0], vec![0.5, 0.5]);
        assert_eq!(d.partial_expectation(-1.0), 3.0);
    }

    #[test]
    fn validation() {
        assert!(ImportanceModel::exponential(0.0).validate().is_err());
        assert!(ImportanceModel::discrete(vec![1.0], vec![0.5]).validate().is_err());
        assert!(ImportanceModel::discrete(vec![], vec![]).validate().is_err());
        assert!(ImportanceModel::discrete(vec![1.0, 2.0], vec![0.5, 0.5]).validate().is_ok());
    }

    fn model() -> impl Strategy<Value = ImportanceModel> {
        prop_oneof![
            (0.1f64..5.0).prop_map(ImportanceModel::exponential),
            proptest::collection::vec((0.0f64..10.0, 0.01f64..1.0), 1..6).prop_map(|atoms| {
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                ImportanceModel::discrete(
                    atoms.iter().map(|a| a.0).collect(),
                    atoms.iter().map(|a| a.1 / total).collect(),
                )
            }),
        ]
    }

    proptest! {
        #[test]
        fn tail_and_partial_expectation_non_increasing(m in model(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(m.tail(lo) >= m.tail(hi));
            prop_assert!(m.partial_expectation(lo) >= m.partial_expectation(hi) - 1e-15);
            prop_assert!((m.partial_expectation(0.0) - m.mean()).abs() < 1e-12);
            prop_assert!((m.tail(0.0) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn partial_expectation_is_convex(m in model(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
            let mid = m.partial_expectation(0.5 * (a + b));
            let chord = 0.5 * (m.partial_expectation(a) + m.partial_expectation(b));
            prop_assert!(mid <= chord + 1e-12);
        }
    }
}
