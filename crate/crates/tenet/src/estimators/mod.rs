//! Delay-resolved transfer entropy.
//!
//! Transfer entropy from a source series `x` to a target series `y`
//! measures, in bits, how much the source's past reduces uncertainty
//! about the target's next value beyond what the target's own past
//! already provides:
//!
//! ```text
//! TE(x -> y; tau) = sum p(y_t, y_past, x_past) *
//!                   log2[ p(y_t | y_past, x_past) / p(y_t | y_past) ]
//! ```
//!
//! where `y_past = (y_{t-l}, ..., y_{t-1})`, `x_past = (x_{t-tau-k+1},
//! ..., x_{t-tau})`, and the embedding dimensions default to `k = l = 1`.
//! Two estimators are provided: a deterministic plug-in estimate on
//! equiprobable bins ([`te_binned`]) and a Kraskov-style k-nearest-
//! neighbor estimate for continuous data ([`te_ksg`]). The delay `tau`
//! is unknown in practice, so [`scan_delays`] maximizes TE over an
//! explicit [`DelayGrid`] and reports the argmax.

mod binned;
mod ksg;
pub(crate) mod neighbors;

pub use binned::te_binned;
pub use ksg::te_ksg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Embedding dimensions: `source_dim` past source states (`k`) and
/// `target_dim` past target states (`l`) condition each transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub source_dim: usize,
    pub target_dim: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            source_dim: 1,
            target_dim: 1,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.source_dim == 0 || self.target_dim == 0 {
            return Err(Error::invalid("embedding dimensions must be >= 1"));
        }
        Ok(())
    }
}

/// Explicit list of candidate delays, in samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayGrid {
    delays: Vec<usize>,
}

impl DelayGrid {
    /// Sorts and deduplicates; rejects an empty grid.
    pub fn new(mut delays: Vec<usize>) -> Result<Self> {
        delays.sort_unstable();
        delays.dedup();
        if delays.is_empty() {
            return Err(Error::invalid("delay grid is empty"));
        }
        Ok(DelayGrid { delays })
    }

    /// The coarse default used for slow-coupling scans: {1, 25, 50, ...,
    /// 600} samples.
    pub fn default_coarse() -> Self {
        let mut delays = vec![1];
        delays.extend((1..=24).map(|i| i * 25));
        DelayGrid { delays }
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn min_delay(&self) -> usize {
        self.delays[0]
    }

    /// Self-loop variant: delay 0 is degenerate for `x -> x`, so it is
    /// dropped; errors if nothing remains.
    pub fn for_self_loop(&self) -> Result<DelayGrid> {
        let delays: Vec<usize> = self.delays.iter().copied().filter(|&d| d > 0).collect();
        if delays.is_empty() {
            return Err(Error::invalid(
                "self-loop delay grid requires at least one delay >= 1",
            ));
        }
        Ok(DelayGrid { delays })
    }
}

/// Which estimator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Binned,
    Ksg,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorKind::Binned => write!(f, "binned"),
            EstimatorKind::Ksg => write!(f, "ksg"),
        }
    }
}

/// A fully parameterized estimator, ready to evaluate a pair at a delay.
///
/// KSG carries a seed for its deterministic tie-breaking jitter, so a
/// given `TeEstimator` value is a pure function of its inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeEstimator {
    Binned { bins: usize },
    Ksg { neighbors: usize, seed: u64 },
}

impl TeEstimator {
    pub fn kind(&self) -> EstimatorKind {
        match self {
            TeEstimator::Binned { .. } => EstimatorKind::Binned,
            TeEstimator::Ksg { .. } => EstimatorKind::Ksg,
        }
    }

    /// Transfer entropy in bits from `source` to `target` at `delay`.
    pub fn estimate(
        &self,
        source: &[f64],
        target: &[f64],
        emb: &EmbeddingConfig,
        delay: usize,
    ) -> Result<f64> {
        match *self {
            TeEstimator::Binned { bins } => te_binned(source, target, emb, delay, bins),
            TeEstimator::Ksg { neighbors, seed } => {
                te_ksg(source, target, emb, delay, neighbors, seed)
            }
        }
    }
}

/// A transfer-entropy value together with the delay that maximized it.
///
/// KSG values may be slightly negative on small samples; they are kept
/// raw here (significance tests compare raw values) and only clamped
/// when emitted as graph weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeEstimate {
    /// Transfer entropy in bits.
    pub value: f64,
    /// Delay (samples) at which the value was attained.
    pub delay: usize,
    pub estimator: EstimatorKind,
}

/// Index layout of the transition tuples for a series of length `m`:
/// the first valid time index and the number of tuples.
pub(crate) struct TupleLayout {
    pub first_t: usize,
    pub count: usize,
}

pub(crate) fn tuple_layout(m: usize, emb: &EmbeddingConfig, delay: usize) -> Result<TupleLayout> {
    emb.validate()?;
    // y_{t-l} needs t >= l; x_{t-delay-k+1} needs t >= delay + k - 1.
    let first_t = emb.target_dim.max(delay + emb.source_dim - 1);
    if first_t >= m {
        return Err(Error::invalid(format!(
            "no valid transition tuples: series length {m}, delay {delay}, embedding ({}, {})",
            emb.source_dim, emb.target_dim
        )));
    }
    Ok(TupleLayout {
        first_t,
        count: m - first_t,
    })
}

/// Maximize TE over a delay grid; ties break toward the smallest delay.
pub fn scan_delays(
    source: &[f64],
    target: &[f64],
    emb: &EmbeddingConfig,
    grid: &DelayGrid,
    estimator: &TeEstimator,
) -> Result<TeEstimate> {
    let mut best: Option<(f64, usize)> = None;
    for &delay in grid.delays() {
        let value = estimator.estimate(source, target, emb, delay)?;
        match best {
            Some((v, _)) if value <= v => {}
            _ => best = Some((value, delay)),
        }
    }
    let (value, delay) = best.expect("grid is non-empty by construction");
    Ok(TeEstimate {
        value,
        delay,
        estimator: estimator.kind(),
    })
}

/// Net transfer `TE(x -> y; tau) - TE(y -> x; tau)`; antisymmetric in
/// its series arguments by construction.
pub fn net_te(
    source: &[f64],
    target: &[f64],
    emb: &EmbeddingConfig,
    delay: usize,
    estimator: &TeEstimator,
) -> Result<f64> {
    Ok(estimator.estimate(source, target, emb, delay)?
        - estimator.estimate(target, source, emb, delay)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn coin_series(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::seeding::rng_from_seed(seed);
        (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
            .collect()
    }

    #[test]
    fn delay_grid_sorts_and_dedups() {
        let g = DelayGrid::new(vec![5, 1, 5, 3]).unwrap();
        assert_eq!(g.delays(), &[1, 3, 5]);
        assert!(DelayGrid::new(vec![]).is_err());
    }

    #[test]
    fn default_coarse_grid_covers_1_to_600() {
        let g = DelayGrid::default_coarse();
        assert_eq!(g.delays()[0], 1);
        assert_eq!(*g.delays().last().unwrap(), 600);
        assert!(g.delays().contains(&300));
        assert!(g.delays().contains(&500));
        assert_eq!(g.delays().len(), 25);
    }

    #[test]
    fn self_loop_grid_drops_zero() {
        let g = DelayGrid::new(vec![0, 1, 2]).unwrap();
        assert_eq!(g.for_self_loop().unwrap().delays(), &[1, 2]);
        assert!(DelayGrid::new(vec![0]).unwrap().for_self_loop().is_err());
    }

    #[test]
    fn scan_recovers_constructed_delay() {
        let x = coin_series(4000, 3);
        let mut y = vec![0.0; 4000];
        for t in 3..4000 {
            y[t] = x[t - 3];
        }
        let est = TeEstimator::Binned { bins: 2 };
        let grid = DelayGrid::new(vec![1, 2, 3, 4]).unwrap();
        let found = scan_delays(&x, &y, &EmbeddingConfig::default(), &grid, &est).unwrap();
        assert_eq!(found.delay, 3);
        // strict dominance of the true delay
        for &d in grid.delays() {
            let v = est.estimate(&x, &y, &EmbeddingConfig::default(), d).unwrap();
            assert!(found.value >= v);
            if d != 3 {
                assert!(found.value > v + 0.5, "delay {d} should be far below");
            }
        }
    }

    #[test]
    fn exact_ties_break_toward_smallest_delay() {
        // constant target: TE is exactly 0 at every delay
        let x = coin_series(1000, 9);
        let y = vec![0.5; 1000];
        let est = TeEstimator::Binned { bins: 2 };
        let grid = DelayGrid::new(vec![1, 2]).unwrap();
        let found = scan_delays(&x, &y, &EmbeddingConfig::default(), &grid, &est).unwrap();
        assert_eq!(found.delay, 1);
        assert_eq!(found.value, 0.0);
    }

    #[test]
    fn scan_value_dominates_every_grid_delay() {
        let mut rng = crate::seeding::rng_from_seed(21);
        for _ in 0..10 {
            let x: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
            let est = TeEstimator::Binned { bins: 3 };
            let grid = DelayGrid::new(vec![1, 2, 5, 9]).unwrap();
            let found = scan_delays(&x, &y, &EmbeddingConfig::default(), &grid, &est).unwrap();
            for &d in grid.delays() {
                let v = est.estimate(&x, &y, &EmbeddingConfig::default(), d).unwrap();
                assert!(found.value >= v);
            }
        }
    }

    #[test]
    fn net_te_is_exactly_antisymmetric() {
        let x = coin_series(5000, 31);
        let mut y = vec![0.0; 5000];
        for t in 1..5000 {
            y[t] = x[t - 1];
        }
        let emb = EmbeddingConfig::default();
        let est = TeEstimator::Binned { bins: 2 };
        let forward = net_te(&x, &y, &emb, 1, &est).unwrap();
        let backward = net_te(&y, &x, &emb, 1, &est).unwrap();
        assert!(forward > 0.5);
        assert!((forward + backward).abs() < 1e-12);
        assert_eq!(net_te(&x, &x, &emb, 1, &est).unwrap(), 0.0);

        // same property for the KSG estimator (shared seed)
        let gx: Vec<f64> = {
            let mut rng = crate::seeding::rng_from_seed(32);
            (0..800).map(|_| rng.random::<f64>() - 0.5).collect()
        };
        let mut gy = vec![0.0; 800];
        for t in 1..800 {
            gy[t] = gx[t - 1];
        }
        let est = TeEstimator::Ksg {
            neighbors: 4,
            seed: 7,
        };
        let f = net_te(&gx, &gy, &emb, 1, &est).unwrap();
        let b = net_te(&gy, &gx, &emb, 1, &est).unwrap();
        assert!((f + b).abs() < 1e-12);
        assert_eq!(net_te(&gx, &gx, &emb, 1, &est).unwrap(), 0.0);
    }

    #[test]
    fn tuple_layout_bounds() {
        let emb = EmbeddingConfig::default();
        let layout = tuple_layout(100, &emb, 1).unwrap();
        assert_eq!(layout.first_t, 1);
        assert_eq!(layout.count, 99);
        let emb2 = EmbeddingConfig {
            source_dim: 2,
            target_dim: 3,
        };
        let layout = tuple_layout(100, &emb2, 5).unwrap();
        assert_eq!(layout.first_t, 6);
        assert!(tuple_layout(4, &emb2, 5).is_err());
    }
}
