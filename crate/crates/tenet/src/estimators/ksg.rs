//! Kraskov-style k-nearest-neighbor transfer entropy.
//!
//! TE is computed as the conditional mutual information
//! `I(y_t ; x_past | y_past)` with the fixed-K, max-norm variant
//! (algorithm 1): for every transition tuple the distance `d_i` to its
//! K-th neighbor in the joint space sets a radius, neighbors are counted
//! strictly inside `d_i` in the marginal subspaces, and digamma terms of
//! those counts are averaged:
//!
//! ```text
//! I = psi(K) + < psi(n_ypast + 1) - psi(n_ynext,ypast + 1) - psi(n_xpast,ypast + 1) >
//! ```
//!
//! in nats, converted to bits. Inputs are standardized internally
//! (population sd), and a deterministic sub-resolution jitter seeded by
//! `seed` breaks distance ties, so the result is reproducible and
//! invariant (to within estimator noise) under monotone rescaling of
//! either series. Digamma is only ever needed at integer arguments, so
//! it is evaluated exactly via harmonic numbers.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;
use crate::timeseries::population_sd;

use super::neighbors::{MaxNormIndex, PointSet};
use super::{tuple_layout, EmbeddingConfig};

/// Tie-breaking jitter amplitude relative to unit-variance data. Far
/// below sample resolution, large enough to separate equal values.
const JITTER: f64 = 1e-8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// psi(1..=max) via psi(1) = -gamma, psi(n+1) = psi(n) + 1/n.
fn digamma_table(max: usize) -> Vec<f64> {
    let mut table = vec![0.0; max + 1];
    if max >= 1 {
        table[1] = -EULER_GAMMA;
        for n in 1..max {
            table[n + 1] = table[n] + 1.0 / n as f64;
        }
    }
    table
}

fn standardized(x: &[f64], role: &str) -> Result<Vec<f64>> {
    let sd = population_sd(x);
    if sd == 0.0 {
        return Err(Error::invalid(format!("{role} series has zero variance")));
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    Ok(x.iter().map(|v| (v - mean) / sd).collect())
}

/// KSG transfer entropy from `source` to `target` at `delay`, in bits,
/// using `neighbors` nearest neighbors. May be slightly negative on
/// small samples; callers clamp at reporting time.
pub fn te_ksg(
    source: &[f64],
    target: &[f64],
    emb: &EmbeddingConfig,
    delay: usize,
    neighbors: usize,
    seed: u64,
) -> Result<f64> {
    if source.len() != target.len() {
        return Err(Error::invalid(format!(
            "series length mismatch: {} vs {}",
            source.len(),
            target.len()
        )));
    }
    if neighbors == 0 {
        return Err(Error::invalid("neighbor count must be >= 1"));
    }
    let layout = tuple_layout(source.len(), emb, delay)?;
    let n = layout.count;
    if neighbors >= n {
        return Err(Error::invalid(format!(
            "neighbor count {neighbors} must be below tuple count {n}"
        )));
    }

    let x = standardized(source, "source")?;
    let y = standardized(target, "target")?;

    let k = emb.source_dim;
    let l = emb.target_dim;
    let dim_joint = 1 + k + l;

    // Joint point layout per tuple t: [y_t | x_past (k) | y_past (l)],
    // jittered once so every marginal sees the same coordinates.
    let mut rng = rng_from_seed(seed);
    let mut joint = PointSet::new(n, dim_joint);
    for (row, t) in (layout.first_t..source.len()).enumerate() {
        joint.set(row, 0, y[t] + JITTER * rng.random::<f64>());
        for j in 0..k {
            joint.set(
                row,
                1 + j,
                x[t + 1 + j - delay - k] + JITTER * rng.random::<f64>(),
            );
        }
        for j in 0..l {
            joint.set(row, 1 + k + j, y[t - l + j] + JITTER * rng.random::<f64>());
        }
    }

    // marginal projections: (y_t, y_past), (x_past, y_past), (y_past)
    let mut next_cond = PointSet::new(n, 1 + l);
    let mut source_cond = PointSet::new(n, k + l);
    let mut cond = PointSet::new(n, l);
    for row in 0..n {
        let p = joint.point(row);
        let (head, tail) = (p[0], &p[1 + k..]);
        next_cond.set(row, 0, head);
        for (j, &v) in tail.iter().enumerate() {
            next_cond.set(row, 1 + j, v);
            cond.set(row, j, v);
        }
        for (j, &v) in p[1..1 + k + l].iter().enumerate() {
            source_cond.set(row, j, v);
        }
    }

    let joint_idx = MaxNormIndex::build(&joint);
    let next_idx = MaxNormIndex::build(&next_cond);
    let source_idx = MaxNormIndex::build(&source_cond);
    let cond_idx = MaxNormIndex::build(&cond);

    let psi = digamma_table(n + 1);
    let mut acc = 0.0;
    for i in 0..n {
        let radius = joint_idx.kth_distance(&joint, i, neighbors);
        let n_next = next_idx.count_closer(&next_cond, i, radius);
        let n_source = source_idx.count_closer(&source_cond, i, radius);
        let n_cond = cond_idx.count_closer(&cond, i, radius);
        acc += psi[n_cond + 1] - psi[n_next + 1] - psi[n_source + 1];
    }
    let nats = psi[neighbors] + acc / n as f64;
    Ok(nats / std::f64::consts::LN_2)
}
