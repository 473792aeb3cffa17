//! Plug-in transfer entropy on equiprobable bins.
//!
//! Each series is discretized into `bins` equiprobable bins whose edges
//! are the empirical quantiles of that series. Ties (repeated values,
//! e.g. binary data) are handled with the mid-distribution function
//! `F(v) = (#{x < v} + #{x <= v}) / 2M`, which assigns every occurrence
//! of a value to the same bin while keeping bins as close to
//! equiprobable as the data permits. All probabilities are relative
//! frequencies of the observed transition tuples; the result is the
//! plug-in sum in bits and is fully deterministic.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::{tuple_layout, EmbeddingConfig};

/// Discretize into `bins` equiprobable bins via the mid-distribution
/// function. Constant input collapses to a single bin.
pub(crate) fn quantile_symbols(x: &[f64], bins: usize) -> Vec<u16> {
    let m = x.len();
    let mut sorted = x.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let two_m = (2 * m) as f64;
    let b = bins as f64;
    x.iter()
        .map(|&v| {
            let lo = sorted.partition_point(|&s| s < v);
            let hi = sorted.partition_point(|&s| s <= v);
            let mid = (lo + hi) as f64 / two_m;
            ((b * mid) as usize).min(bins - 1) as u16
        })
        .collect()
}

/// Binned plug-in transfer entropy from `source` to `target` at `delay`,
/// in bits. Always >= 0. A constant series yields a single occupied bin
/// and therefore exactly 0 (logged as a warning rather than an error).
pub fn te_binned(
    source: &[f64],
    target: &[f64],
    emb: &EmbeddingConfig,
    delay: usize,
    bins: usize,
) -> Result<f64> {
    if source.len() != target.len() {
        return Err(Error::invalid(format!(
            "series length mismatch: {} vs {}",
            source.len(),
            target.len()
        )));
    }
    if bins < 2 {
        return Err(Error::invalid(format!("bins must be >= 2, got {bins}")));
    }
    let dims = emb.source_dim + emb.target_dim + 1;
    if (bins as f64).powi(dims as i32) > 2f64.powi(62) {
        return Err(Error::invalid(format!(
            "{bins} bins with {dims} tuple dimensions overflows the symbol space"
        )));
    }
    let layout = tuple_layout(source.len(), emb, delay)?;

    let xs = quantile_symbols(source, bins);
    let ys = quantile_symbols(target, bins);
    if xs.iter().all(|&s| s == xs[0]) || ys.iter().all(|&s| s == ys[0]) {
        log::warn!("degenerate binning (constant series); transfer entropy is 0");
    }

    let base = bins as u64;
    let k = emb.source_dim;
    let l = emb.target_dim;
    let n = layout.count as f64;

    // Tuple at time t: (y_t, y_{t-l}..y_{t-1}, x_{t-delay-k+1}..x_{t-delay}),
    // encoded base-`bins`. Four count tables share one pass.
    let mut joint: HashMap<u64, u32> = HashMap::new();
    let mut past: HashMap<u64, u32> = HashMap::new(); // (y_past, x_past)
    let mut next_target: HashMap<u64, u32> = HashMap::new(); // (y_t, y_past)
    let mut target_past: HashMap<u64, u32> = HashMap::new(); // y_past
    for t in layout.first_t..source.len() {
        let mut y_past = 0u64;
        for j in 0..l {
            y_past = y_past * base + ys[t - l + j] as u64;
        }
        let mut x_past = 0u64;
        for j in 0..k {
            x_past = x_past * base + xs[t + 1 + j - delay - k] as u64;
        }
        let y_next = ys[t] as u64;

        let past_key = y_past * base.pow(k as u32) + x_past;
        *joint.entry(past_key * base + y_next).or_insert(0) += 1;
        *past.entry(past_key).or_insert(0) += 1;
        *next_target.entry(y_past * base + y_next).or_insert(0) += 1;
        *target_past.entry(y_past).or_insert(0) += 1;
    }

    // fixed summation order keeps the result bit-reproducible
    let mut entries: Vec<(u64, u32)> = joint.into_iter().collect();
    entries.sort_unstable_by_key(|&(key, _)| key);

    let mut te = 0.0;
    let k_pow = base.pow(k as u32);
    for &(key, c_joint) in &entries {
        let y_next = key % base;
        let past_key = key / base;
        let y_past = past_key / k_pow;
        let c_past = past[&past_key] as f64;
        let c_next = next_target[&(y_past * base + y_next)] as f64;
        let c_ypast = target_past[&y_past] as f64;
        let c = c_joint as f64;
        te += (c / n) * (c * c_ypast / (c_past * c_next)).log2();
    }
    // the plug-in sum is a KL divergence, so negative values can only be
    // floating-point dust
    Ok(te.max(0.0))
}
