//! Independent oracles for the acceptance suite. Everything here is
//! deliberately naive and shares no code with the library paths it
//! checks.

#![allow(dead_code)]

use std::collections::HashMap;

/// O(M^2) direct DFT power spectrum.
pub fn naive_periodogram(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    (0..m)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (t, &v) in x.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * (k * t) as f64 / m as f64;
                re += v * angle.cos();
                im += v * angle.sin();
            }
            re * re + im * im
        })
        .collect()
}

/// Mid-distribution equiprobable binning, reimplemented with O(M^2)
/// counting.
pub fn oracle_bins(x: &[f64], bins: usize) -> Vec<usize> {
    let m = x.len() as f64;
    x.iter()
        .map(|&v| {
            let below = x.iter().filter(|&&s| s < v).count() as f64;
            let at_or_below = x.iter().filter(|&&s| s <= v).count() as f64;
            let mid = (below + at_or_below) / (2.0 * m);
            ((bins as f64 * mid) as usize).min(bins - 1)
        })
        .collect()
}

/// Exhaustive-count plug-in transfer entropy: discretize, enumerate
/// every transition tuple, and evaluate the conditional probabilities
/// by direct division. k = l = 1.
pub fn oracle_te_binned(source: &[f64], target: &[f64], tau: usize, bins: usize) -> f64 {
    let xs = oracle_bins(source, bins);
    let ys = oracle_bins(target, bins);
    let m = source.len();
    let first_t = 1usize.max(tau);

    let mut joint: HashMap<(usize, usize, usize), f64> = HashMap::new();
    let mut past: HashMap<(usize, usize), f64> = HashMap::new();
    let mut next: HashMap<(usize, usize), f64> = HashMap::new();
    let mut cond: HashMap<usize, f64> = HashMap::new();
    let mut n = 0.0;
    for t in first_t..m {
        let tuple = (ys[t], ys[t - 1], xs[t - tau]);
        *joint.entry(tuple).or_insert(0.0) += 1.0;
        *past.entry((ys[t - 1], xs[t - tau])).or_insert(0.0) += 1.0;
        *next.entry((ys[t], ys[t - 1])).or_insert(0.0) += 1.0;
        *cond.entry(ys[t - 1]).or_insert(0.0) += 1.0;
        n += 1.0;
    }

    let mut te = 0.0;
    for (&(yt, yp, xp), &c) in &joint {
        let p_tuple = c / n;
        let p_next_given_both = c / past[&(yp, xp)];
        let p_next_given_past = next[&(yt, yp)] / cond[&yp];
        te += p_tuple * (p_next_given_both / p_next_given_past).log2();
    }
    te
}

/// Dominant eigenpair of an elementwise-positive matrix by dense
/// algebra: the Perron root is located by bisecting det(lambda I - A)
/// below the max row sum, and the eigenvector is recovered with two
/// inverse-iteration solves at that shift. Returns the eigenvector
/// normalized to sum 1.
pub fn oracle_stationary(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let lambda = perron_root(a);
    // inverse iteration: each solve amplifies the near-null direction
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..3 {
        let shifted: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| a[i][j] - if i == j { lambda } else { 0.0 })
                    .collect()
            })
            .collect();
        x = solve(shifted, x);
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    if x.iter().sum::<f64>() < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
    let sum: f64 = x.iter().sum();
    x.into_iter().map(|v| v / sum).collect()
}

fn perron_root(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let det_shifted = |lambda: f64| -> f64 {
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { lambda - a[i][j] } else { -a[i][j] })
                    .collect()
            })
            .collect();
        determinant(m)
    };
    // the Perron root is the largest real eigenvalue, bounded above by
    // the max row sum; det is positive beyond it
    let mut hi = a
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    let steps = 20_000;
    let step = hi / steps as f64;
    let mut lo = hi - step;
    while lo > -hi {
        if det_shifted(lo) <= 0.0 {
            break;
        }
        hi = lo;
        lo -= step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if det_shifted(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Gaussian elimination with partial pivoting; tiny pivots are kept
/// (inverse iteration relies on the near-singular solve).
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &c| m[a][col].abs().total_cmp(&m[c][col].abs()))
            .unwrap();
        m.swap(pivot, col);
        b.swap(pivot, col);
        let p = if m[col][col] == 0.0 { 1e-300 } else { m[col][col] };
        for row in col + 1..n {
            let f = m[row][col] / p;
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        let p = if m[row][row] == 0.0 { 1e-300 } else { m[row][row] };
        x[row] = acc / p;
    }
    x
}
