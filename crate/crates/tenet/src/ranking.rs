//! Spectral source ranking: transition-matrix normalization,
//! teleportation, power iteration.
//!
//! A node is an influential *source* when it transfers information to
//! nodes that are themselves influential. Operationally that is the
//! stationary distribution of a teleported random walk on the
//! edge-**reversed** influence graph (the CheiRank construction): the
//! adjacency matrix is transposed, each row is normalized to transition
//! probabilities (zero rows stay zero), teleportation mixes in a uniform
//! jump,
//!
//! ```text
//! P' = gamma * P + (1 - gamma) / N * J
//! ```
//!
//! and power iteration finds the unique positive stationary vector.
//! Running the walk on the reversed graph is what makes high scores mean
//! "feeds information into the system" rather than "collects it"; on the
//! original orientation the dominant eigenvector of the (near-)row-
//! stochastic `P'` is near-uniform and carries no ranking signal. Zero
//! rows (dangling nodes after reversal) teleport uniformly through the
//! `(1 - gamma)/N` term; no separate patch vector is applied.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-stochastic transition matrix; rows of an all-zero adjacency row
/// remain exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix(Array2<f64>);

/// Teleported, elementwise-positive walk matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GoogleMatrix {
    matrix: Array2<f64>,
    gamma: f64,
}

/// Node importance scores, normalized to sum 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    scores: Vec<f64>,
    pub iterations: usize,
    /// Final L1 change between successive iterates.
    pub residual: f64,
}

pub const DEFAULT_GAMMA: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Normalize each row of a non-negative square matrix to sum 1; all-zero
/// rows are kept as zero.
pub fn row_normalize(w: &Array2<f64>) -> Result<TransitionMatrix> {
    if w.nrows() != w.ncols() {
        return Err(Error::invalid(format!(
            "matrix must be square, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    if let Some(bad) = w.iter().find(|v| **v < 0.0 || !v.is_finite()) {
        return Err(Error::invalid(format!(
            "matrix entries must be non-negative and finite, found {bad}"
        )));
    }
    let mut p = w.clone();
    for mut row in p.rows_mut() {
        let sum = row.sum();
        if sum != 0.0 {
            row.mapv_inplace(|v| v / sum);
        }
    }
    Ok(TransitionMatrix(p))
}

impl TransitionMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }
}

/// `P' = gamma * P + (1 - gamma)/N * J`; strictly positive for any
/// gamma in (0, 1).
pub fn google_matrix(p: &TransitionMatrix, gamma: f64) -> Result<GoogleMatrix> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!(
            "teleportation gamma must lie in (0, 1), got {gamma}"
        )));
    }
    let n = p.0.nrows();
    if n == 0 {
        return Err(Error::invalid("empty transition matrix"));
    }
    let jump = (1.0 - gamma) / n as f64;
    let matrix = p.0.mapv(|v| gamma * v + jump);
    Ok(GoogleMatrix { matrix, gamma })
}

impl GoogleMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Stationary distribution of the walk (left Perron eigenvector),
    /// from the uniform start, renormalized to sum 1 every step.
    pub fn stationary(&self, tol: f64, max_iter: usize) -> Result<RankVector> {
        if !(tol > 0.0) {
            return Err(Error::invalid(format!("tolerance must be > 0, got {tol}")));
        }
        let n = self.matrix.nrows();
        let mut pi = vec![1.0 / n as f64; n];
        let mut next = vec![0.0; n];
        for iter in 1..=max_iter {
            // next = pi^T * P'
            next.fill(0.0);
            for (i, row) in self.matrix.rows().into_iter().enumerate() {
                let w = pi[i];
                for (j, &p) in row.iter().enumerate() {
                    next[j] += w * p;
                }
            }
            let sum: f64 = next.iter().sum();
            for v in next.iter_mut() {
                *v /= sum;
            }
            let residual: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut pi, &mut next);
            if residual < tol {
                let total: f64 = pi.iter().sum();
                for v in pi.iter_mut() {
                    *v /= total;
                }
                return Ok(RankVector {
                    scores: pi,
                    iterations: iter,
                    residual,
                });
            }
        }
        let residual: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        Err(Error::NonConvergence {
            iterations: max_iter,
            residual,
        })
    }
}

/// Source-importance scores for a weighted adjacency matrix `W` whose
/// entry `(i, j)` is the information transfer from node i to node j.
/// The walk runs on the transposed matrix so that sources, not sinks,
/// collect mass.
pub fn rank_sources(
    w: &Array2<f64>,
    gamma: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RankVector> {
    let reversed = w.t().to_owned();
    let p = row_normalize(&reversed)?;
    google_matrix(&p, gamma)?.stationary(tol, max_iter)
}

impl RankVector {
    /// Scores summing to 1.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Scores rescaled so the maximum is 1 (display convention).
    pub fn max_normalized(&self) -> Vec<f64> {
        let max = self.scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.scores.iter().map(|s| s / max).collect()
    }

    /// 1-based rank per node (1 = most important); ties keep node order.
    pub fn positions(&self) -> Vec<usize> {
        let n = self.scores.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        let mut pos = vec![0; n];
        for (rank, &node) in order.iter().enumerate() {
            pos[node] = rank + 1;
        }
        pos
    }

    /// `node,score,rank` CSV, scores sum-normalized, rows in node order.
    pub fn to_csv_string(&self, names: &[String]) -> String {
        let pos = self.positions();
        let mut out = String::from("node,score,rank\n");
        for (i, name) in names.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", name, self.scores[i], pos[i]));
        }
        out
    }
}
