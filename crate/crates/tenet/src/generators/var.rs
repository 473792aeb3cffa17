//! Seeded linear Gaussian VAR simulation; the analytic substrate for the
//! transfer-entropy oracles.

use ndarray::Array2;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;
use crate::timeseries::TimeSeriesSet;

const BURN_IN: usize = 1000;

/// VAR(p) process `x_t = sum_h A_h x_{t-h} + eps_t` with iid Gaussian
/// innovations of standard deviation `noise_sd`. One lag matrix per lag,
/// all N x N. The first 1000 samples are discarded as burn-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarConfig {
    pub coefficients: Vec<Array2<f64>>,
    pub noise_sd: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Spectral radius of the companion matrix, estimated by normalized
/// repeated squaring: rho = lim ||C^(2^j)||_F^(1/2^j).
fn companion_spectral_radius(coefficients: &[Array2<f64>]) -> f64 {
    let n = coefficients[0].nrows();
    let p = coefficients.len();
    let dim = n * p;
    let mut c = Array2::zeros((dim, dim));
    for (h, a) in coefficients.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                c[(i, h * n + j)] = a[(i, j)];
            }
        }
    }
    for i in n..dim {
        c[(i, i - n)] = 1.0;
    }

    let mut log_rho = 0.0;
    let mut weight = 1.0;
    let mut m = c;
    for _ in 0..32 {
        let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        log_rho += weight * norm.ln();
        m.mapv_inplace(|v| v / norm);
        m = m.dot(&m);
        weight *= 0.5;
    }
    log_rho.exp()
}

pub fn gen_var(cfg: &VarConfig) -> Result<TimeSeriesSet> {
    if cfg.coefficients.is_empty() {
        return Err(Error::invalid("at least one lag matrix is required"));
    }
    let n = cfg.coefficients[0].nrows();
    if n == 0 {
        return Err(Error::invalid("empty coefficient matrix"));
    }
    for a in &cfg.coefficients {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::invalid(format!(
                "all lag matrices must be {n}x{n}, found {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coefficient matrices must be finite"));
        }
    }
    if !(cfg.noise_sd > 0.0) || !cfg.noise_sd.is_finite() {
        return Err(Error::invalid(format!(
            "noise sd must be positive, got {}",
            cfg.noise_sd
        )));
    }
    if cfg.n_samples < 2 {
        return Err(Error::invalid("n_samples must be >= 2"));
    }
    let rho = companion_spectral_radius(&cfg.coefficients);
    if rho >= 1.0 {
        return Err(Error::invalid(format!(
            "unstable coefficients: companion spectral radius {rho:.6} >= 1"
        )));
    }

    let total = BURN_IN + cfg.n_samples;
    let mut rng = rng_from_seed(cfg.seed);
    let normal = Normal::new(0.0, cfg.noise_sd).expect("positive sd");

    let mut series = vec![vec![0.0f64; total]; n];
    for t in 0..total {
        for i in 0..n {
            let mut v = normal.sample(&mut rng);
            for (h, a) in cfg.coefficients.iter().enumerate() {
                if t > h {
                    for j in 0..n {
                        v += a[(i, j)] * series[j][t - h - 1];
                    }
                }
            }
            series[i][t] = v;
        }
    }

    let names = (1..=n).map(|i| format!("v{i}")).collect();
    let mut data = Array2::zeros((n, cfg.n_samples));
    for i in 0..n {
        for t in 0..cfg.n_samples {
            data[(i, t)] = series[i][BURN_IN + t];
        }
    }
    TimeSeriesSet::new(names, data, 1.0)
}
