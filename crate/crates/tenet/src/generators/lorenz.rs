//! Two bidirectionally delay-coupled Lorenz systems.
//!
//! The six delay differential equations, with fixed prefactors 10.0 and
//! 2.67 and configurable Rayleigh numbers and couplings:
//!
//! ```text
//! X1' = 10 (Y1 - X1)
//! Y1' = X1 (r1 - Z1) - Y1 + c21 * Y2^2(t - d21)
//! Z1' = X1 Y1 - 2.67 Z1
//! X2' = 10 (Y2 - X2)
//! Y2' = X2 (r2 - Z2) - Y2 + c12 * Y1^2(t - d12)
//! Z2' = X2 Y2 - 2.67 Z2
//! ```
//!
//! Integration is fixed-step classical Runge-Kutta; delayed states are
//! read from the accumulated trajectory with linear interpolation at the
//! half-step stages, and the history before t = 0 is held constant at
//! the initial conditions. The system is fully deterministic.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesSet;

const SIGMA: f64 = 10.0;
const BETA: f64 = 2.67;
const BLOWUP_LIMIT: f64 = 1e6;

/// Configuration of the coupled pair. Defaults reproduce the reference
/// setup: dt = 0.01 s, 150000 samples, couplings 0.1 (system 2 into 1,
/// delayed 3 s) and 0.05 (system 1 into 2, delayed 5 s), Rayleigh
/// numbers 25 and 28, initial state (1.0, 0.97, 0.99) in both systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzPairConfig {
    pub dt: f64,
    pub n_samples: usize,
    /// Coefficient of Y1^2(t - delay_12) in the Y2 equation.
    pub coupling_12: f64,
    /// Coefficient of Y2^2(t - delay_21) in the Y1 equation.
    pub coupling_21: f64,
    /// Seconds; must be a multiple of dt.
    pub delay_12: f64,
    pub delay_21: f64,
    pub rayleigh_1: f64,
    pub rayleigh_2: f64,
    /// (X1, Y1, Z1, X2, Y2, Z2) at t = 0.
    pub initial: [f64; 6],
}

impl Default for LorenzPairConfig {
    fn default() -> Self {
        LorenzPairConfig {
            dt: 0.01,
            n_samples: 150_000,
            coupling_12: 0.05,
            coupling_21: 0.1,
            delay_12: 5.0,
            delay_21: 3.0,
            rayleigh_1: 25.0,
            rayleigh_2: 28.0,
            initial: [1.0, 0.97, 0.99, 1.0, 0.97, 0.99],
        }
    }
}

impl LorenzPairConfig {
    fn delay_steps(&self, delay: f64) -> Result<usize> {
        if delay < 0.0 {
            return Err(Error::invalid(format!("delay {delay} must be >= 0")));
        }
        let steps = (delay / self.dt).round();
        if (delay - steps * self.dt).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "delay {delay} is not a multiple of dt {}",
                self.dt
            )));
        }
        Ok(steps as usize)
    }

    fn validate(&self) -> Result<(usize, usize)> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n_samples < 2 {
            return Err(Error::invalid("n_samples must be >= 2"));
        }
        if !self.initial.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("initial state must be finite"));
        }
        Ok((self.delay_steps(self.delay_12)?, self.delay_steps(self.delay_21)?))
    }
}

/// Right-hand side; `y2_sq_delayed` and `y1_sq_delayed` are the squared
/// delayed coupling inputs.
#[inline]
fn deriv(
    s: &[f64; 6],
    cfg: &LorenzPairConfig,
    y2_sq_delayed: f64,
    y1_sq_delayed: f64,
) -> [f64; 6] {
    let [x1, y1, z1, x2, y2, z2] = *s;
    [
        SIGMA * (y1 - x1),
        x1 * (cfg.rayleigh_1 - z1) - y1 + cfg.coupling_21 * y2_sq_delayed,
        x1 * y1 - BETA * z1,
        SIGMA * (y2 - x2),
        x2 * (cfg.rayleigh_2 - z2) - y2 + cfg.coupling_12 * y1_sq_delayed,
        x2 * y2 - BETA * z2,
    ]
}

/// Linearly interpolated history lookup at fractional sample index `u`;
/// constant `init` before t = 0. Exact at integer indices.
#[inline]
fn history_at(hist: &[f64], init: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return init;
    }
    let i0 = u.floor() as usize;
    let w = u - i0 as f64;
    if w == 0.0 {
        hist[i0]
    } else {
        (1.0 - w) * hist[i0] + w * hist[i0 + 1]
    }
}

/// Integrate the coupled pair; emits series X1, Y1, Z1, X2, Y2, Z2.
pub fn gen_lorenz_pair(cfg: &LorenzPairConfig) -> Result<TimeSeriesSet> {
    let (steps_12, steps_21) = cfg.validate()?;
    let n = cfg.n_samples;

    let mut out: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(n)).collect();
    let mut state = cfg.initial;
    for (series, v) in out.iter_mut().zip(state.iter()) {
        series.push(*v);
    }

    let dt = cfg.dt;
    for step in 0..n - 1 {
        let t = step as f64;
        // delayed squared couplings per RK stage; a zero delay couples to
        // the current stage state instead of the history
        let y2_sq = |u: f64, stage: &[f64; 6]| -> f64 {
            let v = if steps_21 == 0 {
                stage[4]
            } else {
                history_at(&out[4], cfg.initial[4], u - steps_21 as f64)
            };
            v * v
        };
        let y1_sq = |u: f64, stage: &[f64; 6]| -> f64 {
            let v = if steps_12 == 0 {
                stage[1]
            } else {
                history_at(&out[1], cfg.initial[1], u - steps_12 as f64)
            };
            v * v
        };

        let k1 = deriv(&state, cfg, y2_sq(t, &state), y1_sq(t, &state));
        let mut s2 = state;
        for (v, k) in s2.iter_mut().zip(&k1) {
            *v += 0.5 * dt * k;
        }
        let k2 = deriv(&s2, cfg, y2_sq(t + 0.5, &s2), y1_sq(t + 0.5, &s2));
        let mut s3 = state;
        for (v, k) in s3.iter_mut().zip(&k2) {
            *v += 0.5 * dt * k;
        }
        let k3 = deriv(&s3, cfg, y2_sq(t + 0.5, &s3), y1_sq(t + 0.5, &s3));
        let mut s4 = state;
        for (v, k) in s4.iter_mut().zip(&k3) {
            *v += dt * k;
        }
        let k4 = deriv(&s4, cfg, y2_sq(t + 1.0, &s4), y1_sq(t + 1.0, &s4));

        for i in 0..6 {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if state.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP_LIMIT) {
            return Err(Error::Blowup {
                step: step + 1,
                limit: BLOWUP_LIMIT,
            });
        }
        for (series, v) in out.iter_mut().zip(state.iter()) {
            series.push(*v);
        }
    }

    let names = ["X1", "Y1", "Z1", "X2", "Y2", "Z2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut data = Array2::zeros((6, n));
    for (i, series) in out.into_iter().enumerate() {
        for (t, v) in series.into_iter().enumerate() {
            data[(i, t)] = v;
        }
    }
    TimeSeriesSet::new(names, data, cfg.dt)
}
