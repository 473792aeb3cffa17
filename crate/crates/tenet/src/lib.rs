//! Reconstruct who drives whom in a multivariate system — and how hard —
//! from time series alone.
//!
//! `tenet` builds a directed, weighted information-transfer network from
//! multivariate time series using delay-resolved transfer entropy with
//! surrogate significance testing, then ranks the nodes by teleported
//! spectral centrality to surface the most influential causal sources.
//! Bundled generators (a delay-coupled Lorenz pair, linear-Gaussian VAR
//! processes, binary fault cascades) provide ground truth to validate
//! the whole chain.
//!
//! The pipeline, end to end:
//!
//! 1. [`timeseries`] — load, validate, standardize and window the data.
//! 2. [`estimators`] — transfer entropy per ordered pair, maximized over
//!    a delay grid (binned plug-in or Kraskov k-nearest-neighbor).
//! 3. [`surrogates`] — iAAFT surrogate data and the max-statistic
//!    significance test.
//! 4. [`network`] — assemble significant edges into an influence graph.
//! 5. [`ranking`] — teleported spectral source ranking (power iteration
//!    on the edge-reversed transition matrix).
//! 6. [`pipeline`] — rolling-window orchestration, detection counts,
//!    importance trajectories, file outputs.
//!
//! # Quick start
//!
//! ```
//! use tenet::estimators::{scan_delays, DelayGrid, EmbeddingConfig, TeEstimator};
//!
//! // a noiseless copy channel: y lags x by 2 samples
//! let mut state = 0x2545F4914F6CDD1Du64;
//! let mut x = Vec::new();
//! for _ in 0..500 {
//!     state ^= state << 13;
//!     state ^= state >> 7;
//!     state ^= state << 17;
//!     x.push((state & 1) as f64);
//! }
//! let mut y = vec![0.0; 500];
//! for t in 2..500 {
//!     y[t] = x[t - 2];
//! }
//!
//! let grid = DelayGrid::new(vec![1, 2, 3])?;
//! let est = TeEstimator::Binned { bins: 2 };
//! let found = scan_delays(&x, &y, &EmbeddingConfig::default(), &grid, &est)?;
//! assert_eq!(found.delay, 2);
//! assert!(found.value > 0.5);
//! # Ok::<(), tenet::Error>(())
//! ```

pub mod error;
pub mod estimators;
pub mod generators;
pub mod network;
pub mod pipeline;
pub mod ranking;
pub mod seeding;
pub mod surrogates;
pub mod timeseries;

pub use error::{Error, Result};
