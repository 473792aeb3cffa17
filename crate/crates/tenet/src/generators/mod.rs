//! Synthetic ground-truth systems: a delay-coupled Lorenz pair, linear
//! Gaussian VAR processes, and binary fault cascades. Each generator is
//! deterministic given its configuration (and seed, where one applies),
//! and emits an ordinary [`crate::timeseries::TimeSeriesSet`].

mod cascade;
mod lorenz;
mod var;

pub use cascade::{gen_cascade, CascadeConfig, CascadeEdge};
pub use lorenz::{gen_lorenz_pair, LorenzPairConfig};
pub use var::{gen_var, VarConfig};
