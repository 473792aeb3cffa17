//! Binary fault cascades: a root emits iid Bernoulli activity that
//! propagates down a tree of named nodes, each edge applying a sample
//! delay and independent flip noise. Emulates the shape of binary
//! diagnostic telemetry where one parameter is the true origin of a
//! web of collateral effects.

use std::collections::HashMap;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{derive_seed, fnv1a, rng_from_seed};
use crate::timeseries::TimeSeriesSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeEdge {
    pub parent: String,
    pub child: String,
    /// Samples; >= 1.
    pub delay: usize,
    /// Flip probability in [0, 0.5).
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub nodes: Vec<String>,
    pub edges: Vec<CascadeEdge>,
    /// Bernoulli rate of root activity.
    pub root_rate: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl CascadeConfig {
    /// Parent index per node (None for roots), topologically ordered
    /// node indices, or an error for cycles / multiple parents.
    fn topology(&self) -> Result<(Vec<Option<(usize, usize, f64)>>, Vec<usize>)> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::invalid("cascade needs at least one node"));
        }
        for (i, name) in self.nodes.iter().enumerate() {
            if name.is_empty() || self.nodes[..i].contains(name) {
                return Err(Error::invalid(format!("bad or duplicate node name '{name}'")));
            }
        }
        let index: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut parent: Vec<Option<(usize, usize, f64)>> = vec![None; n];
        for e in &self.edges {
            let p = *index
                .get(e.parent.as_str())
                .ok_or_else(|| Error::invalid(format!("unknown parent '{}'", e.parent)))?;
            let c = *index
                .get(e.child.as_str())
                .ok_or_else(|| Error::invalid(format!("unknown child '{}'", e.child)))?;
            if e.delay == 0 {
                return Err(Error::invalid(format!(
                    "edge {} -> {} must have delay >= 1",
                    e.parent, e.child
                )));
            }
            if !(0.0..0.5).contains(&e.noise) {
                return Err(Error::invalid(format!(
                    "edge {} -> {} noise {} outside [0, 0.5)",
                    e.parent, e.child, e.noise
                )));
            }
            if parent[c].is_some() {
                return Err(Error::invalid(format!(
                    "node '{}' has multiple parents",
                    e.child
                )));
            }
            if p == c {
                return Err(Error::invalid(format!("cycle detected at '{}'", e.child)));
            }
            parent[c] = Some((p, e.delay, e.noise));
        }

        // walk parent pointers; revisiting an in-progress node is a cycle
        let mut order = Vec::with_capacity(n);
        let mut mark = vec![0u8; n]; // 0 new, 1 visiting, 2 done
        for start in 0..n {
            let mut chain = Vec::new();
            let mut cur = start;
            loop {
                match mark[cur] {
                    2 => break,
                    1 => {
                        return Err(Error::invalid(format!(
                            "cycle detected at '{}'",
                            self.nodes[cur]
                        )))
                    }
                    _ => {
                        mark[cur] = 1;
                        chain.push(cur);
                        match parent[cur] {
                            Some((p, _, _)) => cur = p,
                            None => break,
                        }
                    }
                }
            }
            for &node in chain.iter().rev() {
                mark[node] = 2;
                order.push(node);
            }
        }
        Ok((parent, order))
    }
}

pub fn gen_cascade(cfg: &CascadeConfig) -> Result<TimeSeriesSet> {
    if !(cfg.root_rate > 0.0 && cfg.root_rate < 1.0) {
        return Err(Error::invalid(format!(
            "root rate must lie in (0, 1), got {}",
            cfg.root_rate
        )));
    }
    if cfg.n_samples < 2 {
        return Err(Error::invalid("n_samples must be >= 2"));
    }
    let (parent, order) = cfg.topology()?;
    let n = cfg.nodes.len();
    let m = cfg.n_samples;

    let mut series: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &node in &order {
        // per-node stream derived from the node name: reordering the
        // node list cannot change the data
        let mut rng = rng_from_seed(derive_seed(
            cfg.seed,
            fnv1a(cfg.nodes[node].as_bytes()),
        ));
        let mut s = Vec::with_capacity(m);
        match parent[node] {
            None => {
                for _ in 0..m {
                    s.push(if rng.random::<f64>() < cfg.root_rate { 1.0 } else { 0.0 });
                }
            }
            Some((p, delay, noise)) => {
                let parent_series = &series[p];
                for t in 0..m {
                    if t < delay {
                        // no parent signal yet; independent background
                        s.push(if rng.random::<f64>() < cfg.root_rate { 1.0 } else { 0.0 });
                    } else {
                        let v = parent_series[t - delay];
                        let flip = rng.random::<f64>() < noise;
                        s.push(if flip { 1.0 - v } else { v });
                    }
                }
            }
        }
        series[node] = s;
    }

    let mut data = Array2::zeros((n, m));
    for (i, s) in series.into_iter().enumerate() {
        for (t, v) in s.into_iter().enumerate() {
            data[(i, t)] = v;
        }
    }
    TimeSeriesSet::new(cfg.nodes.clone(), data, 1.0)
}
