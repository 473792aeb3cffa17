//! Assemble pairwise transfer-entropy results into a directed weighted
//! influence graph.
//!
//! Every ordered pair (including self-loops with delay >= 1) is scanned
//! over the delay grid, the winner is significance-tested against iAAFT
//! surrogates, and the surviving edges form the graph. Two weighting
//! modes exist: `raw` keeps the directional TE of every significant
//! edge (bidirectional couplings stay visible), `net` keeps only the
//! dominant direction of each pair weighted by the TE difference at the
//! dominant delay. No pruning of indirect (semi-metric) edges is done;
//! the downstream spectral ranking is robust to keeping them.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    scan_delays, DelayGrid, EmbeddingConfig, EstimatorKind, TeEstimate, TeEstimator,
};
use crate::ranking::RankVector;
use crate::seeding::{derive_seed, pair_stream};
use crate::surrogates::{test_edge, SignificanceResult};
use crate::timeseries::{population_sd, TimeSeriesSet};

/// Edge weighting convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// Weight = directional TE (clamped at 0); both directions may appear.
    RawTe,
    /// Weight = TE difference of the dominant direction; at most one
    /// direction per pair, no self-loops.
    NetTe,
}

impl std::fmt::Display for GraphMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphMode::RawTe => write!(f, "raw"),
            GraphMode::NetTe => write!(f, "net"),
        }
    }
}

/// Estimator selection without per-call seeds; `build_graph` derives
/// those per pair. `bins: None` picks 2 for all-binary data and 6
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum EstimatorChoice {
    Binned { bins: Option<usize> },
    Ksg { neighbors: usize },
}

impl EstimatorChoice {
    pub fn kind(&self) -> EstimatorKind {
        match self {
            EstimatorChoice::Binned { .. } => EstimatorKind::Binned,
            EstimatorChoice::Ksg { .. } => EstimatorKind::Ksg,
        }
    }

    fn instantiate(&self, set: &TimeSeriesSet, seed: u64) -> TeEstimator {
        match *self {
            EstimatorChoice::Binned { bins } => TeEstimator::Binned {
                bins: bins.unwrap_or_else(|| auto_bins(set)),
            },
            EstimatorChoice::Ksg { neighbors } => TeEstimator::Ksg { neighbors, seed },
        }
    }
}

/// Default bin count: 2 when every series is {0,1}-valued, 6 otherwise.
pub fn auto_bins(set: &TimeSeriesSet) -> usize {
    let binary = set
        .data()
        .iter()
        .all(|&v| v == 0.0 || v == 1.0);
    if binary {
        2
    } else {
        6
    }
}

/// A directed edge: information transfer of `weight` bits from `source`
/// to `target` at `delay` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub delay: usize,
}

/// Directed weighted influence graph over named nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    mode: GraphMode,
}

/// Scan and significance detail for one ordered pair; kept by
/// [`build_graph_detailed`] so the rolling pipeline can trace couplings
/// whether or not they pass the test. `significance` is `None` for
/// pairs involving a constant series (non-significant by construction)
/// and for the untested direction in net mode.
#[derive(Debug, Clone)]
pub struct PairScan {
    pub source: usize,
    pub target: usize,
    pub estimate: TeEstimate,
    pub significance: Option<SignificanceResult>,
}

/// Everything `build_graph` needs besides the data and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub embedding: EmbeddingConfig,
    pub delays: DelayGrid,
    pub estimator: EstimatorChoice,
    pub n_surrogates: usize,
    pub mode: GraphMode,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            embedding: EmbeddingConfig::default(),
            delays: DelayGrid::default_coarse(),
            estimator: EstimatorChoice::Ksg { neighbors: 4 },
            n_surrogates: 19,
            mode: GraphMode::RawTe,
        }
    }
}

impl InfluenceGraph {
    pub fn new(nodes: Vec<String>, mut edges: Vec<Edge>, mode: GraphMode) -> Result<Self> {
        let n = nodes.len();
        edges.sort_by_key(|e| (e.source, e.target));
        let mut seen = HashSet::new();
        for e in &edges {
            if e.source >= n || e.target >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) out of range for {n} nodes",
                    e.source, e.target
                )));
            }
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(Error::invalid(format!(
                    "edge weight must be positive and finite, got {}",
                    e.weight
                )));
            }
            if e.source == e.target && e.delay == 0 {
                return Err(Error::invalid("self-loop with delay 0"));
            }
            if !seen.insert((e.source, e.target)) {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    e.source, e.target
                )));
            }
            if mode == GraphMode::NetTe && seen.contains(&(e.target, e.source)) {
                return Err(Error::invalid(format!(
                    "net mode forbids 2-cycle between {} and {}",
                    e.source, e.target
                )));
            }
        }
        Ok(InfluenceGraph { nodes, edges, mode })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    /// Weight matrix: entry (i, j) is the weight of edge i -> j, 0 where
    /// absent.
    pub fn adjacency(&self) -> Array2<f64> {
        let n = self.nodes.len();
        let mut w = Array2::zeros((n, n));
        for e in &self.edges {
            w[(e.source, e.target)] = e.weight;
        }
        w
    }

    /// `source,target,weight_bits,delay_samples,significant` CSV; rows
    /// in (source, target) order. Stored edges all passed the test, so
    /// the last column is `true` on export; the loader skips `false`
    /// rows, which lets richer externally produced tables round-trip.
    pub fn to_edge_csv_string(&self) -> String {
        let mut out = String::from("source,target,weight_bits,delay_samples,significant\n");
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{},{},{},{},true",
                self.nodes[e.source], self.nodes[e.target], e.weight, e.delay
            );
        }
        out
    }

    pub fn write_edge_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_edge_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Load a graph from an edge CSV. Nodes are the sorted set of names
    /// seen in significant rows; mode is taken to be raw TE.
    pub fn load_edge_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid(format!("{}: empty file", path.display())))?;
        if header != "source,target,weight_bits,delay_samples,significant" {
            return Err(Error::invalid(format!(
                "{}: unexpected edge CSV header '{header}'",
                path.display()
            )));
        }
        let mut rows = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::invalid(format!(
                    "{}: row {} has {} fields, expected 5",
                    path.display(),
                    row + 1,
                    fields.len()
                )));
            }
            let parse = |column: &str, value: &str, message: &str| Error::Parse {
                path: path.to_path_buf(),
                row: row + 1,
                column: column.to_string(),
                message: format!("{message} '{value}'"),
            };
            let weight: f64 = fields[2]
                .parse()
                .map_err(|_| parse("weight_bits", fields[2], "cannot parse"))?;
            let delay: usize = fields[3]
                .parse()
                .map_err(|_| parse("delay_samples", fields[3], "cannot parse"))?;
            let significant: bool = fields[4]
                .parse()
                .map_err(|_| parse("significant", fields[4], "cannot parse"))?;
            if significant && weight > 0.0 {
                rows.push((fields[0].to_string(), fields[1].to_string(), weight, delay));
            }
        }
        let mut names: Vec<String> = rows
            .iter()
            .flat_map(|(s, t, _, _)| [s.clone(), t.clone()])
            .collect();
        names.sort();
        names.dedup();
        let index = |name: &str| names.iter().position(|n| n == name).unwrap();
        let edges = rows
            .iter()
            .map(|(s, t, w, d)| Edge {
                source: index(s),
                target: index(t),
                weight: *w,
                delay: *d,
            })
            .collect();
        InfluenceGraph::new(names, edges, GraphMode::RawTe)
    }

    /// Graphviz DOT: edge label = delay (samples), pen width scales with
    /// weight; node size scales with rank score when supplied.
    pub fn to_dot(&self, ranks: Option<&RankVector>) -> String {
        let mut out = String::from("digraph influence {\n  rankdir=LR;\n  node [shape=circle];\n");
        let max_score = ranks.map(|r| {
            r.scores()
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
        });
        for (i, name) in self.nodes.iter().enumerate() {
            match (ranks, max_score) {
                (Some(r), Some(max)) => {
                    let size = 0.3 + 1.2 * r.scores()[i] / max;
                    let _ = writeln!(
                        out,
                        "  \"{name}\" [width={size:.2}, height={size:.2}, fixedsize=true];"
                    );
                }
                _ => {
                    let _ = writeln!(out, "  \"{name}\";");
                }
            }
        }
        let max_w = self
            .edges
            .iter()
            .map(|e| e.weight)
            .fold(f64::NEG_INFINITY, f64::max);
        for e in &self.edges {
            let pen = 0.5 + 3.5 * e.weight / max_w;
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", penwidth={pen:.2}];",
                self.nodes[e.source], self.nodes[e.target], e.delay
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Reconstruct the influence graph of a time series set.
pub fn build_graph(set: &TimeSeriesSet, cfg: &NetworkConfig, seed: u64) -> Result<InfluenceGraph> {
    build_graph_detailed(set, cfg, seed).map(|(g, _)| g)
}

/// As [`build_graph`], additionally returning the per-pair scan table.
pub fn build_graph_detailed(
    set: &TimeSeriesSet,
    cfg: &NetworkConfig,
    seed: u64,
) -> Result<(InfluenceGraph, Vec<PairScan>)> {
    let n = set.n_series();
    if n < 2 {
        return Err(Error::invalid(format!(
            "network reconstruction needs at least 2 series, got {n}"
        )));
    }
    cfg.embedding.validate()?;
    if cfg.n_surrogates == 0 {
        return Err(Error::invalid("surrogate count must be >= 1"));
    }
    let self_grid = cfg.delays.for_self_loop()?;
    let constant: Vec<bool> = (0..n)
        .map(|i| population_sd(set.series_slice(i)) == 0.0)
        .collect();

    // ordered pairs; self-loops only make sense in raw mode (net TE of a
    // pair with itself is identically zero)
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j || cfg.mode == GraphMode::RawTe {
                pairs.push((i, j));
            }
        }
    }

    let scans: Vec<PairScan> = pairs
        .par_iter()
        .map(|&(i, j)| scan_pair(set, cfg, seed, &self_grid, &constant, i, j))
        .collect::<Result<Vec<_>>>()?;

    let edges = match cfg.mode {
        GraphMode::RawTe => raw_edges(&scans),
        GraphMode::NetTe => net_edges(set, cfg, seed, &scans)?,
    };
    let graph = InfluenceGraph::new(set.names().to_vec(), edges, cfg.mode)?;
    Ok((graph, scans))
}

fn scan_pair(
    set: &TimeSeriesSet,
    cfg: &NetworkConfig,
    seed: u64,
    self_grid: &DelayGrid,
    constant: &[bool],
    i: usize,
    j: usize,
) -> Result<PairScan> {
    let grid = if i == j { self_grid } else { &cfg.delays };
    if constant[i] || constant[j] {
        // constant series carry no information; mark non-significant
        // without estimating so the node keeps its place in the graph
        return Ok(PairScan {
            source: i,
            target: j,
            estimate: TeEstimate {
                value: 0.0,
                delay: grid.min_delay(),
                estimator: cfg.estimator.kind(),
            },
            significance: None,
        });
    }
    let pair_seed = derive_seed(seed, pair_stream(set.name(i), set.name(j)));
    let estimator = cfg.estimator.instantiate(set, derive_seed(pair_seed, 0));
    let source = set.series_slice(i);
    let target = set.series_slice(j);
    let estimate = scan_delays(source, target, &cfg.embedding, grid, &estimator)?;
    let significance = test_edge(
        source,
        target,
        &cfg.embedding,
        estimate.delay,
        cfg.n_surrogates,
        &estimator,
        derive_seed(pair_seed, 1),
    )?;
    Ok(PairScan {
        source: i,
        target: j,
        estimate,
        significance: Some(significance),
    })
}

fn raw_edges(scans: &[PairScan]) -> Vec<Edge> {
    scans
        .iter()
        .filter_map(|s| {
            let sig = s.significance.as_ref()?;
            let weight = s.estimate.value.max(0.0);
            (sig.significant && weight > 0.0).then_some(Edge {
                source: s.source,
                target: s.target,
                weight,
                delay: s.estimate.delay,
            })
        })
        .collect()
}

fn net_edges(
    set: &TimeSeriesSet,
    cfg: &NetworkConfig,
    seed: u64,
    scans: &[PairScan],
) -> Result<Vec<Edge>> {
    let n = set.n_series();
    let find = |i: usize, j: usize| scans.iter().find(|s| s.source == i && s.target == j);
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let fwd = find(i, j).expect("all ordered pairs scanned");
            let rev = find(j, i).expect("all ordered pairs scanned");
            // dominant direction; exact ties resolve to (i, j)
            let (dom, other) = if fwd.estimate.value >= rev.estimate.value {
                (fwd, rev)
            } else {
                (rev, fwd)
            };
            let significant = dom
                .significance
                .as_ref()
                .map(|s| s.significant)
                .unwrap_or(false);
            if significant {
                candidates.push((dom.source, dom.target, other.source, dom.estimate));
            }
        }
    }
    // TE of the losing direction evaluated at the winner's delay
    let edges: Vec<Option<Edge>> = candidates
        .par_iter()
        .map(|&(src, tgt, _, estimate)| -> Result<Option<Edge>> {
            let pair_seed = derive_seed(seed, pair_stream(set.name(tgt), set.name(src)));
            let estimator = cfg.estimator.instantiate(set, derive_seed(pair_seed, 0));
            let reverse = estimator.estimate(
                set.series_slice(tgt),
                set.series_slice(src),
                &cfg.embedding,
                estimate.delay,
            )?;
            let delta = estimate.value - reverse;
            Ok((delta > 0.0).then_some(Edge {
                source: src,
                target: tgt,
                weight: delta,
                delay: estimate.delay,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(edges.into_iter().flatten().collect())
}
