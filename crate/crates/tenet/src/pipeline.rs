//! Rolling-window orchestration: standardize each window, reconstruct
//! its influence graph, rank its sources, and aggregate detection
//! counts, importance trajectories and tracked couplings across
//! windows.
//!
//! Per-window seeds are derived deterministically from the master seed
//! and the window index, and windows are processed independently, so a
//! report is reproducible regardless of execution order or worker
//! count.

use std::path::Path;
use std::time::{Instant, SystemTime};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{build_graph_detailed, InfluenceGraph, NetworkConfig, PairScan};
use crate::ranking::{rank_sources, RankVector, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::seeding::derive_seed;
use crate::timeseries::{TimeSeriesSet, WindowSpec};

/// Full analysis configuration: network reconstruction settings plus
/// ranking, standardization and tracking options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub network: NetworkConfig,
    /// Teleportation parameter for the source ranking.
    pub gamma: f64,
    /// Z-score each window before analysis (default on).
    pub standardize: bool,
    /// Ordered (source, target) name pairs whose scanned TE and delay
    /// are recorded per window whether or not they pass significance.
    pub tracked: Vec<(String, String)>,
    /// Cap on the number of windows analyzed.
    pub max_windows: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            network: NetworkConfig::default(),
            gamma: crate::ranking::DEFAULT_GAMMA,
            standardize: true,
            tracked: Vec::new(),
            max_windows: None,
        }
    }
}

/// One analyzed window.
#[derive(Debug, Clone)]
pub struct WindowResult {
    /// Sample offset of the window start in the input.
    pub offset: usize,
    pub graph: InfluenceGraph,
    pub ranks: RankVector,
}

/// Scanned (TE bits, delay samples) per window for one tracked pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedTrajectory {
    pub source: String,
    pub target: String,
    pub points: Vec<(f64, usize)>,
}

/// Reproducibility record written as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: AnalysisConfig,
    pub window: Option<WindowSpec>,
    pub seed: u64,
    pub n_windows: usize,
    pub version: String,
    pub started_unix_secs: u64,
    pub wall_time_secs: f64,
    /// Constant-series flags and other per-window notices.
    pub warnings: Vec<String>,
}

/// Everything a rolling run produces.
#[derive(Debug, Clone)]
pub struct RollingReport {
    pub names: Vec<String>,
    pub windows: Vec<WindowResult>,
    /// Entry (i, j): number of windows whose graph contains edge i -> j.
    pub detection_count: Array2<u32>,
    /// Per window, the sum-normalized importance scores (node order).
    pub importance_traj: Vec<Vec<f64>>,
    pub coupling_traj: Vec<TrackedTrajectory>,
    pub manifest: RunManifest,
}

/// Analyze one window with an explicit per-window seed: standardize (if
/// configured), reconstruct the graph, rank sources. Returns the graph,
/// ranks, the full pair-scan table, and the names of constant series.
pub fn analyze_window(
    window: &TimeSeriesSet,
    cfg: &AnalysisConfig,
    window_seed: u64,
) -> Result<(InfluenceGraph, RankVector, Vec<PairScan>, Vec<String>)> {
    let (working, constant) = if cfg.standardize {
        let std = window.standardize();
        (std.set, std.constant_series)
    } else {
        (window.clone(), Vec::new())
    };
    let (graph, scans) = build_graph_detailed(&working, &cfg.network, window_seed)?;
    let ranks = rank_sources(&graph.adjacency(), cfg.gamma, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok((graph, ranks, scans, constant))
}

/// Analyze the whole set as a single window.
pub fn analyze(set: &TimeSeriesSet, cfg: &AnalysisConfig, seed: u64) -> Result<RollingReport> {
    assemble(set, None, vec![(0usize, set.clone())], cfg, seed)
}

/// Rolling-window analysis over adjacent or overlapping slices.
pub fn run_rolling(
    set: &TimeSeriesSet,
    spec: &WindowSpec,
    cfg: &AnalysisConfig,
    seed: u64,
) -> Result<RollingReport> {
    let mut windows: Vec<(usize, TimeSeriesSet)> = set
        .slice_windows(spec)?
        .into_iter()
        .enumerate()
        .map(|(w, win)| (w * spec.step(), win))
        .collect();
    if let Some(cap) = cfg.max_windows {
        windows.truncate(cap);
    }
    if windows.is_empty() {
        return Err(Error::invalid("no windows to analyze"));
    }
    assemble(set, Some(*spec), windows, cfg, seed)
}

fn assemble(
    set: &TimeSeriesSet,
    spec: Option<WindowSpec>,
    windows: Vec<(usize, TimeSeriesSet)>,
    cfg: &AnalysisConfig,
    seed: u64,
) -> Result<RollingReport> {
    let start = Instant::now();
    let started_unix_secs = SystemTime::now()
        .duration_since(SystemTime::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let n = set.n_series();

    // resolve tracked pairs up front so typos fail fast
    let tracked_idx: Vec<(usize, usize)> = cfg
        .tracked
        .iter()
        .map(|(s, t)| {
            let si = set
                .index_of(s)
                .ok_or_else(|| Error::invalid(format!("tracked series '{s}' not found")))?;
            let ti = set
                .index_of(t)
                .ok_or_else(|| Error::invalid(format!("tracked series '{t}' not found")))?;
            Ok((si, ti))
        })
        .collect::<Result<Vec<_>>>()?;

    let results: Vec<(InfluenceGraph, RankVector, Vec<PairScan>, Vec<String>)> = windows
        .par_iter()
        .enumerate()
        .map(|(w, (_, window))| analyze_window(window, cfg, derive_seed(seed, w as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut detection_count = Array2::zeros((n, n));
    let mut importance_traj = Vec::with_capacity(results.len());
    let mut coupling_points: Vec<Vec<(f64, usize)>> = vec![Vec::new(); tracked_idx.len()];
    let mut warnings = Vec::new();
    let mut out_windows = Vec::with_capacity(results.len());

    for (w, ((offset, _), (graph, ranks, scans, constant))) in
        windows.iter().zip(results).enumerate()
    {
        for e in graph.edges() {
            detection_count[(e.source, e.target)] += 1;
        }
        importance_traj.push(ranks.scores().to_vec());
        for (slot, &(si, ti)) in coupling_points.iter_mut().zip(&tracked_idx) {
            let scan = scans
                .iter()
                .find(|s| s.source == si && s.target == ti)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "tracked pair {} -> {} is not scanned in {} mode",
                        set.name(si),
                        set.name(ti),
                        cfg.network.mode
                    ))
                })?;
            slot.push((scan.estimate.value, scan.estimate.delay));
        }
        if !constant.is_empty() {
            warnings.push(format!(
                "window {w}: constant series zeroed: {}",
                constant.join(", ")
            ));
        }
        out_windows.push(WindowResult {
            offset: *offset,
            graph,
            ranks,
        });
    }

    let coupling_traj = tracked_idx
        .iter()
        .zip(coupling_points)
        .map(|(&(si, ti), points)| TrackedTrajectory {
            source: set.name(si).to_string(),
            target: set.name(ti).to_string(),
            points,
        })
        .collect();

    let n_windows = out_windows.len();
    Ok(RollingReport {
        names: set.names().to_vec(),
        windows: out_windows,
        detection_count,
        importance_traj,
        coupling_traj,
        manifest: RunManifest {
            config: cfg.clone(),
            window: spec,
            seed,
            n_windows,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_secs,
            wall_time_secs: start.elapsed().as_secs_f64(),
            warnings,
        },
    })
}

impl RollingReport {
    /// Detection count of a named edge.
    pub fn detections(&self, source: &str, target: &str) -> Option<u32> {
        let s = self.names.iter().position(|n| n == source)?;
        let t = self.names.iter().position(|n| n == target)?;
        Some(self.detection_count[(s, t)])
    }

    fn detection_csv(&self) -> String {
        let mut out = format!("source,{}\n", self.names.join(","));
        for (i, name) in self.names.iter().enumerate() {
            out.push_str(name);
            for j in 0..self.names.len() {
                out.push_str(&format!(",{}", self.detection_count[(i, j)]));
            }
            out.push('\n');
        }
        out
    }

    fn importance_csv(&self) -> String {
        let mut out = format!("window,{}\n", self.names.join(","));
        for (w, scores) in self.importance_traj.iter().enumerate() {
            out.push_str(&w.to_string());
            for s in scores {
                out.push_str(&format!(",{s}"));
            }
            out.push('\n');
        }
        out
    }

    fn tracked_csv(&self) -> String {
        let mut out = String::from("window,source,target,te_bits,delay_samples\n");
        for traj in &self.coupling_traj {
            for (w, (te, delay)) in traj.points.iter().enumerate() {
                out.push_str(&format!(
                    "{w},{},{},{te},{delay}\n",
                    traj.source, traj.target
                ));
            }
        }
        out
    }
}

/// Write all report artifacts into `out_dir`: per window `edges_{w}.csv`,
/// `rank_{w}.csv` and `graph_{w}.dot`, plus `detection_count.csv`,
/// `importance_traj.csv` and `manifest.json` (and `tracked_te.csv` when
/// pairs are tracked). An empty report writes only the manifest.
pub fn emit_outputs(report: &RollingReport, out_dir: impl AsRef<Path>) -> Result<()> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let write = |name: String, contents: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|source| Error::Io { path, source })
    };

    for (w, window) in report.windows.iter().enumerate() {
        write(format!("edges_{w}.csv"), window.graph.to_edge_csv_string())?;
        write(
            format!("rank_{w}.csv"),
            window.ranks.to_csv_string(&report.names),
        )?;
        write(
            format!("graph_{w}.dot"),
            window.graph.to_dot(Some(&window.ranks)),
        )?;
    }
    if !report.windows.is_empty() {
        write("detection_count.csv".into(), report.detection_csv())?;
        write("importance_traj.csv".into(), report.importance_csv())?;
        if !report.coupling_traj.is_empty() {
            write("tracked_te.csv".into(), report.tracked_csv())?;
        }
    }
    let manifest = serde_json::to_string_pretty(&report.manifest)
        .map_err(|e| Error::invalid(format!("manifest serialization failed: {e}")))?;
    write("manifest.json".into(), manifest + "\n")?;
    Ok(())
}
