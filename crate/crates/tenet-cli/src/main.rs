//! `tenet` — transfer-entropy network reconstruction and source ranking
//! from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use tenet::estimators::DelayGrid;
use tenet::generators::{
    gen_cascade, gen_lorenz_pair, gen_var, CascadeConfig, CascadeEdge, LorenzPairConfig, VarConfig,
};
use tenet::network::{EstimatorChoice, GraphMode, InfluenceGraph, NetworkConfig};
use tenet::pipeline::{analyze, emit_outputs, run_rolling, AnalysisConfig};
use tenet::ranking::{rank_sources, DEFAULT_MAX_ITER, DEFAULT_TOL};
use tenet::timeseries::{TimeSeriesSet, WindowSpec};
use tenet::Error;

#[derive(Parser)]
#[command(
    name = "tenet",
    version,
    about = "Reconstruct information-transfer networks from time series and rank their causal sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic ground-truth data
    #[command(subcommand)]
    Gen(GenCommand),
    /// Analyze the input as a single window
    Analyze(AnalyzeArgs),
    /// Rolling-window analysis
    Roll(RollArgs),
    /// Rank sources of an existing edge CSV
    Rank(RankArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Two bidirectionally delay-coupled Lorenz systems
    Lorenz(GenLorenzArgs),
    /// Linear Gaussian VAR process
    Var(GenVarArgs),
    /// Binary fault cascade over a tree topology
    Cascade(GenCascadeArgs),
}

#[derive(Args)]
struct GenLorenzArgs {
    /// Output CSV path (a .manifest.json is written alongside)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 150_000)]
    samples: usize,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Drop this many leading samples (the transient) from the output
    #[arg(long, default_value_t = 0)]
    discard: usize,
    #[arg(long, default_value_t = 0.05)]
    coupling_12: f64,
    #[arg(long, default_value_t = 0.1)]
    coupling_21: f64,
    /// Coupling delay system 1 -> 2, seconds
    #[arg(long, default_value_t = 5.0)]
    delay_12: f64,
    /// Coupling delay system 2 -> 1, seconds
    #[arg(long, default_value_t = 3.0)]
    delay_21: f64,
    #[arg(long, default_value_t = 25.0)]
    rayleigh_1: f64,
    #[arg(long, default_value_t = 28.0)]
    rayleigh_2: f64,
}

#[derive(Args)]
struct GenVarArgs {
    #[arg(long)]
    out: PathBuf,
    /// Lag matrices as JSON (e.g. "[[[0.5,0],[0.5,0.5]]]"), or @file
    #[arg(long)]
    coeffs: String,
    #[arg(long, default_value_t = 1.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenCascadeArgs {
    #[arg(long)]
    out: PathBuf,
    /// Topology JSON file: {"nodes": [...], "edges": [{"parent": ...,
    /// "child": ..., "delay": n, "noise": p}, ...]}
    #[arg(long)]
    topology: PathBuf,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    /// Bernoulli rate of root activity
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AnalysisArgs {
    /// Input CSV (header row, one column per variable)
    #[arg(long)]
    input: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Ksg)]
    estimator: EstimatorArg,
    /// Bin count for the binned estimator (default: 2 for binary data, 6 otherwise)
    #[arg(long)]
    bins: Option<usize>,
    /// Neighbor count for the KSG estimator
    #[arg(long, default_value_t = 4)]
    knn: usize,
    /// Comma-separated delay grid in samples (default: 1,25,50,...,600)
    #[arg(long, value_delimiter = ',')]
    delays: Option<Vec<usize>>,
    #[arg(long, default_value_t = 19)]
    surrogates: usize,
    /// Teleportation parameter of the ranking
    #[arg(long, default_value_t = 0.85)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Raw)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip per-window standardization
    #[arg(long)]
    no_standardize: bool,
    /// Track the scanned TE of an ordered pair "SOURCE:TARGET" per
    /// window (repeatable)
    #[arg(long)]
    track: Vec<String>,
    /// Seconds between samples (recorded in the manifest)
    #[arg(long, default_value_t = 1.0)]
    sample_interval: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    analysis: AnalysisArgs,
    /// Truncate the input to its first WINDOW samples
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args)]
struct RollArgs {
    #[command(flatten)]
    analysis: AnalysisArgs,
    /// Window width in samples
    #[arg(long)]
    window: usize,
    /// Step between window starts (default: adjacent, step = window)
    #[arg(long)]
    step: Option<usize>,
    /// Analyze at most this many windows
    #[arg(long)]
    max_windows: Option<usize>,
}

#[derive(Args)]
struct RankArgs {
    /// Edge CSV (source,target,weight_bits,delay_samples,significant)
    #[arg(long)]
    input: PathBuf,
    /// Output rank CSV path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.85)]
    gamma: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Binned,
    Ksg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Raw,
    Net,
}

impl AnalysisArgs {
    fn config(&self) -> Result<AnalysisConfig, Error> {
        let delays = match &self.delays {
            Some(list) => DelayGrid::new(list.clone())?,
            None => DelayGrid::default_coarse(),
        };
        let estimator = match self.estimator {
            EstimatorArg::Binned => EstimatorChoice::Binned { bins: self.bins },
            EstimatorArg::Ksg => EstimatorChoice::Ksg { neighbors: self.knn },
        };
        let tracked = self
            .track
            .iter()
            .map(|spec| {
                spec.split_once(':')
                    .map(|(s, t)| (s.to_string(), t.to_string()))
                    .ok_or_else(|| {
                        Error::invalid(format!("--track expects SOURCE:TARGET, got '{spec}'"))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnalysisConfig {
            network: NetworkConfig {
                delays,
                estimator,
                n_surrogates: self.surrogates,
                mode: match self.mode {
                    ModeArg::Raw => GraphMode::RawTe,
                    ModeArg::Net => GraphMode::NetTe,
                },
                ..NetworkConfig::default()
            },
            gamma: self.gamma,
            standardize: !self.no_standardize,
            tracked,
            max_windows: None,
        })
    }
}

/// Topology file for `gen cascade`.
#[derive(Deserialize)]
struct TopologyFile {
    nodes: Vec<String>,
    edges: Vec<CascadeEdge>,
}

fn write_set_with_manifest(
    set: &TimeSeriesSet,
    out: &Path,
    config_json: serde_json::Value,
) -> Result<(), Error> {
    set.write_csv(out)?;
    let manifest_path = out.with_extension("manifest.json");
    let manifest = serde_json::json!({
        "config": config_json,
        "n_series": set.n_series(),
        "n_samples": set.len(),
        "sample_interval": set.sample_interval(),
    });
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest is serializable") + "\n",
    )
    .map_err(|source| Error::Io {
        path: manifest_path,
        source,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(GenCommand::Lorenz(args)) => {
            let cfg = LorenzPairConfig {
                dt: args.dt,
                n_samples: args.samples + args.discard,
                coupling_12: args.coupling_12,
                coupling_21: args.coupling_21,
                delay_12: args.delay_12,
                delay_21: args.delay_21,
                rayleigh_1: args.rayleigh_1,
                rayleigh_2: args.rayleigh_2,
                ..LorenzPairConfig::default()
            };
            let full = gen_lorenz_pair(&cfg)?;
            let set = if args.discard > 0 {
                let data = full
                    .data()
                    .slice(ndarray::s![.., args.discard..])
                    .to_owned();
                TimeSeriesSet::new(full.names().to_vec(), data, full.sample_interval())?
            } else {
                full
            };
            let mut config_json =
                serde_json::to_value(&cfg).expect("config is serializable");
            config_json["discard"] = args.discard.into();
            config_json["generator"] = "lorenz_pair".into();
            write_set_with_manifest(&set, &args.out, config_json)
        }
        Command::Gen(GenCommand::Var(args)) => {
            let json = if let Some(path) = args.coeffs.strip_prefix('@') {
                std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: PathBuf::from(path),
                    source,
                })?
            } else {
                args.coeffs.clone()
            };
            let raw: Vec<Vec<Vec<f64>>> = serde_json::from_str(&json)
                .map_err(|e| Error::invalid(format!("--coeffs is not valid JSON: {e}")))?;
            let coefficients = raw
                .into_iter()
                .map(|m| {
                    let rows = m.len();
                    let cols = m.first().map_or(0, |r| r.len());
                    if m.iter().any(|r| r.len() != cols) {
                        return Err(Error::invalid("ragged coefficient matrix"));
                    }
                    ndarray::Array2::from_shape_vec(
                        (rows, cols),
                        m.into_iter().flatten().collect(),
                    )
                    .map_err(|e| Error::invalid(format!("bad coefficient matrix: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = VarConfig {
                coefficients,
                noise_sd: args.noise_sd,
                n_samples: args.samples,
                seed: args.seed,
            };
            let set = gen_var(&cfg)?;
            let mut config_json = serde_json::to_value(&cfg).expect("config is serializable");
            config_json["generator"] = "var".into();
            write_set_with_manifest(&set, &args.out, config_json)
        }
        Command::Gen(GenCommand::Cascade(args)) => {
            let text = std::fs::read_to_string(&args.topology).map_err(|source| Error::Io {
                path: args.topology.clone(),
                source,
            })?;
            let topology: TopologyFile = serde_json::from_str(&text)
                .map_err(|e| Error::invalid(format!("bad topology file: {e}")))?;
            let cfg = CascadeConfig {
                nodes: topology.nodes,
                edges: topology.edges,
                root_rate: args.rate,
                n_samples: args.samples,
                seed: args.seed,
            };
            let set = gen_cascade(&cfg)?;
            let mut config_json = serde_json::to_value(&cfg).expect("config is serializable");
            config_json["generator"] = "cascade".into();
            write_set_with_manifest(&set, &args.out, config_json)
        }
        Command::Analyze(args) => {
            let cfg = args.analysis.config()?;
            let set = TimeSeriesSet::load_csv(&args.analysis.input, args.analysis.sample_interval)?;
            let set = match args.window {
                Some(w) if w < set.len() => {
                    let data = set.data().slice(ndarray::s![.., ..w]).to_owned();
                    TimeSeriesSet::new(set.names().to_vec(), data, set.sample_interval())?
                }
                _ => set,
            };
            let report = analyze(&set, &cfg, args.analysis.seed)?;
            emit_outputs(&report, &args.analysis.out)
        }
        Command::Roll(args) => {
            let mut cfg = args.analysis.config()?;
            cfg.max_windows = args.max_windows;
            let spec = WindowSpec::new(args.window, args.step.unwrap_or(args.window))?;
            let set = TimeSeriesSet::load_csv(&args.analysis.input, args.analysis.sample_interval)?;
            let report = run_rolling(&set, &spec, &cfg, args.analysis.seed)?;
            emit_outputs(&report, &args.analysis.out)
        }
        Command::Rank(args) => {
            let graph = InfluenceGraph::load_edge_csv(&args.input)?;
            if graph.nodes().is_empty() {
                return Err(Error::invalid("edge CSV contains no significant edges"));
            }
            let ranks = rank_sources(&graph.adjacency(), args.gamma, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
            let csv = ranks.to_csv_string(graph.nodes());
            std::fs::write(&args.out, csv).map_err(|source| Error::Io {
                path: args.out.clone(),
                source,
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
