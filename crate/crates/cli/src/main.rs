//! Command-line entry point: reproducible experiment runs over the solvers
//! and the trip pipeline. Every command echoes its resolved configuration
//! and the checksums of its artifacts into a manifest, so identical seeds
//! give byte-identical runs.
// `!(x > 0.0)`-style checks are NaN-rejecting on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use ridelasso_core::graph::{build_knn_graph, distance_matrix, spatial_components};
use ridelasso_core::lasso::{lambda_sweep, AdmmConfig};
use ridelasso_core::network::{
    predict_fares, predictions_table, regularization_path, solution_table, NetworkConfig,
    NetworkProblem, NetworkSolution,
};
use ridelasso_core::numerics::Vector;
use ridelasso_core::table::Table;
use ridelasso_core::trip::{
    emit_stats, featurize, generate_synthetic_lasso, hourly_counts, load_trips, split_train_test,
    Featurizer, NodeProblem, SchemaMap, StatKind, TripRecord,
};

#[derive(Parser)]
#[command(
    name = "ridelasso",
    about = "ADMM Lasso and Network Lasso over trip-similarity graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic sparse regression problem and sweep the penalty.
    SynthLasso(SynthLassoArgs),
    /// Full run: load trips, featurize, split, build the graph, trace the
    /// regularization path and export everything.
    Pipeline(PipelineArgs),
    /// Emit the descriptive-statistics tables for a trips file.
    Stats(StatsArgs),
    /// Build and export the trip-similarity graph only.
    Graph(GraphArgs),
    /// Predict fares for a fresh trips file from a saved pipeline run.
    Predict(PredictArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SynthLassoArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Seed for the problem generator (mandatory: no silent entropy).
    #[arg(long)]
    seed: Option<u64>,
    /// Observations.
    #[arg(long)]
    n: Option<usize>,
    /// Features.
    #[arg(long)]
    d: Option<usize>,
    /// Expected nonzero fraction of the design matrix.
    #[arg(long)]
    density: Option<f64>,
    /// Gaussian noise level on the response.
    #[arg(long)]
    noise: Option<f64>,
    /// Comma-separated penalty grid.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// `maxfrac` scales the grid by the critical penalty; `abs` uses it as is.
    #[arg(long)]
    lambda_mode: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    eps_abs: Option<f64>,
    #[arg(long)]
    eps_rel: Option<f64>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Trips CSV path.
    #[arg(long)]
    trips: Option<PathBuf>,
    /// Schema config mapping canonical columns to CSV headers.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Seed for the train/test split (mandatory).
    #[arg(long)]
    seed: Option<u64>,
    /// Neighbors per node in the trip graph.
    #[arg(long)]
    k: Option<usize>,
    /// Penalty grid; omit for an automatic data-driven grid.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Per-node ridge term.
    #[arg(long)]
    mu: Option<f64>,
    /// Consensus tolerance for cluster extraction.
    #[arg(long)]
    eps: Option<f64>,
    /// Training node count.
    #[arg(long)]
    train: Option<usize>,
    /// Test node count.
    #[arg(long)]
    test: Option<usize>,
    /// Similarity kernel scale in kilometers.
    #[arg(long)]
    weight_scale_km: Option<f64>,
    /// Neighbors voting on a test node's cluster.
    #[arg(long)]
    k_assign: Option<usize>,
    /// Length cutoff for the spatial-components export.
    #[arg(long)]
    cut_km: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    eps_abs: Option<f64>,
    #[arg(long)]
    eps_rel: Option<f64>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    trips: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    trips: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    weight_scale_km: Option<f64>,
    #[arg(long)]
    cut_km: Option<f64>,
    /// Also export the full pairwise distance matrix (quadratic in nodes).
    #[arg(long)]
    distance_matrix: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Directory of a previous `pipeline` run holding the saved solution.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Trips CSV with the requests to predict.
    #[arg(long)]
    trips: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    k_assign: Option<usize>,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::SynthLasso(args) => cmd_synth_lasso(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Predict(args) => cmd_predict(args),
    };
    match outcome {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::ExitCode::FAILURE
        }
    }
}

// ---------------------------------------------------------------------------
// Config-file merging: flags win, then file values, then defaults.

struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow!("config line {} is not key=value", lineno + 1))?;
                file.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> anyhow::Result<T> {
        self.opt(flag, key).map(|v| v.unwrap_or(default))
    }

    fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> anyhow::Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| anyhow!("config value for `{key}` is not valid: `{raw}`")),
            None => Ok(None),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> anyhow::Result<T> {
        self.opt(flag, key)?
            .ok_or_else(|| anyhow!("missing required parameter `{key}` (flag --{key})"))
    }

    fn lambdas(&self, flag: Option<Vec<f64>>, key: &str) -> anyhow::Result<Option<Vec<f64>>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(raw) => raw
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| anyhow!("config value for `{key}` is not valid: `{raw}`"))
                })
                .collect::<anyhow::Result<Vec<f64>>>()
                .map(Some),
            None => Ok(None),
        }
    }
}

// ---------------------------------------------------------------------------
// Manifest: resolved parameters plus an FNV-1a checksum per artifact.

struct RunWriter {
    out_dir: PathBuf,
    params: BTreeMap<String, String>,
    checksums: BTreeMap<String, String>,
}

impl RunWriter {
    fn new(command: &str, out_dir: PathBuf) -> anyhow::Result<Self> {
        std::fs::create_dir_all(&out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        let mut params = BTreeMap::new();
        params.insert("command".to_string(), command.to_string());
        Ok(Self {
            out_dir,
            params,
            checksums: BTreeMap::new(),
        })
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    fn write_table(&mut self, name: &str, table: &Table) -> anyhow::Result<()> {
        let path = self.out_dir.join(name);
        table
            .write_csv(&path)
            .with_context(|| format!("writing {name}"))?;
        let bytes = std::fs::read(&path)?;
        self.checksums.insert(name.to_string(), fnv1a_hex(&bytes));
        Ok(())
    }

    fn finish(&self) -> anyhow::Result<()> {
        let mut manifest = String::new();
        for (key, value) in &self.params {
            manifest.push_str(&format!("{key}={value}\n"));
        }
        for (name, checksum) in &self.checksums {
            manifest.push_str(&format!("artifact={name}:{checksum}\n"));
        }
        std::fs::write(self.out_dir.join("manifest.txt"), manifest)?;
        Ok(())
    }
}

fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

// ---------------------------------------------------------------------------
// Shared pieces.

fn load_schema(path: Option<&Path>) -> anyhow::Result<SchemaMap> {
    match path {
        Some(path) => Ok(SchemaMap::from_config_file(path)?),
        None => Ok(SchemaMap::default()),
    }
}

fn load_records(
    trips: &Path,
    schema: Option<&Path>,
    writer: &mut RunWriter,
) -> anyhow::Result<Vec<TripRecord>> {
    let schema = load_schema(schema)?;
    let (records, report) = load_trips(trips, &schema)?;
    writer.param("trips", trips.display());
    writer.param("rows_loaded", report.loaded);
    writer.param("rows_dropped", report.dropped);
    for (reason, count) in &report.drop_reasons {
        writer.param(&format!("dropped[{reason}]"), count);
    }
    if records.is_empty() {
        bail!("no valid records in {}", trips.display());
    }
    Ok(records)
}

fn stat_tables(records: &[TripRecord], writer: &mut RunWriter) -> anyhow::Result<()> {
    for kind in StatKind::ALL {
        let table = emit_stats(records, kind)?;
        writer.write_table(&format!("stats_{}.csv", kind.name()), &table)?;
    }
    Ok(())
}

/// Closed-form per-node ridge solutions `a·b / (μ + ‖a‖²)` for one
/// observation per node; used to size the automatic penalty grid.
fn decoupled_models(nodes: &[NodeProblem], mu: f64) -> Vec<Vector> {
    nodes
        .iter()
        .map(|n| &n.features * (n.response / (mu + n.features.norm_squared())))
        .collect()
}

/// λ beyond which every edge merges in a single proximal step, estimated
/// from the decoupled solutions.
fn forcing_level(
    nodes: &[NodeProblem],
    graph: &ridelasso_core::graph::TripGraph,
    mu: f64,
    rho: f64,
) -> f64 {
    let models = decoupled_models(nodes, mu);
    graph
        .edges()
        .iter()
        .map(|e| rho * (&models[e.j] - &models[e.k]).norm() / (2.0 * e.weight))
        .fold(0.0, f64::max)
}

fn auto_lambda_grid(force: f64) -> Vec<f64> {
    if !(force > 0.0) {
        return vec![0.0, 0.1, 1.0, 10.0];
    }
    // Zero plus nine log-spaced points from deep in the decoupled regime to
    // past the full forcing level.
    let lo = 1e-5 * force;
    let hi = 10.0 * force;
    let mut grid = vec![0.0];
    for i in 0..9 {
        let t = i as f64 / 8.0;
        grid.push(lo * (hi / lo).powf(t));
    }
    grid
}

// ---------------------------------------------------------------------------
// Commands.

fn cmd_synth_lasso(args: SynthLassoArgs) -> anyhow::Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    let out = settings.require(args.common.out, "out")?;
    let seed = settings.require(args.seed, "seed")?;
    let n = settings.get(args.n, "n", 150)?;
    let d = settings.get(args.d, "d", 500)?;
    let density = settings.get(args.density, "density", 0.02)?;
    let noise = settings.get(args.noise, "noise", 0.1)?;
    let lambda_mode = settings.get(args.lambda_mode, "lambda_mode", "maxfrac".to_string())?;
    let grid = settings
        .lambdas(args.lambdas, "lambdas")?
        .unwrap_or_else(|| vec![1e-4, 1e-3, 1e-2]);
    let config = AdmmConfig {
        rho: settings.get(args.rho, "rho", 1.2)?,
        alpha: settings.get(args.alpha, "alpha", 1.8)?,
        max_iters: settings.get(args.max_iters, "max_iters", 1000)?,
        eps_abs: settings.get(args.eps_abs, "eps_abs", 1e-4)?,
        eps_rel: settings.get(args.eps_rel, "eps_rel", 1e-3)?,
    };

    let mut writer = RunWriter::new("synth-lasso", out)?;
    let (problem, _truth) = generate_synthetic_lasso(n, d, density, noise, seed)?;
    let lambdas: Vec<f64> = match lambda_mode.as_str() {
        "maxfrac" => {
            let lmax = problem.lambda_max();
            grid.iter().map(|f| f * lmax).collect()
        }
        "abs" => grid.clone(),
        other => bail!("lambda_mode must be `maxfrac` or `abs`, got `{other}`"),
    };

    writer.param("seed", seed);
    writer.param("n", n);
    writer.param("d", d);
    writer.param("density", density);
    writer.param("noise", noise);
    writer.param("lambda_mode", &lambda_mode);
    writer.param("rho", config.rho);
    writer.param("alpha", config.alpha);
    writer.param("max_iters", config.max_iters);
    writer.param("eps_abs", config.eps_abs);
    writer.param("eps_rel", config.eps_rel);
    writer.param(
        "lambdas",
        lambdas
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    let solutions = lambda_sweep(&problem, &config, &lambdas)?;
    let mut counts = Table::new(&["lambda", "nonzero_count", "iterations", "converged"]);
    for (i, (solution, lambda)) in solutions.iter().zip(&lambdas).enumerate() {
        let mut history = Table::new(&["iteration", "objective", "primal_residual", "dual_residual"]);
        for it in 0..solution.iterations {
            history.push_row(&[
                (it + 1).to_string(),
                solution.objective_history[it].to_string(),
                solution.primal_residuals[it].to_string(),
                solution.dual_residuals[it].to_string(),
            ]);
        }
        writer.write_table(&format!("lasso_objective_{i}.csv"), &history)?;
        counts.push_row(&[
            lambda.to_string(),
            solution.nonzero_count.to_string(),
            solution.iterations.to_string(),
            solution.converged.to_string(),
        ]);
        if !solution.converged {
            eprintln!("warning: lambda {lambda} did not converge within {} iterations", config.max_iters);
        }
    }
    writer.write_table("lasso_nonzeros.csv", &counts)?;
    writer.finish()
}

fn cmd_pipeline(args: PipelineArgs) -> anyhow::Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    let out = settings.require(args.common.out, "out")?;
    let trips: PathBuf = settings.require(args.trips, "trips")?;
    let schema = settings.opt(args.schema, "schema")?;
    let seed = settings.require(args.seed, "seed")?;
    let k = settings.get(args.k, "k", 5)?;
    let mu = settings.get(args.mu, "mu", 1e-3)?;
    let eps = settings.get(args.eps, "eps", 1e-3)?;
    let weight_scale_km = settings.get(args.weight_scale_km, "weight_scale_km", 2.0)?;
    let k_assign = settings.get(args.k_assign, "k_assign", 5)?;
    let cut_km = settings.get(args.cut_km, "cut_km", 2.0)?;
    let config = NetworkConfig {
        admm: AdmmConfig {
            rho: settings.get(args.rho, "rho", 1.2)?,
            alpha: settings.get(args.alpha, "alpha", 1.8)?,
            max_iters: settings.get(args.max_iters, "max_iters", 2000)?,
            eps_abs: settings.get(args.eps_abs, "eps_abs", 1e-6)?,
            eps_rel: settings.get(args.eps_rel, "eps_rel", 1e-6)?,
        },
        consensus_eps: eps,
    };

    let mut writer = RunWriter::new("pipeline", out)?;
    let records = load_records(&trips, schema.as_deref(), &mut writer)?;
    let train_count = settings.get(args.train, "train", (records.len() * 7) / 10)?;
    let test_count = settings.get(args.test, "test", records.len() / 5)?;

    stat_tables(&records, &mut writer)?;

    let (problems, featurizer) = featurize(&records)?;
    let weights = hourly_counts(&records);
    let split = split_train_test(&problems, train_count, test_count, Some(&weights), seed)?;

    let graph = build_knn_graph(&split.train, k, weight_scale_km)?;
    writer.write_table("graph_edges.csv", &graph.edge_table())?;
    let (_, components) = spatial_components(&graph, &split.train, cut_km)?;
    writer.write_table("components.csv", &components)?;

    let problem = NetworkProblem::new(split.train.clone(), graph.clone(), 0.0, mu)?;
    let lambdas = match settings.lambdas(args.lambdas, "lambdas")? {
        Some(grid) => grid,
        None => auto_lambda_grid(forcing_level(&split.train, &graph, mu, config.admm.rho)),
    };
    let path = regularization_path(&problem, &config, &lambdas, &split.test, k_assign)?;
    for entry in &path.entries {
        if !entry.solution.converged {
            eprintln!(
                "warning: lambda {} did not converge within {} iterations",
                entry.lambda, config.admm.max_iters
            );
        }
    }
    writer.write_table("path.csv", &path.to_table())?;

    let best = path.best_mse_index();
    let best_entry = &path.entries[best];
    writer.write_table(
        "solution_best.csv",
        &solution_table(&split.train, &best_entry.solution),
    )?;
    let prediction = predict_fares(&best_entry.solution, &split.train, &split.test, k_assign)?;
    writer.write_table("predictions_best.csv", &predictions_table(&prediction))?;

    // Saved model inputs for the standalone `predict` command.
    let mut train_table = Table::new(&["node_id", "pickup_lat", "pickup_lon"]);
    for node in &split.train {
        train_table.push_row(&[
            node.node_id.to_string(),
            node.pickup_lat.to_string(),
            node.pickup_lon.to_string(),
        ]);
    }
    writer.write_table("train_nodes.csv", &train_table)?;
    writer.write_table("scaler.csv", &featurizer.to_table())?;

    writer.param("seed", seed);
    writer.param("k", k);
    writer.param("mu", mu);
    writer.param("eps", eps);
    writer.param("weight_scale_km", weight_scale_km);
    writer.param("k_assign", k_assign);
    writer.param("cut_km", cut_km);
    writer.param("train", train_count);
    writer.param("test", test_count);
    writer.param("rho", config.admm.rho);
    writer.param("alpha", config.admm.alpha);
    writer.param("max_iters", config.admm.max_iters);
    writer.param("eps_abs", config.admm.eps_abs);
    writer.param("eps_rel", config.admm.eps_rel);
    writer.param("best_lambda", best_entry.lambda);
    writer.param("best_test_mse", best_entry.test_mse);
    writer.param(
        "lambdas",
        lambdas
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    writer.finish()
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    let out = settings.require(args.common.out, "out")?;
    let trips: PathBuf = settings.require(args.trips, "trips")?;
    let schema = settings.opt(args.schema, "schema")?;
    let mut writer = RunWriter::new("stats", out)?;
    let records = load_records(&trips, schema.as_deref(), &mut writer)?;
    stat_tables(&records, &mut writer)?;
    writer.finish()
}

fn cmd_graph(args: GraphArgs) -> anyhow::Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    let out = settings.require(args.common.out, "out")?;
    let trips: PathBuf = settings.require(args.trips, "trips")?;
    let schema = settings.opt(args.schema, "schema")?;
    let k = settings.get(args.k, "k", 5)?;
    let weight_scale_km = settings.get(args.weight_scale_km, "weight_scale_km", 2.0)?;
    let cut_km = settings.get(args.cut_km, "cut_km", 2.0)?;

    let mut writer = RunWriter::new("graph", out)?;
    let records = load_records(&trips, schema.as_deref(), &mut writer)?;
    let (problems, _) = featurize(&records)?;
    let graph = build_knn_graph(&problems, k, weight_scale_km)?;
    writer.param("k", k);
    writer.param("weight_scale_km", weight_scale_km);
    writer.param("cut_km", cut_km);
    writer.param("nodes", problems.len());
    writer.param("edges", graph.edge_count());
    writer.write_table("graph_edges.csv", &graph.edge_table())?;
    let (_, components) = spatial_components(&graph, &problems, cut_km)?;
    writer.write_table("components.csv", &components)?;
    if args.distance_matrix {
        writer.write_table("distance_matrix.csv", &distance_matrix(&problems)?)?;
    }
    writer.finish()
}

fn cmd_predict(args: PredictArgs) -> anyhow::Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    let out = settings.require(args.common.out, "out")?;
    let solution_dir: PathBuf = settings.require(args.solution, "solution")?;
    let trips: PathBuf = settings.require(args.trips, "trips")?;
    let schema = settings.opt(args.schema, "schema")?;
    let k_assign = settings.get(args.k_assign, "k_assign", 5)?;

    let mut writer = RunWriter::new("predict", out)?;
    writer.param("solution", solution_dir.display());
    writer.param("k_assign", k_assign);

    let solution_table = Table::read_csv(&solution_dir.join("solution_best.csv"))?;
    let train_table = Table::read_csv(&solution_dir.join("train_nodes.csv"))?;
    let featurizer = Featurizer::from_table(&Table::read_csv(&solution_dir.join("scaler.csv"))?)?;
    let (x, clusters, train_nodes) = read_saved_solution(&solution_table, &train_table)?;
    let solution = NetworkSolution {
        // Only the models and cluster labels feed prediction.
        x,
        clusters,
        consensus_fraction: 0.0,
        converged: true,
        iterations: 0,
    };

    let records = load_records(&trips, schema.as_deref(), &mut writer)?;
    let test_nodes = featurizer.transform(&records);
    let prediction = predict_fares(&solution, &train_nodes, &test_nodes, k_assign)?;
    writer.param("test_mse", prediction.mse);
    writer.write_table("predictions.csv", &predictions_table(&prediction))?;
    writer.finish()
}

fn read_saved_solution(
    solution: &Table,
    train: &Table,
) -> anyhow::Result<(Vec<Vector>, Vec<usize>, Vec<NodeProblem>)> {
    if solution.rows().len() != train.rows().len() {
        bail!("solution_best.csv and train_nodes.csv disagree on the node count");
    }
    let id_col = solution.column("node_id")?;
    let cluster_col = solution.column("cluster_id")?;
    let p = solution
        .headers()
        .iter()
        .filter(|h| h.starts_with("x_"))
        .count();
    let x0_col = solution.column("x_0")?;
    let t_id = train.column("node_id")?;
    let t_lat = train.column("pickup_lat")?;
    let t_lon = train.column("pickup_lon")?;

    let mut xs = Vec::with_capacity(solution.rows().len());
    let mut clusters = Vec::with_capacity(solution.rows().len());
    let mut nodes = Vec::with_capacity(solution.rows().len());
    for (srow, trow) in solution.rows().iter().zip(train.rows()) {
        if srow[id_col] != trow[t_id] {
            bail!("node id mismatch between saved solution and train nodes");
        }
        let node_id: usize = srow[id_col].parse().context("node_id")?;
        clusters.push(srow[cluster_col].parse().context("cluster_id")?);
        let mut x = Vector::zeros(p);
        for i in 0..p {
            x[i] = srow[x0_col + i].parse().context("model coefficient")?;
        }
        xs.push(x);
        nodes.push(NodeProblem::at_location(
            node_id,
            trow[t_lat].parse().context("pickup_lat")?,
            trow[t_lon].parse().context("pickup_lon")?,
        ));
    }
    Ok((xs, clusters, nodes))
}
