//! Regularization paths over increasing λ, and fare prediction for unseen
//! nodes by spatial cluster assignment.

use std::collections::BTreeMap;

use super::{solve_network_lasso_from, NetworkConfig, NetworkProblem, NetworkSolution,
    NetworkState};
use crate::error::{invalid_argument, Result};
use crate::graph::{haversine_km, GeoPoint};
use crate::numerics::Vector;
use crate::table::Table;
use crate::trip::NodeProblem;

/// One prediction row: the assigned cluster, predicted and actual responses.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub node_id: usize,
    pub cluster_id: usize,
    pub predicted: f64,
    pub actual: f64,
    pub squared_error: f64,
}

/// All test predictions plus their mean squared error.
#[derive(Debug, Clone)]
pub struct PredictionResult {
    pub rows: Vec<Prediction>,
    pub mse: f64,
}

/// Assigns each test node to the majority cluster among its `k_assign`
/// spatially nearest training nodes (ties go to the cluster with the
/// smallest summed distance), then predicts with the cluster representative:
/// the mean of the member models.
pub fn predict_fares(
    solution: &NetworkSolution,
    train_nodes: &[NodeProblem],
    test_nodes: &[NodeProblem],
    k_assign: usize,
) -> Result<PredictionResult> {
    if test_nodes.is_empty() {
        return invalid_argument("prediction needs a nonempty test set");
    }
    if k_assign == 0 {
        return invalid_argument("k_assign must be at least 1");
    }
    if solution.x.len() != train_nodes.len() {
        return invalid_argument("solution does not match the training node count");
    }
    let p = solution.x[0].len();
    if test_nodes.iter().any(|n| n.features.len() != p) {
        return invalid_argument("test features do not match the trained model dimension");
    }

    // Cluster representatives: mean of member vectors.
    let num_clusters = solution.clusters.iter().max().map_or(0, |m| m + 1);
    let mut representatives = vec![Vector::zeros(p); num_clusters];
    let mut member_counts = vec![0usize; num_clusters];
    for (xi, &cluster) in solution.x.iter().zip(&solution.clusters) {
        representatives[cluster] += xi;
        member_counts[cluster] += 1;
    }
    for (rep, &count) in representatives.iter_mut().zip(&member_counts) {
        *rep /= count as f64;
    }

    let k = k_assign.min(train_nodes.len());
    let mut rows = Vec::with_capacity(test_nodes.len());
    let mut total_sq = 0.0;
    for test in test_nodes {
        let here = GeoPoint {
            lat: test.pickup_lat,
            lon: test.pickup_lon,
        };
        let mut nearest: Vec<(f64, usize)> = train_nodes
            .iter()
            .enumerate()
            .map(|(idx, train)| {
                (
                    haversine_km(
                        here,
                        GeoPoint {
                            lat: train.pickup_lat,
                            lon: train.pickup_lon,
                        },
                    ),
                    idx,
                )
            })
            .collect();
        nearest.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        // Votes: (count, summed distance) per cluster among the k nearest.
        let mut votes: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
        for &(distance, idx) in nearest.iter().take(k) {
            let entry = votes.entry(solution.clusters[idx]).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += distance;
        }
        let (&cluster_id, _) = votes
            .iter()
            .min_by(|(ca, (na, da)), (cb, (nb, db))| {
                nb.cmp(na)
                    .then(da.partial_cmp(db).unwrap())
                    .then(ca.cmp(cb))
            })
            .expect("at least one vote");

        let predicted = representatives[cluster_id].dot(&test.features);
        let squared_error = (predicted - test.response).powi(2);
        total_sq += squared_error;
        rows.push(Prediction {
            node_id: test.node_id,
            cluster_id,
            predicted,
            actual: test.response,
            squared_error,
        });
    }
    let mse = total_sq / rows.len() as f64;
    Ok(PredictionResult { rows, mse })
}

/// Per-λ snapshot along a path.
#[derive(Debug, Clone)]
pub struct PathEntry {
    pub lambda: f64,
    pub solution: NetworkSolution,
    pub train_objective: f64,
    pub test_mse: f64,
    pub num_clusters: usize,
}

/// The whole regularization path, in λ order.
#[derive(Debug, Clone)]
pub struct PathResult {
    pub entries: Vec<PathEntry>,
}

impl PathResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Index of the entry with the smallest test MSE.
    pub fn best_mse_index(&self) -> usize {
        let mut best = 0;
        for (i, entry) in self.entries.iter().enumerate() {
            if entry.test_mse < self.entries[best].test_mse {
                best = i;
            }
        }
        best
    }

    /// Path export: `lambda,objective,consensus_fraction,num_clusters,test_mse`.
    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&[
            "lambda",
            "objective",
            "consensus_fraction",
            "num_clusters",
            "test_mse",
        ]);
        for entry in &self.entries {
            table.push_row(&[
                entry.lambda.to_string(),
                entry.train_objective.to_string(),
                entry.solution.consensus_fraction.to_string(),
                entry.num_clusters.to_string(),
                entry.test_mse.to_string(),
            ]);
        }
        table
    }
}

/// Prediction export: `node_id,cluster_id,predicted,actual,squared_error`.
pub fn predictions_table(result: &PredictionResult) -> Table {
    let mut table = Table::new(&[
        "node_id",
        "cluster_id",
        "predicted",
        "actual",
        "squared_error",
    ]);
    for row in &result.rows {
        table.push_row(&[
            row.node_id.to_string(),
            row.cluster_id.to_string(),
            row.predicted.to_string(),
            row.actual.to_string(),
            row.squared_error.to_string(),
        ]);
    }
    table
}

/// Solves the problem at each λ of a strictly increasing grid, warm-starting
/// every solve from the previous iterates, and records consensus, clusters
/// and test MSE per λ.
pub fn regularization_path(
    problem: &NetworkProblem,
    config: &NetworkConfig,
    lambdas: &[f64],
    test_nodes: &[NodeProblem],
    k_assign: usize,
) -> Result<PathResult> {
    if lambdas.is_empty() {
        return invalid_argument("the lambda grid must be nonempty");
    }
    if lambdas.iter().any(|l| !(*l >= 0.0)) {
        return invalid_argument("lambda values must be nonnegative");
    }
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return invalid_argument("lambda values must be strictly increasing");
    }
    let mut state = NetworkState::zeros(
        problem.num_nodes(),
        problem.graph().edge_count(),
        problem.num_features(),
    );
    let mut entries = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let stage = problem.with_lambda(lambda)?;
        let solution = solve_network_lasso_from(&stage, config, &mut state)?;
        let train_objective = stage.objective(&solution.x);
        let prediction = predict_fares(&solution, problem.nodes(), test_nodes, k_assign)?;
        entries.push(PathEntry {
            lambda,
            num_clusters: solution.num_clusters(),
            train_objective,
            test_mse: prediction.mse,
            solution,
        });
    }
    Ok(PathResult { entries })
}
