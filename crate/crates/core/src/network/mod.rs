//! Network Lasso over a trip graph: per-node least-squares objectives plus
//! `λ·w_jk·‖x_j − x_k‖₂` edge penalties, solved by ADMM with one pair of
//! directed edge copies per constraint. Nodes whose solutions coincide form
//! clusters sharing one model.

mod path;
mod solver;

pub use path::{predict_fares, predictions_table, regularization_path, PathEntry, PathResult,
    Prediction, PredictionResult};
pub use solver::{edge_update, solve_network_lasso, solve_network_lasso_from, NetworkState};

use crate::error::{invalid_argument, Result};
use crate::graph::{TripGraph, UnionFind};
use crate::lasso::AdmmConfig;
use crate::numerics::Vector;
use crate::table::Table;
use crate::trip::NodeProblem;

/// A network regression instance: one observation per node, a similarity
/// graph, the edge penalty `lambda` and a small per-node ridge term `mu`
/// that keeps the per-node subproblems well posed.
#[derive(Debug, Clone)]
pub struct NetworkProblem {
    nodes: Vec<NodeProblem>,
    graph: TripGraph,
    lambda: f64,
    mu: f64,
}

impl NetworkProblem {
    pub fn new(nodes: Vec<NodeProblem>, graph: TripGraph, lambda: f64, mu: f64) -> Result<Self> {
        if nodes.is_empty() {
            return invalid_argument("network problem needs at least one node");
        }
        if graph.node_count() != nodes.len() {
            return invalid_argument(format!(
                "graph has {} nodes but {} problems were given",
                graph.node_count(),
                nodes.len()
            ));
        }
        let p = nodes[0].features.len();
        if p == 0 {
            return invalid_argument("node features must be nonempty");
        }
        if nodes.iter().any(|n| n.features.len() != p) {
            return invalid_argument("all node feature vectors must have the same length");
        }
        if nodes
            .iter()
            .any(|n| n.features.iter().any(|v| !v.is_finite()) || !n.response.is_finite())
        {
            return invalid_argument("node features and responses must be finite");
        }
        if !(lambda >= 0.0) {
            return invalid_argument(format!("lambda must be nonnegative, got {lambda}"));
        }
        if !(mu >= 0.0) {
            return invalid_argument(format!("mu must be nonnegative, got {mu}"));
        }
        Ok(Self {
            nodes,
            graph,
            lambda,
            mu,
        })
    }

    pub fn nodes(&self) -> &[NodeProblem] {
        &self.nodes
    }

    pub fn graph(&self) -> &TripGraph {
        &self.graph
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_features(&self) -> usize {
        self.nodes[0].features.len()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.nodes.clone(), self.graph.clone(), lambda, self.mu)
    }

    /// Full objective at a candidate solution:
    /// `Σ_i [½(a_iᵀx_i − b_i)² + (μ/2)‖x_i‖²] + λ Σ_(j,k) w_jk ‖x_j − x_k‖`.
    pub fn objective(&self, x: &[Vector]) -> f64 {
        let node_part: f64 = self
            .nodes
            .iter()
            .zip(x)
            .map(|(node, xi)| {
                let r = node.features.dot(xi) - node.response;
                0.5 * r * r + 0.5 * self.mu * xi.norm_squared()
            })
            .sum();
        let edge_part: f64 = self
            .graph
            .edges()
            .iter()
            .map(|e| self.lambda * e.weight * (&x[e.j] - &x[e.k]).norm())
            .sum();
        node_part + edge_part
    }
}

/// Solver configuration: the shared ADMM parameters plus the relative
/// tolerance used to call an edge "in consensus".
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub admm: AdmmConfig,
    pub consensus_eps: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            admm: AdmmConfig::default(),
            consensus_eps: 1e-3,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        self.admm.validate()?;
        if !(self.consensus_eps > 0.0) {
            return invalid_argument(format!(
                "consensus_eps must be positive, got {}",
                self.consensus_eps
            ));
        }
        Ok(())
    }
}

/// Output of one network solve.
#[derive(Debug, Clone)]
pub struct NetworkSolution {
    /// Per-node model vectors.
    pub x: Vec<Vector>,
    /// Fraction of edges whose endpoints agree within the consensus rule.
    pub consensus_fraction: f64,
    /// Cluster label per node (a partition of the node set).
    pub clusters: Vec<usize>,
    pub converged: bool,
    pub iterations: usize,
}

impl NetworkSolution {
    pub fn num_clusters(&self) -> usize {
        self.clusters.iter().max().map_or(0, |m| m + 1)
    }
}

fn edge_in_consensus(x: &[Vector], j: usize, k: usize, eps: f64) -> bool {
    (&x[j] - &x[k]).norm() <= eps * (1.0 + x[j].norm())
}

/// Fraction of edges `(j, k)` with `‖x_j − x_k‖ ≤ eps·(1 + ‖x_j‖)`.
/// An edgeless graph is vacuously in full consensus.
pub fn consensus_fraction(x: &[Vector], graph: &TripGraph, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return invalid_argument(format!("eps must be positive, got {eps}"));
    }
    if x.len() != graph.node_count() {
        return invalid_argument("solution size does not match graph");
    }
    if graph.edge_count() == 0 {
        return Ok(1.0);
    }
    let agreeing = graph
        .edges()
        .iter()
        .filter(|e| edge_in_consensus(x, e.j, e.k, eps))
        .count();
    Ok(agreeing as f64 / graph.edge_count() as f64)
}

/// Connected components of the subgraph of in-consensus edges, labeled by
/// first appearance. Every node gets a label, so the result is a partition.
pub fn extract_clusters(x: &[Vector], graph: &TripGraph, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return invalid_argument(format!("eps must be positive, got {eps}"));
    }
    if x.len() != graph.node_count() {
        return invalid_argument("solution size does not match graph");
    }
    let mut uf = UnionFind::new(graph.node_count());
    for e in graph.edges() {
        if edge_in_consensus(x, e.j, e.k, eps) {
            uf.union(e.j, e.k);
        }
    }
    Ok(uf.labels())
}

/// Solution export: `node_id,cluster_id,x_0..x_{p-1}`.
pub fn solution_table(nodes: &[NodeProblem], solution: &NetworkSolution) -> Table {
    let p = solution.x.first().map_or(0, |x| x.len());
    let mut headers = vec!["node_id".to_string(), "cluster_id".to_string()];
    headers.extend((0..p).map(|i| format!("x_{i}")));
    let mut table = Table::from_headers(headers);
    for (i, node) in nodes.iter().enumerate() {
        let mut row = vec![node.node_id.to_string(), solution.clusters[i].to_string()];
        row.extend(solution.x[i].iter().map(|v| v.to_string()));
        table.push_row(&row);
    }
    table
}
