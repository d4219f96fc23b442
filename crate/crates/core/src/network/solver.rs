//! The network ADMM iteration. Each undirected edge (j, k) carries two
//! directed copies `z_jk, z_kj` with scaled multipliers `u_jk, u_kj`, tied to
//! the node variables by `x_j = z_jk` and `x_k = z_kj`.

use super::{consensus_fraction, extract_clusters, NetworkConfig, NetworkProblem, NetworkSolution};
use crate::error::{invalid_argument, Result};
use crate::numerics::Vector;

/// ADMM iterates carried between warm-started solves. Directed copy `2e`
/// belongs to the lower-indexed endpoint of edge `e`, copy `2e + 1` to the
/// higher one.
#[derive(Debug, Clone)]
pub struct NetworkState {
    pub x: Vec<Vector>,
    pub z: Vec<Vector>,
    pub u: Vec<Vector>,
    /// Final stacked primal residual `‖x − z‖` of the last solve.
    pub primal_residual: f64,
    /// Final stacked dual residual `ρ‖z − z_prev‖` of the last solve.
    pub dual_residual: f64,
}

impl NetworkState {
    pub fn zeros(num_nodes: usize, num_edges: usize, num_features: usize) -> Self {
        Self {
            x: vec![Vector::zeros(num_features); num_nodes],
            z: vec![Vector::zeros(num_features); 2 * num_edges],
            u: vec![Vector::zeros(num_features); 2 * num_edges],
            primal_residual: 0.0,
            dual_residual: 0.0,
        }
    }

    fn matches(&self, num_nodes: usize, num_edges: usize, num_features: usize) -> bool {
        self.x.len() == num_nodes
            && self.z.len() == 2 * num_edges
            && self.u.len() == 2 * num_edges
            && self.x.iter().all(|v| v.len() == num_features)
            && self.z.iter().all(|v| v.len() == num_features)
            && self.u.iter().all(|v| v.len() == num_features)
    }
}

/// Closed-form minimizer of the per-edge subproblem
/// `min λw‖z₁ − z₂‖ + (ρ/2)(‖v₁ − z₁‖² + ‖v₂ − z₂‖²)`:
/// a convex blend `z₁ = θv₁ + (1−θ)v₂` with
/// `θ = max(½, 1 − λw/(ρ‖v₁ − v₂‖))`, collapsing both copies to the exact
/// average once the gap is inside the shrink width.
pub fn edge_update(v1: &Vector, v2: &Vector, lambda_weight: f64, rho: f64) -> (Vector, Vector) {
    let gap = (v1 - v2).norm();
    let theta = if gap > 0.0 {
        (1.0 - lambda_weight / (rho * gap)).max(0.5)
    } else {
        0.5
    };
    if theta <= 0.5 {
        let mid = (v1 + v2) * 0.5;
        (mid.clone(), mid)
    } else {
        (
            v1 * theta + v2 * (1.0 - theta),
            v2 * theta + v1 * (1.0 - theta),
        )
    }
}

/// Solves the network problem from a cold start.
pub fn solve_network_lasso(
    problem: &NetworkProblem,
    config: &NetworkConfig,
) -> Result<NetworkSolution> {
    let mut state = NetworkState::zeros(
        problem.num_nodes(),
        problem.graph().edge_count(),
        problem.num_features(),
    );
    solve_network_lasso_from(problem, config, &mut state)
}

/// Solves from explicit initial iterates, leaving the final iterates in
/// `state` for the next warm start.
pub fn solve_network_lasso_from(
    problem: &NetworkProblem,
    config: &NetworkConfig,
    state: &mut NetworkState,
) -> Result<NetworkSolution> {
    config.validate()?;
    let graph = problem.graph();
    let m = problem.num_nodes();
    let p = problem.num_features();
    let num_edges = graph.edge_count();
    if !state.matches(m, num_edges, p) {
        return invalid_argument("warm-start iterates do not match the problem shape");
    }
    let rho = config.admm.rho;
    let lambda = problem.lambda();
    let mu = problem.mu();

    // Per-node constants for the rank-one x-update of
    // ((μ + ρ·deg)I + a aᵀ) x = a·b + ρ Σ (z − u).
    let mut scale = Vec::with_capacity(m);
    for (i, node) in problem.nodes().iter().enumerate() {
        let c = mu + rho * graph.degree(i) as f64;
        if !(c > 0.0) {
            return invalid_argument(format!(
                "node {i} is isolated and mu = 0, so its subproblem is singular"
            ));
        }
        scale.push((c, node.features.norm_squared()));
    }

    let total_copies = (2 * num_edges * p) as f64;
    let sqrt_dims = total_copies.sqrt();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..config.admm.max_iters {
        iterations += 1;

        // x-update (independent across nodes).
        for (i, node) in problem.nodes().iter().enumerate() {
            let (c, feat_norm_sq) = scale[i];
            let mut rhs = &node.features * node.response;
            for &(_, edge_idx) in graph.neighbors(i) {
                let side = copy_index(graph, edge_idx, i);
                rhs += (&state.z[side] - &state.u[side]) * rho;
            }
            let at_rhs = node.features.dot(&rhs);
            state.x[i] = &rhs / c - &node.features * (at_rhs / (c * (c + feat_norm_sq)));
        }

        // z-update (independent across edges) and dual residual accumulation.
        let mut dual_sq = 0.0;
        for (e, edge) in graph.edges().iter().enumerate() {
            let vj = &state.x[edge.j] + &state.u[2 * e];
            let vk = &state.x[edge.k] + &state.u[2 * e + 1];
            let (new_j, new_k) = edge_update(&vj, &vk, lambda * edge.weight, rho);
            dual_sq += (&new_j - &state.z[2 * e]).norm_squared();
            dual_sq += (&new_k - &state.z[2 * e + 1]).norm_squared();
            state.z[2 * e] = new_j;
            state.z[2 * e + 1] = new_k;
        }

        // u-update and primal residual.
        let mut primal_sq = 0.0;
        let mut x_stack_sq = 0.0;
        for (e, edge) in graph.edges().iter().enumerate() {
            for (side, endpoint) in [(2 * e, edge.j), (2 * e + 1, edge.k)] {
                let gap = &state.x[endpoint] - &state.z[side];
                primal_sq += gap.norm_squared();
                x_stack_sq += state.x[endpoint].norm_squared();
                state.u[side] += gap;
            }
        }

        let r_norm = primal_sq.sqrt();
        let s_norm = rho * dual_sq.sqrt();
        state.primal_residual = r_norm;
        state.dual_residual = s_norm;

        let z_stack = state.z.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        let u_stack = state.u.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        let eps_pri = sqrt_dims * config.admm.eps_abs
            + config.admm.eps_rel * x_stack_sq.sqrt().max(z_stack);
        // The unscaled dual variable is ρ·u.
        let eps_dual = sqrt_dims * config.admm.eps_abs + config.admm.eps_rel * rho * u_stack;
        if r_norm <= eps_pri && s_norm <= eps_dual {
            converged = true;
            break;
        }
    }

    let fraction = consensus_fraction(&state.x, graph, config.consensus_eps)?;
    let clusters = extract_clusters(&state.x, graph, config.consensus_eps)?;
    Ok(NetworkSolution {
        x: state.x.clone(),
        consensus_fraction: fraction,
        clusters,
        converged,
        iterations,
    })
}

fn copy_index(graph: &crate::graph::TripGraph, edge_idx: usize, endpoint: usize) -> usize {
    let edge = &graph.edges()[edge_idx];
    if edge.j == endpoint {
        2 * edge_idx
    } else {
        2 * edge_idx + 1
    }
}
