//! Independent oracles and planted-instance builders for the acceptance
//! suite. Nothing here calls into the solver paths it is used to verify.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use ridelasso_core::graph::{build_knn_graph, haversine_km, GeoPoint, TripGraph};
use ridelasso_core::trip::NodeProblem;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

fn soft(v: f64, k: f64) -> f64 {
    if v > k {
        v - k
    } else if v < -k {
        v + k
    } else {
        0.0
    }
}

fn lipschitz_constant(a: &Matrix) -> f64 {
    let mut v = Vector::from_element(a.ncols(), 1.0);
    v /= v.norm();
    let mut value = 0.0;
    for _ in 0..500 {
        let w = a.tr_mul(&(a * &v));
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        v = w / n;
        value = n;
    }
    value
}

pub fn lasso_objective(a: &Matrix, b: &Vector, lambda: f64, z: &Vector) -> f64 {
    0.5 * (a * z - b).norm_squared() + lambda * z.iter().map(|v| v.abs()).sum::<f64>()
}

/// Proximal-gradient (FISTA with adaptive restart) Lasso solver, run until
/// the objective stalls below `tol` relative improvement for 50 iterations.
pub fn fista_lasso(a: &Matrix, b: &Vector, lambda: f64, tol: f64, max_iters: usize) -> Vector {
    let l = lipschitz_constant(a).max(1e-12) * 1.001;
    let step = 1.0 / l;
    let shrink = lambda * step;
    let mut z = Vector::zeros(a.ncols());
    let mut y = z.clone();
    let mut t = 1.0f64;
    let mut prev_obj = lasso_objective(a, b, lambda, &z);
    let mut stall = 0;
    for _ in 0..max_iters {
        let grad = a.tr_mul(&(a * &y - b));
        let z_new = (&y - &grad * step).map(|v| soft(v, shrink));
        let obj = lasso_objective(a, b, lambda, &z_new);
        if obj > prev_obj {
            y = z_new.clone();
            t = 1.0;
        } else {
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &z_new + (&z_new - &z) * ((t - 1.0) / t_new);
            t = t_new;
        }
        let improvement = (prev_obj - obj).abs() / obj.abs().max(1.0);
        if improvement < tol {
            stall += 1;
            if stall >= 50 {
                return z_new;
            }
        } else {
            stall = 0;
        }
        z = z_new;
        prev_obj = prev_obj.min(obj);
    }
    z
}

/// Adjusted Rand Index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |n: usize| (n * n.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = table
        .iter()
        .flat_map(|row| row.iter().map(|&n| choose2(n)))
        .sum();
    let sum_rows: f64 = table.iter().map(|row| choose2(row.iter().sum())).sum();
    let sum_cols: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum()))
        .sum();
    let total = choose2(a.len());
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index - expected).abs() < 1e-15 {
        return 1.0;
    }
    (sum_cells - expected) / (max_index - expected)
}

/// Two spatial blobs with distinct ground-truth coefficient vectors, joined
/// by a single bridge edge so the graph is connected.
pub struct PlantedNetwork {
    pub nodes: Vec<NodeProblem>,
    pub graph: TripGraph,
    pub truth: Vec<usize>,
    pub test_nodes: Vec<NodeProblem>,
    pub test_truth: Vec<usize>,
    pub models: [Vector; 2],
    pub noise_sigma: f64,
}

const BLOB_CENTERS: [(f64, f64); 2] = [(40.70, -73.95), (40.78, -73.87)];

fn planted_node(
    rng: &mut ChaCha20Rng,
    id: usize,
    blob: usize,
    model: &Vector,
    noise_sigma: f64,
) -> NodeProblem {
    let (clat, clon) = BLOB_CENTERS[blob];
    let mut node = NodeProblem::at_location(
        id,
        clat + rng.random_range(-0.004..0.004),
        clon + rng.random_range(-0.004..0.004),
    );
    let p = model.len();
    let mut features = Vector::from_fn(p, |_, _| StandardNormal.sample(rng));
    features[p - 1] = 1.0;
    let noise: f64 = StandardNormal.sample(rng);
    node.response = model.dot(&features) + noise_sigma * noise;
    node.features = features;
    node
}

pub fn planted_network(
    per_blob: usize,
    test_per_blob: usize,
    k: usize,
    noise_sigma: f64,
    seed: u64,
) -> PlantedNetwork {
    let models = [
        Vector::from_column_slice(&[3.0, -1.0, 5.0]),
        Vector::from_column_slice(&[-2.0, 2.0, 1.0]),
    ];
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(2 * per_blob);
    let mut truth = Vec::with_capacity(2 * per_blob);
    for (blob, model) in models.iter().enumerate() {
        for i in 0..per_blob {
            let id = blob * per_blob + i;
            nodes.push(planted_node(&mut rng, id, blob, model, noise_sigma));
            truth.push(blob);
        }
    }
    let knn = build_knn_graph(&nodes, k, 2.0).unwrap();

    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..per_blob {
        for j in per_blob..2 * per_blob {
            let d = haversine_km(
                GeoPoint {
                    lat: nodes[i].pickup_lat,
                    lon: nodes[i].pickup_lon,
                },
                GeoPoint {
                    lat: nodes[j].pickup_lat,
                    lon: nodes[j].pickup_lon,
                },
            );
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, i, j));
            }
        }
    }
    let (bridge_d, bi, bj) = best.unwrap();
    let mut edges: Vec<(usize, usize, f64, f64)> = knn
        .edges()
        .iter()
        .map(|e| (e.j, e.k, e.distance_km, e.weight))
        .collect();
    if !edges.iter().any(|&(a, b, _, _)| (a, b) == (bi, bj)) {
        edges.push((bi, bj, bridge_d, (-bridge_d / 2.0).exp()));
    }
    let graph = TripGraph::from_edges(nodes.len(), &edges).unwrap();

    let mut test_nodes = Vec::with_capacity(2 * test_per_blob);
    let mut test_truth = Vec::with_capacity(2 * test_per_blob);
    for (blob, model) in models.iter().enumerate() {
        for i in 0..test_per_blob {
            let id = 10_000 + blob * test_per_blob + i;
            test_nodes.push(planted_node(&mut rng, id, blob, model, noise_sigma));
            test_truth.push(blob);
        }
    }

    PlantedNetwork {
        nodes,
        graph,
        truth,
        test_nodes,
        test_truth,
        models,
        noise_sigma,
    }
}

/// Per-node ridge solutions by direct dense linear solve.
pub fn decoupled_ridge(nodes: &[NodeProblem], mu: f64) -> Vec<Vector> {
    nodes
        .iter()
        .map(|node| {
            let p = node.features.len();
            let mut m = Matrix::identity(p, p) * mu;
            m += &node.features * node.features.transpose();
            m.lu().solve(&(&node.features * node.response)).unwrap()
        })
        .collect()
}

/// Pooled ridge over all observations: the exact consensus-limit model.
pub fn pooled_ridge(nodes: &[NodeProblem], mu: f64) -> Vector {
    let p = nodes[0].features.len();
    let mut gram = Matrix::identity(p, p) * (nodes.len() as f64 * mu);
    let mut rhs = Vector::zeros(p);
    for node in nodes {
        gram += &node.features * node.features.transpose();
        rhs += &node.features * node.response;
    }
    gram.lu().solve(&rhs).unwrap()
}

/// Maximum per-edge forcing level `ρ‖xr_j − xr_k‖ / (2 w)` over the
/// decoupled ridge solutions: beyond this λ every edge merges in one
/// proximal step.
pub fn forcing_lambda(nodes: &[NodeProblem], graph: &TripGraph, mu: f64, rho: f64) -> f64 {
    let ridge = decoupled_ridge(nodes, mu);
    graph
        .edges()
        .iter()
        .map(|e| rho * (&ridge[e.j] - &ridge[e.k]).norm() / (2.0 * e.weight))
        .fold(0.0, f64::max)
}

/// Numeric minimizer for the edge subproblem, independent of the closed
/// form: split into sum/difference coordinates (plain algebra), solve the
/// smooth half exactly, and golden-section the remaining 1-D piece whose
/// direction is fixed by Cauchy–Schwarz.
pub fn edge_numeric_minimum(vj: &Vector, vk: &Vector, lam_w: f64, rho: f64) -> f64 {
    let d = vj - vk;
    let dn = d.norm();
    let objective = |r: f64| -> f64 { lam_w * r + 0.25 * rho * (dn - r) * (dn - r) };
    let (mut lo, mut hi) = (0.0, dn);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if objective(m1) <= objective(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let r = 0.5 * (lo + hi);
    let s = if dn > 0.0 { &d * (r / dn) } else { d.clone() };
    let t = vj + vk;
    let z1 = (&t + &s) * 0.5;
    let z2 = (&t - &s) * 0.5;
    lam_w * (&z1 - &z2).norm()
        + 0.5 * rho * ((vj - &z1).norm_squared() + (vk - &z2).norm_squared())
}
