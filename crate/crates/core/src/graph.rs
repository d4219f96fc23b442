//! Weighted trip-similarity graph over pickup coordinates: k-nearest-neighbor
//! construction, great-circle distances, distance-matrix export and plain
//! spatial connected components.

use crate::error::{invalid_argument, Result};
use crate::table::Table;
use crate::trip::NodeProblem;

const EARTH_RADIUS_KM: f64 = 6371.0;

/// A latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return invalid_argument(format!("coordinates out of range: ({lat}, {lon})"));
        }
        Ok(Self { lat, lon })
    }
}

/// Great-circle distance in kilometers (haversine, Earth radius 6371 km).
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Undirected edge with its geodesic length and similarity weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Lower node index.
    pub j: usize,
    /// Higher node index.
    pub k: usize,
    pub distance_km: f64,
    pub weight: f64,
}

/// Simple undirected weighted graph over node indices `0..node_count`.
#[derive(Debug, Clone)]
pub struct TripGraph {
    node_count: usize,
    edges: Vec<Edge>,
    /// Per node: (neighbor index, edge index) pairs.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl TripGraph {
    /// Builds a graph from explicit `(j, k, distance_km, weight)` edges.
    /// Rejects self-loops, duplicate edges, out-of-range indices and
    /// non-positive or non-finite weights.
    pub fn from_edges(node_count: usize, raw: &[(usize, usize, f64, f64)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(raw.len());
        let mut adjacency = vec![Vec::new(); node_count];
        let mut seen = std::collections::HashSet::new();
        for &(a, b, distance_km, weight) in raw {
            if a == b {
                return invalid_argument(format!("self-loop at node {a}"));
            }
            if a >= node_count || b >= node_count {
                return invalid_argument(format!("edge ({a}, {b}) out of range"));
            }
            if !(weight > 0.0) || !weight.is_finite() {
                return invalid_argument(format!("edge ({a}, {b}) has invalid weight {weight}"));
            }
            if !(distance_km >= 0.0) || !distance_km.is_finite() {
                return invalid_argument(format!(
                    "edge ({a}, {b}) has invalid distance {distance_km}"
                ));
            }
            let (j, k) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((j, k)) {
                return invalid_argument(format!("duplicate edge ({j}, {k})"));
            }
            let idx = edges.len();
            edges.push(Edge {
                j,
                k,
                distance_km,
                weight,
            });
            adjacency[j].push((k, idx));
            adjacency[k].push((j, idx));
        }
        Ok(Self {
            node_count,
            edges,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `node` as (neighbor index, edge index) pairs.
    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Connected-component label per node, numbered by first appearance.
    pub fn component_labels(&self, keep_edge: impl Fn(&Edge) -> bool) -> Vec<usize> {
        let mut uf = UnionFind::new(self.node_count);
        for edge in &self.edges {
            if keep_edge(edge) {
                uf.union(edge.j, edge.k);
            }
        }
        uf.labels()
    }

    /// Edge list as a `j,k,distance_km,weight` table.
    pub fn edge_table(&self) -> Table {
        let mut table = Table::new(&["j", "k", "distance_km", "weight"]);
        for edge in &self.edges {
            table.push_row(&[
                edge.j.to_string(),
                edge.k.to_string(),
                edge.distance_km.to_string(),
                edge.weight.to_string(),
            ]);
        }
        table
    }
}

fn pickup_point(node: &NodeProblem) -> GeoPoint {
    GeoPoint {
        lat: node.pickup_lat,
        lon: node.pickup_lon,
    }
}

/// Connects each node to its `k` nearest neighbors by haversine distance on
/// pickup coordinates; mutual pairs merge into a single undirected edge.
/// Weights are `exp(−d / weight_scale_km)`, so coincident points get weight 1
/// and weights decrease strictly with distance.
pub fn build_knn_graph(nodes: &[NodeProblem], k: usize, weight_scale_km: f64) -> Result<TripGraph> {
    let m = nodes.len();
    if k == 0 {
        return invalid_argument("k must be positive");
    }
    if k >= m {
        return invalid_argument(format!("k = {k} must be smaller than the node count {m}"));
    }
    if !(weight_scale_km > 0.0) {
        return invalid_argument(format!(
            "weight_scale_km must be positive, got {weight_scale_km}"
        ));
    }
    let points: Vec<GeoPoint> = nodes.iter().map(pickup_point).collect();
    let mut raw: Vec<(usize, usize, f64, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..m {
        // Exact brute-force neighbor search; ties broken by lower index.
        let mut candidates: Vec<(f64, usize)> = (0..m)
            .filter(|&j| j != i)
            .map(|j| (haversine_km(points[i], points[j]), j))
            .collect();
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(distance, j) in candidates.iter().take(k) {
            let key = if i < j { (i, j) } else { (j, i) };
            if seen.insert(key) {
                let weight = (-distance / weight_scale_km).exp();
                raw.push((key.0, key.1, distance, weight));
            }
        }
    }
    TripGraph::from_edges(m, &raw)
}

/// Symmetric matrix of pairwise haversine distances, emitted as a labeled
/// table for heatmap rendering. Row/column labels are node ids.
pub fn distance_matrix(nodes: &[NodeProblem]) -> Result<Table> {
    if nodes.is_empty() {
        return invalid_argument("distance matrix needs at least one node");
    }
    let points: Vec<GeoPoint> = nodes.iter().map(pickup_point).collect();
    let mut headers = vec!["node_id".to_string()];
    headers.extend(nodes.iter().map(|n| n.node_id.to_string()));
    let mut table = Table::from_headers(headers);
    for (i, node) in nodes.iter().enumerate() {
        let mut row = vec![node.node_id.to_string()];
        for j in 0..nodes.len() {
            let d = if i == j {
                0.0
            } else {
                haversine_km(points[i], points[j])
            };
            row.push(d.to_string());
        }
        table.push_row(&row);
    }
    Ok(table)
}

/// Connected components after removing edges longer than `cut_km`,
/// as a `node_id,component_id` table.
pub fn spatial_components(
    graph: &TripGraph,
    nodes: &[NodeProblem],
    cut_km: f64,
) -> Result<(Vec<usize>, Table)> {
    if nodes.len() != graph.node_count() {
        return invalid_argument("node list does not match graph size");
    }
    if !(cut_km >= 0.0) {
        return invalid_argument(format!("cut_km must be nonnegative, got {cut_km}"));
    }
    let labels = graph.component_labels(|e| e.distance_km <= cut_km);
    let mut table = Table::new(&["node_id", "component_id"]);
    for (node, &label) in nodes.iter().zip(&labels) {
        table.push_row(&[node.node_id.to_string(), label.to_string()]);
    }
    Ok((labels, table))
}

/// Array-based union-find with path halving.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Attach the larger root under the smaller for stable labels.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Component label per element, numbered 0.. by first appearance.
    pub fn labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut label_of_root = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let root = self.find(i);
            let next = label_of_root.len();
            let label = *label_of_root.entry(root).or_insert(next);
            labels.push(label);
        }
        labels
    }
}
