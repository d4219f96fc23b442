//! Python bindings for the core solvers: proximal operators, the ADMM Lasso,
//! trip-graph construction, the Network Lasso and fare prediction.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ridelasso_core::error::CoreError;
use ridelasso_core::graph::{self, GeoPoint};
use ridelasso_core::lasso;
use ridelasso_core::network;
use ridelasso_core::numerics::{self, Matrix, Vector};
use ridelasso_core::trip::{self, NodeProblem};

/// `(node_id, cluster_id, predicted, actual, squared_error)`.
type PredictionRow = (usize, usize, f64, f64, f64);
/// `(lambda, objective, consensus_fraction, num_clusters, test_mse)`.
type PathRow = (f64, f64, f64, usize, f64);
/// `(ratings, preferences, pickup_time_flag, pickup_loc, cost, utility)`.
type RideRow = (u8, u8, u8, f64, f64, f64);

fn err(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_vector(values: &[f64]) -> Vector {
    Vector::from_column_slice(values)
}

fn node_problems(
    features: Vec<Vec<f64>>,
    responses: Vec<f64>,
    coords: Vec<(f64, f64)>,
    id_offset: usize,
) -> PyResult<Vec<NodeProblem>> {
    if features.len() != responses.len() || features.len() != coords.len() {
        return Err(PyValueError::new_err(
            "features, responses and coords must have the same length",
        ));
    }
    Ok(features
        .into_iter()
        .zip(responses)
        .zip(coords)
        .enumerate()
        .map(|(i, ((f, r), (lat, lon)))| {
            let mut node = NodeProblem::at_location(id_offset + i, lat, lon);
            node.features = to_vector(&f);
            node.response = r;
            node
        })
        .collect())
}

/// Elementwise soft-thresholding: `sign(v) * max(|v| - kappa, 0)`.
#[pyfunction]
fn soft_threshold(v: Vec<f64>, kappa: f64) -> PyResult<Vec<f64>> {
    let out = numerics::soft_threshold(&to_vector(&v), kappa).map_err(err)?;
    Ok(out.iter().copied().collect())
}

/// Block shrinkage: `max(1 - kappa/||v||, 0) * v`.
#[pyfunction]
fn group_shrink(v: Vec<f64>, kappa: f64) -> PyResult<Vec<f64>> {
    let out = numerics::group_shrink(&to_vector(&v), kappa).map_err(err)?;
    Ok(out.iter().copied().collect())
}

/// Great-circle distance in kilometers.
#[pyfunction]
fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> PyResult<f64> {
    let a = GeoPoint::new(lat1, lon1).map_err(err)?;
    let b = GeoPoint::new(lat2, lon2).map_err(err)?;
    Ok(graph::haversine_km(a, b))
}

/// ADMM parameters shared by both solvers.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct AdmmConfig {
    inner: lasso::AdmmConfig,
}

#[pymethods]
impl AdmmConfig {
    #[new]
    #[pyo3(signature = (rho=1.2, alpha=1.8, max_iters=1000, eps_abs=1e-4, eps_rel=1e-3))]
    fn new(rho: f64, alpha: f64, max_iters: usize, eps_abs: f64, eps_rel: f64) -> PyResult<Self> {
        let inner = lasso::AdmmConfig {
            rho,
            alpha,
            max_iters,
            eps_abs,
            eps_rel,
        };
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "AdmmConfig(rho={}, alpha={}, max_iters={}, eps_abs={}, eps_rel={})",
            self.inner.rho,
            self.inner.alpha,
            self.inner.max_iters,
            self.inner.eps_abs,
            self.inner.eps_rel
        )
    }
}

/// A Lasso instance: dense rows, a response vector and the l1 penalty.
#[pyclass]
struct LassoProblem {
    inner: lasso::LassoProblem,
}

#[pymethods]
impl LassoProblem {
    #[new]
    fn new(rows: Vec<Vec<f64>>, b: Vec<f64>, lambda: f64) -> PyResult<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(PyValueError::new_err("rows must all have the same length"));
        }
        let a = Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
        let inner = lasso::LassoProblem::new(a, to_vector(&b), lambda).map_err(err)?;
        Ok(Self { inner })
    }

    /// Smallest penalty with an all-zero solution.
    fn lambda_max(&self) -> f64 {
        self.inner.lambda_max()
    }

    fn with_lambda(&self, lambda: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_lambda(lambda).map_err(err)?,
        })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.matrix().nrows(), self.inner.num_features())
    }
}

/// Seeded sparse synthetic instance; returns `(problem, ground_truth)`.
#[pyfunction]
fn generate_synthetic_lasso(
    n: usize,
    d: usize,
    density: f64,
    noise_sigma: f64,
    seed: u64,
) -> PyResult<(LassoProblem, Vec<f64>)> {
    let (problem, truth) =
        trip::generate_synthetic_lasso(n, d, density, noise_sigma, seed).map_err(err)?;
    Ok((LassoProblem { inner: problem }, truth.iter().copied().collect()))
}

/// Result of one Lasso solve.
#[pyclass]
struct LassoSolution {
    inner: lasso::LassoSolution,
}

#[pymethods]
impl LassoSolution {
    #[getter]
    fn z(&self) -> Vec<f64> {
        self.inner.z.iter().copied().collect()
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.iter().copied().collect()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn nonzero_count(&self) -> usize {
        self.inner.nonzero_count
    }

    #[getter]
    fn objective_history(&self) -> Vec<f64> {
        self.inner.objective_history.clone()
    }
}

#[pyfunction]
fn solve_lasso(problem: &LassoProblem, config: &AdmmConfig) -> PyResult<LassoSolution> {
    Ok(LassoSolution {
        inner: lasso::solve_lasso(&problem.inner, &config.inner).map_err(err)?,
    })
}

/// Warm-started sweep over a penalty grid; one solution per lambda.
#[pyfunction]
fn lambda_sweep(
    problem: &LassoProblem,
    config: &AdmmConfig,
    lambdas: Vec<f64>,
) -> PyResult<Vec<LassoSolution>> {
    let solutions = lasso::lambda_sweep(&problem.inner, &config.inner, &lambdas).map_err(err)?;
    Ok(solutions
        .into_iter()
        .map(|inner| LassoSolution { inner })
        .collect())
}

/// Weighted undirected trip-similarity graph.
#[pyclass]
struct TripGraph {
    inner: graph::TripGraph,
}

#[pymethods]
impl TripGraph {
    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Edges as `(j, k, distance_km, weight)` tuples.
    fn edges(&self) -> Vec<(usize, usize, f64, f64)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (e.j, e.k, e.distance_km, e.weight))
            .collect()
    }
}

/// k-nearest-neighbor graph over `(lat, lon)` pickup coordinates with
/// weights `exp(-distance / weight_scale_km)`.
#[pyfunction]
#[pyo3(signature = (coords, k, weight_scale_km=2.0))]
fn build_knn_graph(coords: Vec<(f64, f64)>, k: usize, weight_scale_km: f64) -> PyResult<TripGraph> {
    let nodes: Vec<NodeProblem> = coords
        .iter()
        .enumerate()
        .map(|(i, &(lat, lon))| NodeProblem::at_location(i, lat, lon))
        .collect();
    Ok(TripGraph {
        inner: graph::build_knn_graph(&nodes, k, weight_scale_km).map_err(err)?,
    })
}

/// A network regression instance over a trip graph.
#[pyclass]
struct NetworkProblem {
    inner: network::NetworkProblem,
}

#[pymethods]
impl NetworkProblem {
    #[new]
    #[pyo3(signature = (features, responses, coords, graph, lambda, mu=1e-3))]
    fn new(
        features: Vec<Vec<f64>>,
        responses: Vec<f64>,
        coords: Vec<(f64, f64)>,
        graph: &TripGraph,
        lambda: f64,
        mu: f64,
    ) -> PyResult<Self> {
        let nodes = node_problems(features, responses, coords, 0)?;
        Ok(Self {
            inner: network::NetworkProblem::new(nodes, graph.inner.clone(), lambda, mu)
                .map_err(err)?,
        })
    }

    fn with_lambda(&self, lambda: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_lambda(lambda).map_err(err)?,
        })
    }

    /// Full objective (node losses + ridge + edge penalty) at `x`.
    fn objective(&self, x: Vec<Vec<f64>>) -> f64 {
        let xs: Vec<Vector> = x.iter().map(|v| to_vector(v)).collect();
        self.inner.objective(&xs)
    }
}

/// Result of one network solve.
#[pyclass]
struct NetworkSolution {
    inner: network::NetworkSolution,
}

#[pymethods]
impl NetworkSolution {
    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.inner
            .x
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect()
    }

    #[getter]
    fn clusters(&self) -> Vec<usize> {
        self.inner.clusters.clone()
    }

    #[getter]
    fn consensus_fraction(&self) -> f64 {
        self.inner.consensus_fraction
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn num_clusters(&self) -> usize {
        self.inner.num_clusters()
    }
}

#[pyfunction]
#[pyo3(signature = (problem, config, consensus_eps=1e-3))]
fn solve_network_lasso(
    problem: &NetworkProblem,
    config: &AdmmConfig,
    consensus_eps: f64,
) -> PyResult<NetworkSolution> {
    let network_config = network::NetworkConfig {
        admm: config.inner.clone(),
        consensus_eps,
    };
    Ok(NetworkSolution {
        inner: network::solve_network_lasso(&problem.inner, &network_config).map_err(err)?,
    })
}

/// Warm-started path over an increasing lambda grid. Returns one
/// `(lambda, objective, consensus_fraction, num_clusters, test_mse)` tuple
/// per grid point.
#[pyfunction]
#[pyo3(signature = (problem, config, lambdas, test_features, test_responses, test_coords, k_assign=5, consensus_eps=1e-3))]
#[allow(clippy::too_many_arguments)]
fn regularization_path(
    problem: &NetworkProblem,
    config: &AdmmConfig,
    lambdas: Vec<f64>,
    test_features: Vec<Vec<f64>>,
    test_responses: Vec<f64>,
    test_coords: Vec<(f64, f64)>,
    k_assign: usize,
    consensus_eps: f64,
) -> PyResult<Vec<PathRow>> {
    let network_config = network::NetworkConfig {
        admm: config.inner.clone(),
        consensus_eps,
    };
    let test_nodes = node_problems(test_features, test_responses, test_coords, 10_000)?;
    let path = network::regularization_path(
        &problem.inner,
        &network_config,
        &lambdas,
        &test_nodes,
        k_assign,
    )
    .map_err(err)?;
    Ok(path
        .entries
        .iter()
        .map(|e| {
            (
                e.lambda,
                e.train_objective,
                e.solution.consensus_fraction,
                e.num_clusters,
                e.test_mse,
            )
        })
        .collect())
}

/// Predicts responses for test points from a solved network: returns
/// `(rows, mse)` where each row is `(node_id, cluster_id, predicted,
/// actual, squared_error)`.
#[pyfunction]
#[pyo3(signature = (solution, problem, test_features, test_responses, test_coords, k_assign=5))]
fn predict_fares(
    solution: &NetworkSolution,
    problem: &NetworkProblem,
    test_features: Vec<Vec<f64>>,
    test_responses: Vec<f64>,
    test_coords: Vec<(f64, f64)>,
    k_assign: usize,
) -> PyResult<(Vec<PredictionRow>, f64)> {
    let test_nodes = node_problems(test_features, test_responses, test_coords, 10_000)?;
    let result = network::predict_fares(
        &solution.inner,
        problem.inner.nodes(),
        &test_nodes,
        k_assign,
    )
    .map_err(err)?;
    let rows = result
        .rows
        .iter()
        .map(|r| (r.node_id, r.cluster_id, r.predicted, r.actual, r.squared_error))
        .collect();
    Ok((rows, result.mse))
}

/// Seeded synthetic ride requests; returns rows of
/// `(ratings, preferences, pickup_time_flag, pickup_loc, cost, utility)`.
#[pyfunction]
fn generate_synthetic_rides(
    m: usize,
    coeffs: (f64, f64, f64, f64, f64),
    noise_sigma: f64,
    seed: u64,
) -> PyResult<Vec<RideRow>> {
    let rides = trip::generate_synthetic_rides(
        m,
        trip::RideCoeffs::new(coeffs.0, coeffs.1, coeffs.2, coeffs.3, coeffs.4),
        noise_sigma,
        seed,
    )
    .map_err(err)?;
    Ok(rides
        .iter()
        .map(|r| {
            (
                r.ratings,
                r.preferences,
                r.pickup_time_flag,
                r.pickup_loc,
                r.cost,
                r.utility,
            )
        })
        .collect())
}

#[pymodule]
fn ridelasso(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<AdmmConfig>()?;
    m.add_class::<LassoProblem>()?;
    m.add_class::<LassoSolution>()?;
    m.add_class::<TripGraph>()?;
    m.add_class::<NetworkProblem>()?;
    m.add_class::<NetworkSolution>()?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(group_shrink, m)?)?;
    m.add_function(wrap_pyfunction!(haversine_km, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic_lasso, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lasso, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(build_knn_graph, m)?)?;
    m.add_function(wrap_pyfunction!(solve_network_lasso, m)?)?;
    m.add_function(wrap_pyfunction!(regularization_path, m)?)?;
    m.add_function(wrap_pyfunction!(predict_fares, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic_rides, m)?)?;
    Ok(())
}
