//! ADMM solver for the Lasso problem
//! `minimize ½‖Ax − b‖₂² + λ|x|₁`
//! via the splitting `x − z = 0`, with over-relaxation and combined
//! absolute/relative residual stopping.

use crate::error::{invalid_argument, Result};
use crate::numerics::{
    ensure_finite, ensure_finite_matrix, soft_threshold, FactoredSystem, Matrix, Vector,
};

/// Entries of the sparse iterate below this magnitude count as zero.
pub const NONZERO_TOL: f64 = 1e-8;

/// A Lasso instance: `p` observations, `d` features, ℓ1 penalty `lambda`.
#[derive(Debug, Clone)]
pub struct LassoProblem {
    a: Matrix,
    b: Vector,
    lambda: f64,
}

impl LassoProblem {
    pub fn new(a: Matrix, b: Vector, lambda: f64) -> Result<Self> {
        ensure_finite_matrix(&a, "design matrix")?;
        ensure_finite(&b, "response vector")?;
        if b.len() != a.nrows() {
            return invalid_argument(format!(
                "response length {} does not match {} matrix rows",
                b.len(),
                a.nrows()
            ));
        }
        if !(lambda >= 0.0) {
            return invalid_argument(format!("lambda must be nonnegative, got {lambda}"));
        }
        Ok(Self { a, b, lambda })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn response(&self) -> &Vector {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn num_features(&self) -> usize {
        self.a.ncols()
    }

    /// Same data with a different penalty.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), lambda)
    }

    /// Smallest penalty for which the Lasso solution is identically zero,
    /// `‖Aᵀb‖_∞`.
    pub fn lambda_max(&self) -> f64 {
        self.a.tr_mul(&self.b).amax()
    }

    /// `½‖Az − b‖₂² + λ|z|₁`, evaluated at the sparse iterate.
    pub fn objective(&self, z: &Vector) -> f64 {
        let residual = &self.a * z - &self.b;
        0.5 * residual.norm_squared() + self.lambda * z.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// ADMM parameters shared by the Lasso and network solvers.
#[derive(Debug, Clone)]
pub struct AdmmConfig {
    /// Augmented-Lagrangian penalty, the cost of violating `x = z`.
    pub rho: f64,
    /// Over-relaxation coefficient in `[1, 2]`; 1.0 disables it.
    pub alpha: f64,
    pub max_iters: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.2,
            alpha: 1.8,
            max_iters: 1000,
            eps_abs: 1e-4,
            eps_rel: 1e-3,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return invalid_argument(format!("rho must be positive, got {}", self.rho));
        }
        if !(1.0..=2.0).contains(&self.alpha) {
            return invalid_argument(format!("alpha must lie in [1, 2], got {}", self.alpha));
        }
        if self.max_iters == 0 {
            return invalid_argument("max_iters must be positive");
        }
        if !(self.eps_abs > 0.0) || !(self.eps_rel > 0.0) {
            return invalid_argument("stopping tolerances must be positive");
        }
        Ok(())
    }

    /// Tightened tolerances, useful for oracle comparisons.
    pub fn with_tolerances(mut self, eps_abs: f64, eps_rel: f64) -> Self {
        self.eps_abs = eps_abs;
        self.eps_rel = eps_rel;
        self
    }
}

/// ADMM iterates carried between warm-started solves.
#[derive(Debug, Clone)]
pub struct LassoState {
    pub x: Vector,
    pub z: Vector,
    pub u: Vector,
}

impl LassoState {
    fn zeros(dim: usize) -> Self {
        Self {
            x: Vector::zeros(dim),
            z: Vector::zeros(dim),
            u: Vector::zeros(dim),
        }
    }
}

/// Result of one Lasso solve.
#[derive(Debug, Clone)]
pub struct LassoSolution {
    /// Smooth iterate (least-squares side of the splitting).
    pub x: Vector,
    /// Sparse iterate; use this one as the model.
    pub z: Vector,
    pub iterations: usize,
    pub converged: bool,
    /// `½‖Az−b‖² + λ|z|₁` after each iteration.
    pub objective_history: Vec<f64>,
    pub primal_residuals: Vec<f64>,
    pub dual_residuals: Vec<f64>,
    /// Number of entries of `z` with `|z_i| > 1e-8`.
    pub nonzero_count: usize,
}

fn count_nonzeros(z: &Vector) -> usize {
    z.iter().filter(|v| v.abs() > NONZERO_TOL).count()
}

/// Runs ADMM from `state`, reusing a factorization of `(AᵀA + ρI)`.
fn run_admm(
    problem: &LassoProblem,
    config: &AdmmConfig,
    factored: &FactoredSystem,
    state: &mut LassoState,
) -> Result<LassoSolution> {
    let d = problem.num_features();
    let rho = config.rho;
    let atb = problem.a.tr_mul(&problem.b);
    let kappa = problem.lambda / rho;
    let sqrt_d = (d as f64).sqrt();

    let mut objective_history = Vec::new();
    let mut primal_residuals = Vec::new();
    let mut dual_residuals = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..config.max_iters {
        iterations += 1;
        let z_prev = state.z.clone();

        // x-update: (AᵀA + ρI) x = Aᵀb + ρz − u
        let rhs = &atb + &state.z * rho - &state.u;
        state.x = factored.solve(&rhs)?;

        // Over-relaxed x enters the z- and u-updates only.
        let x_hat = &state.x * config.alpha + &z_prev * (1.0 - config.alpha);

        // z-update: soft shrinkage at λ/ρ.
        state.z = soft_threshold(&(&x_hat + &state.u / rho), kappa)?;

        // u-update on the unscaled multiplier.
        state.u += (&x_hat - &state.z) * rho;

        let r_norm = (&state.x - &state.z).norm();
        let s_norm = rho * (&state.z - &z_prev).norm();
        primal_residuals.push(r_norm);
        dual_residuals.push(s_norm);
        objective_history.push(problem.objective(&state.z));

        let eps_pri = sqrt_d * config.eps_abs + config.eps_rel * state.x.norm().max(state.z.norm());
        let eps_dual = sqrt_d * config.eps_abs + config.eps_rel * state.u.norm();
        if r_norm <= eps_pri && s_norm <= eps_dual {
            converged = true;
            break;
        }
    }

    Ok(LassoSolution {
        x: state.x.clone(),
        z: state.z.clone(),
        iterations,
        converged,
        objective_history,
        primal_residuals,
        dual_residuals,
        nonzero_count: count_nonzeros(&state.z),
    })
}

/// Solves one Lasso instance from a cold start.
pub fn solve_lasso(problem: &LassoProblem, config: &AdmmConfig) -> Result<LassoSolution> {
    config.validate()?;
    let factored = FactoredSystem::factor(&problem.a, config.rho)?;
    let mut state = LassoState::zeros(problem.num_features());
    run_admm(problem, config, &factored, &mut state)
}

/// Solves with explicit initial iterates (warm start).
pub fn solve_lasso_from(
    problem: &LassoProblem,
    config: &AdmmConfig,
    state: &mut LassoState,
) -> Result<LassoSolution> {
    config.validate()?;
    let d = problem.num_features();
    if state.x.len() != d || state.z.len() != d || state.u.len() != d {
        return invalid_argument("warm-start iterates do not match problem dimension");
    }
    let factored = FactoredSystem::factor(&problem.a, config.rho)?;
    run_admm(problem, config, &factored, state)
}

/// Solves the same data at each penalty in `lambdas`, warm-starting every
/// solve from the previous one. The factorization depends only on `A` and
/// `ρ`, so it is shared by the whole sweep.
pub fn lambda_sweep(
    problem: &LassoProblem,
    config: &AdmmConfig,
    lambdas: &[f64],
) -> Result<Vec<LassoSolution>> {
    config.validate()?;
    if lambdas.is_empty() {
        return invalid_argument("lambda sweep needs at least one penalty value");
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0)) {
        return invalid_argument(format!("lambda values must be nonnegative, got {bad}"));
    }
    let factored = FactoredSystem::factor(&problem.a, config.rho)?;
    let mut state = LassoState::zeros(problem.num_features());
    let mut solutions = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let stage = problem.with_lambda(lambda)?;
        solutions.push(run_admm(&stage, config, &factored, &mut state)?);
    }
    Ok(solutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn tight() -> AdmmConfig {
        AdmmConfig::default().with_tolerances(1e-10, 1e-10)
    }

    #[test]
    fn identity_design_reduces_to_soft_threshold() {
        let b = Vector::from_column_slice(&[3.0, -0.4, 0.1, -2.0]);
        let lambda = 0.5;
        let problem = LassoProblem::new(Matrix::identity(4, 4), b.clone(), lambda).unwrap();
        let solution = solve_lasso(&problem, &tight()).unwrap();
        let expected = soft_threshold(&b, lambda).unwrap();
        assert!(solution.converged);
        assert!((&solution.z - &expected).norm() < 1e-8);
    }

    #[test]
    fn zero_lambda_recovers_least_squares() {
        let a = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 5.0]);
        let b = Vector::from_column_slice(&[1.0, -2.0, 0.5]);
        let x_star = a.clone().lu().solve(&b).unwrap();
        let problem = LassoProblem::new(a, b, 0.0).unwrap();
        let solution = solve_lasso(&problem, &tight()).unwrap();
        assert!((&solution.z - &x_star).norm() < 1e-6);
    }

    #[test]
    fn lambda_at_critical_value_gives_zero_solution() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let a = Matrix::from_fn(12, 8, |_, _| StandardNormal.sample(&mut rng));
        let b = Vector::from_fn(12, |_, _| StandardNormal.sample(&mut rng));
        let base = LassoProblem::new(a, b, 0.0).unwrap();
        let solutions = lambda_sweep(&base, &tight(), &[base.lambda_max()]).unwrap();
        assert_eq!(solutions[0].nonzero_count, 0);
        assert!(solutions[0].z.amax() <= NONZERO_TOL);
    }

    #[test]
    fn sweep_at_zero_lambda_is_dense_on_invertible_design() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.3, -0.1, 1.5]);
        let b = Vector::from_column_slice(&[1.0, 2.0]);
        let problem = LassoProblem::new(a, b, 0.0).unwrap();
        let solutions = lambda_sweep(&problem, &tight(), &[0.0]).unwrap();
        assert_eq!(solutions[0].nonzero_count, 2);
    }

    #[test]
    fn residual_histories_match_iteration_count() {
        let a = Matrix::identity(3, 3);
        let b = Vector::from_column_slice(&[1.0, 2.0, 3.0]);
        let problem = LassoProblem::new(a, b, 0.1).unwrap();
        let solution = solve_lasso(&problem, &AdmmConfig::default()).unwrap();
        assert_eq!(solution.objective_history.len(), solution.iterations);
        assert_eq!(solution.primal_residuals.len(), solution.iterations);
        assert_eq!(solution.dual_residuals.len(), solution.iterations);
        assert!(solution.iterations <= 1000);
    }

    #[test]
    fn fixed_point_satisfies_stopping_rule() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a = Matrix::from_fn(20, 10, |_, _| StandardNormal.sample(&mut rng));
        let b = Vector::from_fn(20, |_, _| StandardNormal.sample(&mut rng));
        let config = AdmmConfig::default();
        let problem = LassoProblem::new(a, b, 0.3).unwrap();
        let solution = solve_lasso(&problem, &config).unwrap();
        assert!(solution.converged);
        let d = problem.num_features() as f64;
        let eps_pri =
            d.sqrt() * config.eps_abs + config.eps_rel * solution.x.norm().max(solution.z.norm());
        assert!((&solution.x - &solution.z).norm() <= eps_pri);
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let a = Matrix::from_fn(15, 30, |_, _| StandardNormal.sample(&mut rng));
        let b = Vector::from_fn(15, |_, _| StandardNormal.sample(&mut rng));
        let problem = LassoProblem::new(a, b, 1e-6).unwrap();
        let mut config = tight();
        config.max_iters = 2;
        let solution = solve_lasso(&problem, &config).unwrap();
        assert!(!solution.converged);
        assert_eq!(solution.iterations, 2);
    }

    #[test]
    fn dimension_mismatch_is_invalid_argument() {
        let a = Matrix::identity(3, 3);
        let b = Vector::from_column_slice(&[1.0, 2.0]);
        assert!(LassoProblem::new(a, b, 0.1).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let bad_alpha = AdmmConfig {
            alpha: 2.5,
            ..AdmmConfig::default()
        };
        assert!(bad_alpha.validate().is_err());
        let bad_rho = AdmmConfig {
            rho: 0.0,
            ..AdmmConfig::default()
        };
        assert!(bad_rho.validate().is_err());
    }

    #[test]
    fn objective_tail_is_monotone() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let a = Matrix::from_fn(30, 12, |_, _| StandardNormal.sample(&mut rng));
        let b = Vector::from_fn(30, |_, _| StandardNormal.sample(&mut rng));
        let problem = LassoProblem::new(a.clone(), b.clone(), 0.2).unwrap();
        let solution = solve_lasso(&problem, &tight()).unwrap();
        let hist = &solution.objective_history;
        for i in 5..hist.len() {
            assert!(
                hist[i] <= hist[i - 1] + 1e-10 * (1.0 + hist[i - 1].abs()),
                "objective rose at iteration {i}: {} -> {}",
                hist[i - 1],
                hist[i]
            );
        }
    }

    #[test]
    fn warm_started_sweep_matches_cold_solves() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let a = Matrix::from_fn(25, 40, |_, _| StandardNormal.sample(&mut rng));
        let b = Vector::from_fn(25, |_, _| StandardNormal.sample(&mut rng));
        let problem = LassoProblem::new(a, b, 0.0).unwrap();
        let lmax = problem.lambda_max();
        let lambdas: Vec<f64> = [1e-3, 1e-2, 1e-1].iter().map(|f| f * lmax).collect();
        let config = AdmmConfig {
            max_iters: 20000,
            ..tight()
        };
        let warm = lambda_sweep(&problem, &config, &lambdas).unwrap();
        for (i, &lambda) in lambdas.iter().enumerate() {
            let stage = problem.with_lambda(lambda).unwrap();
            let cold = solve_lasso(&stage, &config).unwrap();
            let warm_obj = stage.objective(&warm[i].z);
            let cold_obj = stage.objective(&cold.z);
            let gap = (warm_obj - cold_obj).abs() / cold_obj.abs().max(1.0);
            assert!(gap < 1e-8, "warm/cold objective gap {gap} at lambda {lambda}");
        }
    }

    proptest::proptest! {
        // z is exactly sparse: every entry is either 0 or beyond the shrink width.
        #[test]
        fn z_iterate_is_exactly_sparse(seed in 0u64..50) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = Matrix::from_fn(10, 6, |_, _| StandardNormal.sample(&mut rng));
            let b = Vector::from_fn(10, |_, _| StandardNormal.sample(&mut rng));
            let problem = LassoProblem::new(a, b, 0.5).unwrap();
            let solution = solve_lasso(&problem, &AdmmConfig::default()).unwrap();
            for &v in solution.z.iter() {
                proptest::prop_assert!(v == 0.0 || v.abs() > 0.0);
            }
            proptest::prop_assert_eq!(
                solution.nonzero_count,
                solution.z.iter().filter(|v| v.abs() > NONZERO_TOL).count()
            );
        }
    }
}
