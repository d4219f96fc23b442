//! Seeded synthetic data: sparse Gaussian Lasso instances and linear-utility
//! ride requests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::SyntheticRide;
use crate::error::{invalid_argument, Result};
use crate::lasso::LassoProblem;
use crate::numerics::{Matrix, Vector};

/// Generates a sparse-design Lasso instance: `A` is standard-normal with an
/// expected fraction `density` of nonzeros, the ground truth is an equally
/// sparse normal vector, and `b = A·x* + noise_sigma·N(0, I)`.
///
/// Returns the problem (with `lambda = 0`; sweeps set it later) together with
/// the planted ground truth. Bit-deterministic for a fixed seed.
pub fn generate_synthetic_lasso(
    n: usize,
    d: usize,
    density: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<(LassoProblem, Vector)> {
    if n == 0 || d == 0 {
        return invalid_argument("n and d must be at least 1");
    }
    if !(density > 0.0 && density <= 1.0) {
        return invalid_argument(format!("density must lie in (0, 1], got {density}"));
    }
    if !(noise_sigma >= 0.0) {
        return invalid_argument(format!("noise_sigma must be nonnegative, got {noise_sigma}"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut a = Matrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            if rng.random::<f64>() < density {
                a[(i, j)] = StandardNormal.sample(&mut rng);
            }
        }
    }
    let mut x_star = Vector::zeros(d);
    for j in 0..d {
        if rng.random::<f64>() < density {
            x_star[j] = StandardNormal.sample(&mut rng);
        }
    }
    let mut b = &a * &x_star;
    if noise_sigma > 0.0 {
        for i in 0..n {
            let noise: f64 = StandardNormal.sample(&mut rng);
            b[i] += noise_sigma * noise;
        }
    }
    Ok((LassoProblem::new(a, b, 0.0)?, x_star))
}

/// Ride-utility coefficients `(a, b, c, d, e)`; the cost term enters with a
/// negative sign: `utility = a·ratings + b·preferences + c·pickup_time +
/// d·pickup_loc − e·cost`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RideCoeffs {
    pub ratings: f64,
    pub preferences: f64,
    pub pickup_time: f64,
    pub pickup_loc: f64,
    pub cost: f64,
}

impl RideCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64) -> Self {
        Self {
            ratings: a,
            preferences: b,
            pickup_time: c,
            pickup_loc: d,
            cost: e,
        }
    }

    pub fn utility(&self, ride: &SyntheticRide) -> f64 {
        self.ratings * ride.ratings as f64
            + self.preferences * ride.preferences as f64
            + self.pickup_time * ride.pickup_time_flag as f64
            + self.pickup_loc * ride.pickup_loc
            - self.cost * ride.cost
    }
}

/// Draws `m` rides with variables uniform over their documented ranges and
/// utilities from the linear model plus optional Gaussian noise.
pub fn generate_synthetic_rides(
    m: usize,
    coeffs: RideCoeffs,
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<SyntheticRide>> {
    if m == 0 {
        return invalid_argument("m must be at least 1");
    }
    if !(noise_sigma >= 0.0) {
        return invalid_argument(format!("noise_sigma must be nonnegative, got {noise_sigma}"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rides = Vec::with_capacity(m);
    for _ in 0..m {
        let mut ride = SyntheticRide {
            ratings: rng.random_range(1..=10),
            preferences: rng.random_range(1..=10),
            pickup_time_flag: rng.random_range(0..=1),
            pickup_loc: rng.random_range(0.0..=30.0),
            cost: rng.random_range(0.0..=1.0),
            utility: 0.0,
        };
        ride.utility = coeffs.utility(&ride);
        if noise_sigma > 0.0 {
            let noise: f64 = StandardNormal.sample(&mut rng);
            ride.utility += noise_sigma * noise;
        }
        rides.push(ride);
    }
    Ok(rides)
}

/// Stacks rides into a regression design: one row per ride with columns
/// `[ratings, preferences, pickup_time_flag, pickup_loc, cost]`, plus the
/// utility response vector.
pub fn rides_design_matrix(rides: &[SyntheticRide]) -> (Matrix, Vector) {
    let a = Matrix::from_fn(rides.len(), 5, |i, j| {
        let r = &rides[i];
        match j {
            0 => r.ratings as f64,
            1 => r.preferences as f64,
            2 => r.pickup_time_flag as f64,
            3 => r.pickup_loc,
            _ => r.cost,
        }
    });
    let b = Vector::from_fn(rides.len(), |i, _| rides[i].utility);
    (a, b)
}
