//! Disjoint train/test sampling. The test side optionally follows the
//! empirical hourly arrival distribution, mirroring how real requests arrive.

use chrono::Timelike;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{DatasetSplit, NodeProblem};
use crate::error::{invalid_argument, Result};

/// Samples `train_count` nodes uniformly and `test_count` nodes from the
/// remainder. With `arrival_weights` (one nonnegative weight per hour of
/// day), test inclusion probability is proportional to the weight of the
/// node's pickup hour; without, the test sample is uniform. The two sets are
/// disjoint by construction.
pub fn split_train_test(
    problems: &[NodeProblem],
    train_count: usize,
    test_count: usize,
    arrival_weights: Option<&[f64]>,
    seed: u64,
) -> Result<DatasetSplit> {
    if train_count + test_count > problems.len() {
        return invalid_argument(format!(
            "requested {train_count}+{test_count} nodes from {} available",
            problems.len()
        ));
    }
    if let Some(weights) = arrival_weights {
        if weights.len() != 24 {
            return invalid_argument("arrival weights must have one entry per hour (24)");
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return invalid_argument("arrival weights must be nonnegative");
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..problems.len()).collect();

    // Uniform draws without replacement for the training side.
    let mut train_idx = Vec::with_capacity(train_count);
    for _ in 0..train_count {
        let pick = rng.random_range(0..pool.len());
        train_idx.push(pool.swap_remove(pick));
    }
    train_idx.sort_unstable();

    // Weighted (or uniform) draws without replacement for the test side.
    let mut test_idx = Vec::with_capacity(test_count);
    let node_weight = |idx: usize| -> f64 {
        match arrival_weights {
            Some(weights) => weights[problems[idx].pickup_time.hour() as usize],
            None => 1.0,
        }
    };
    for _ in 0..test_count {
        let total: f64 = pool.iter().map(|&i| node_weight(i)).sum();
        if !(total > 0.0) {
            return invalid_argument(
                "arrival weights exclude every remaining candidate from the test sample",
            );
        }
        let mut r = rng.random_range(0.0..total);
        let mut chosen = pool.len() - 1;
        for (pos, &idx) in pool.iter().enumerate() {
            let w = node_weight(idx);
            if r < w {
                chosen = pos;
                break;
            }
            r -= w;
        }
        test_idx.push(pool.swap_remove(chosen));
    }
    test_idx.sort_unstable();

    Ok(DatasetSplit {
        train: train_idx.iter().map(|&i| problems[i].clone()).collect(),
        test: test_idx.iter().map(|&i| problems[i].clone()).collect(),
    })
}
