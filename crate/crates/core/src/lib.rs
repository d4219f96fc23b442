//! ADMM Lasso and Network Lasso over trip-similarity graphs.
//!
//! The crate learns per-trip regression models, forces consensus along the
//! edges of a k-nearest-neighbor graph built from pickup coordinates,
//! extracts clusters of trips sharing one model, and predicts fares for
//! unseen trip requests from their cluster membership.
//!
//! Module map:
//! - [`numerics`]: proximal operators and the shared linear-system kernel.
//! - [`lasso`]: vanilla ADMM Lasso with over-relaxation and λ sweeps.
//! - [`trip`]: synthetic ride generation, green-taxi CSV ingestion,
//!   standardization, train/test sampling and descriptive statistics.
//! - [`graph`]: k-NN trip graph, haversine distances and spatial components.
//! - [`network`]: the Network Lasso solver, regularization paths, cluster
//!   extraction and fare prediction.
//! - [`table`]: the CSV table type every exporter renders to.

// Validation predicates are written `!(x >= 0.0)` on purpose: the negated
// form rejects NaN, which the "simpler" `x < 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod lasso;
pub mod network;
pub mod numerics;
pub mod table;
pub mod trip;

pub use error::{CoreError, Result};
