//! Trip data: synthetic ride generation, green-taxi CSV ingestion, feature
//! standardization, train/test sampling and descriptive statistics.

mod featurize;
mod load;
mod split;
mod stats;
mod synth;

pub use featurize::{featurize, Featurizer};
pub use load::{load_trips, write_trips, LoadReport, SchemaMap};
pub use split::split_train_test;
pub use stats::{emit_stats, hourly_counts, StatKind};
pub use synth::{
    generate_synthetic_lasso, generate_synthetic_rides, rides_design_matrix, RideCoeffs,
};

use chrono::NaiveDateTime;

use crate::numerics::Vector;

/// One green-taxi trip row, as described by the dataset's attribute table.
#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub vendor_id: String,
    pub pickup_time: NaiveDateTime,
    pub dropoff_time: NaiveDateTime,
    pub store_flag: String,
    pub rate_code: String,
    pub pickup_lon: f64,
    pub pickup_lat: f64,
    pub dropoff_lon: f64,
    pub dropoff_lat: f64,
    pub passenger_count: u32,
    pub trip_distance: f64,
    pub fare_amount: f64,
    pub extra: f64,
    pub mta_tax: f64,
    pub tip_amount: f64,
    pub toll_amount: f64,
    pub ehail_fee: f64,
    pub surcharge: f64,
    pub total_amount: f64,
    pub pay_type: String,
    pub trip_type: String,
}

impl TripRecord {
    pub fn trip_duration_minutes(&self) -> f64 {
        (self.dropoff_time - self.pickup_time).num_seconds() as f64 / 60.0
    }
}

/// One synthetic ride request with its modeled utility.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRide {
    /// Past shared-ride rating, integer in [1, 10].
    pub ratings: u8,
    /// Commuter sharing preference, integer in [1, 10].
    pub preferences: u8,
    /// Requested pickup-time flag, 0 or 1.
    pub pickup_time_flag: u8,
    /// Requested pickup location coordinate in [0, 30].
    pub pickup_loc: f64,
    /// Ride cost in [0, 1].
    pub cost: f64,
    /// Modeled utility response.
    pub utility: f64,
}

/// Per-node regression datum: standardized features (with a trailing
/// intercept term), a scalar response, and the spatio-temporal data kept
/// aside for graph construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeProblem {
    pub node_id: usize,
    pub features: Vector,
    pub response: f64,
    pub pickup_lat: f64,
    pub pickup_lon: f64,
    pub pickup_time: NaiveDateTime,
}

impl NodeProblem {
    pub fn new(
        node_id: usize,
        features: Vector,
        response: f64,
        pickup_lat: f64,
        pickup_lon: f64,
        pickup_time: NaiveDateTime,
    ) -> Self {
        Self {
            node_id,
            features,
            response,
            pickup_lat,
            pickup_lon,
            pickup_time,
        }
    }

    /// A bare node carrying only coordinates, for graph-level work.
    pub fn at_location(node_id: usize, pickup_lat: f64, pickup_lon: f64) -> Self {
        Self {
            node_id,
            features: Vector::zeros(0),
            response: 0.0,
            pickup_lat,
            pickup_lon,
            pickup_time: epoch_start(),
        }
    }
}

pub(crate) fn epoch_start() -> NaiveDateTime {
    chrono::DateTime::from_timestamp(0, 0).unwrap().naive_utc()
}

/// Disjoint train/test node sets.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<NodeProblem>,
    pub test: Vec<NodeProblem>,
}
