//! Feature engineering for trip records: numeric attributes plus one-hot
//! categoricals, standardized to zero mean and unit variance, with the
//! intercept appended last.
//!
//! The response is `total_amount`. `fare_amount` is deliberately not a
//! regression feature: the total is the fare plus its components, so
//! including it would leak the response. It still participates in the
//! correlation statistics.

use super::{NodeProblem, TripRecord};
use crate::error::{invalid_argument, Result};
use crate::numerics::Vector;
use crate::table::Table;

const NUMERIC_COLUMNS: [&str; 8] = [
    "trip_distance",
    "passenger_count",
    "extra",
    "mta_tax",
    "tip_amount",
    "toll_amount",
    "surcharge",
    "trip_duration_min",
];

fn numeric_value(record: &TripRecord, column: &str) -> f64 {
    match column {
        "trip_distance" => record.trip_distance,
        "passenger_count" => record.passenger_count as f64,
        "extra" => record.extra,
        "mta_tax" => record.mta_tax,
        "tip_amount" => record.tip_amount,
        "toll_amount" => record.toll_amount,
        "surcharge" => record.surcharge,
        "trip_duration_min" => record.trip_duration_minutes(),
        other => unreachable!("unknown numeric column {other}"),
    }
}

/// Fitted standardization: per-column mean and standard deviation plus the
/// observed categorical levels. Zero-variance columns are centered but not
/// scaled, so they contribute a constant 0 and are listed in
/// `zero_variance`.
#[derive(Debug, Clone)]
pub struct Featurizer {
    columns: Vec<String>,
    means: Vec<f64>,
    stds: Vec<f64>,
    pay_types: Vec<String>,
    trip_types: Vec<String>,
    zero_variance: Vec<String>,
}

impl Featurizer {
    /// Learns means, deviations and categorical levels from `records`.
    pub fn fit(records: &[TripRecord]) -> Result<Self> {
        if records.is_empty() {
            return invalid_argument("featurize needs at least one record");
        }
        let mut pay_types: Vec<String> = records.iter().map(|r| r.pay_type.clone()).collect();
        pay_types.sort();
        pay_types.dedup();
        let mut trip_types: Vec<String> = records.iter().map(|r| r.trip_type.clone()).collect();
        trip_types.sort();
        trip_types.dedup();

        let mut columns: Vec<String> = NUMERIC_COLUMNS.iter().map(|c| c.to_string()).collect();
        columns.extend(pay_types.iter().map(|v| format!("pay_type={v}")));
        columns.extend(trip_types.iter().map(|v| format!("trip_type={v}")));

        let mut featurizer = Self {
            columns,
            means: Vec::new(),
            stds: Vec::new(),
            pay_types,
            trip_types,
            zero_variance: Vec::new(),
        };

        let n = records.len() as f64;
        let raw: Vec<Vec<f64>> = records.iter().map(|r| featurizer.raw_row(r)).collect();
        for (c, name) in featurizer.columns.clone().iter().enumerate() {
            let mean = raw.iter().map(|row| row[c]).sum::<f64>() / n;
            let var = raw.iter().map(|row| (row[c] - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            featurizer.means.push(mean);
            if std > 1e-12 {
                featurizer.stds.push(std);
            } else {
                featurizer.stds.push(1.0);
                featurizer.zero_variance.push(name.clone());
            }
        }
        Ok(featurizer)
    }

    fn raw_row(&self, record: &TripRecord) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.columns.len());
        for column in NUMERIC_COLUMNS {
            row.push(numeric_value(record, column));
        }
        for level in &self.pay_types {
            row.push(if record.pay_type == *level { 1.0 } else { 0.0 });
        }
        for level in &self.trip_types {
            row.push(if record.trip_type == *level { 1.0 } else { 0.0 });
        }
        row
    }

    /// Feature names in vector order, excluding the trailing intercept.
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Columns that were constant in the training data.
    pub fn zero_variance(&self) -> &[String] {
        &self.zero_variance
    }

    /// Standardized feature count including the intercept.
    pub fn feature_len(&self) -> usize {
        self.columns.len() + 1
    }

    pub fn mean(&self, column: usize) -> f64 {
        self.means[column]
    }

    pub fn std(&self, column: usize) -> f64 {
        self.stds[column]
    }

    /// Maps records to node problems using the fitted statistics; node ids
    /// are positions in `records`.
    pub fn transform(&self, records: &[TripRecord]) -> Vec<NodeProblem> {
        records
            .iter()
            .enumerate()
            .map(|(id, record)| {
                let raw = self.raw_row(record);
                let mut features = Vec::with_capacity(raw.len() + 1);
                for (c, value) in raw.iter().enumerate() {
                    features.push((value - self.means[c]) / self.stds[c]);
                }
                features.push(1.0);
                NodeProblem::new(
                    id,
                    Vector::from_vec(features),
                    record.total_amount,
                    record.pickup_lat,
                    record.pickup_lon,
                    record.pickup_time,
                )
            })
            .collect()
    }
}

/// Fits a [`Featurizer`] on `records` and transforms them in one step.
pub fn featurize(records: &[TripRecord]) -> Result<(Vec<NodeProblem>, Featurizer)> {
    let featurizer = Featurizer::fit(records)?;
    let problems = featurizer.transform(records);
    Ok((problems, featurizer))
}

impl Featurizer {
    /// Serializes the fitted statistics as a `column,mean,std` table,
    /// with categorical levels encoded in the column names.
    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&["column", "mean", "std"]);
        for (c, name) in self.columns.iter().enumerate() {
            table.push_row(&[
                name.clone(),
                self.means[c].to_string(),
                self.stds[c].to_string(),
            ]);
        }
        table
    }

    /// Rebuilds a featurizer from [`Featurizer::to_table`] output.
    pub fn from_table(table: &Table) -> Result<Self> {
        let name_col = table.column("column")?;
        let mean_col = table.column("mean")?;
        let std_col = table.column("std")?;
        let mut columns = Vec::new();
        let mut means = Vec::new();
        let mut stds = Vec::new();
        let mut pay_types = Vec::new();
        let mut trip_types = Vec::new();
        for row in table.rows() {
            let name = row[name_col].clone();
            let mean: f64 = row[mean_col]
                .parse()
                .map_err(|_| bad_scaler(&name, "mean"))?;
            let std: f64 = row[std_col].parse().map_err(|_| bad_scaler(&name, "std"))?;
            if let Some(level) = name.strip_prefix("pay_type=") {
                pay_types.push(level.to_string());
            } else if let Some(level) = name.strip_prefix("trip_type=") {
                trip_types.push(level.to_string());
            } else if !NUMERIC_COLUMNS.contains(&name.as_str()) {
                return invalid_argument(format!("unknown scaler column `{name}`"));
            }
            if std <= 0.0 {
                return invalid_argument(format!("scaler column `{name}` has std {std}"));
            }
            columns.push(name);
            means.push(mean);
            stds.push(std);
        }
        if columns.is_empty() {
            return invalid_argument("scaler table is empty");
        }
        Ok(Self {
            columns,
            means,
            stds,
            pay_types,
            trip_types,
            // Not recoverable from the table; only affects fit-time reports.
            zero_variance: Vec::new(),
        })
    }
}

fn bad_scaler(name: &str, field: &str) -> crate::error::CoreError {
    crate::error::CoreError::InvalidArgument(format!(
        "scaler column `{name}` has an unparseable {field}"
    ))
}
