//! Descriptive statistics emitted as plot-ready tables: request histograms,
//! pickup/dropoff time pairs and the feature correlation matrix.

use chrono::{Datelike, Timelike};

use super::TripRecord;
use crate::error::{invalid_argument, Result};
use crate::table::Table;

/// The statistic families the CLI can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    /// Requests per day of week (Monday through Sunday).
    WeekdayHist,
    /// Requests per hour of day (0 through 23).
    HourHist,
    /// Requests per day of month (1 through 31).
    DayOfMonthHist,
    /// One `(pickup, dropoff)` epoch-second pair per record.
    PickupDropoffPairs,
    /// Pearson correlation matrix over the numeric trip attributes.
    FeatureCorrelation,
}

impl StatKind {
    pub const ALL: [StatKind; 5] = [
        StatKind::WeekdayHist,
        StatKind::HourHist,
        StatKind::DayOfMonthHist,
        StatKind::PickupDropoffPairs,
        StatKind::FeatureCorrelation,
    ];

    /// Stable artifact name for exports.
    pub fn name(&self) -> &'static str {
        match self {
            StatKind::WeekdayHist => "weekday_hist",
            StatKind::HourHist => "hour_hist",
            StatKind::DayOfMonthHist => "day_of_month_hist",
            StatKind::PickupDropoffPairs => "pickup_dropoff_pairs",
            StatKind::FeatureCorrelation => "feature_correlation",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        StatKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| {
                crate::error::CoreError::InvalidArgument(format!("unknown statistic `{name}`"))
            })
    }
}

/// Numeric attributes entering the correlation matrix. Unlike the regression
/// features, the fare belongs here.
const CORRELATION_COLUMNS: [&str; 10] = [
    "trip_distance",
    "passenger_count",
    "fare_amount",
    "extra",
    "mta_tax",
    "tip_amount",
    "toll_amount",
    "surcharge",
    "total_amount",
    "trip_duration_min",
];

fn correlation_value(record: &TripRecord, column: &str) -> f64 {
    match column {
        "trip_distance" => record.trip_distance,
        "passenger_count" => record.passenger_count as f64,
        "fare_amount" => record.fare_amount,
        "extra" => record.extra,
        "mta_tax" => record.mta_tax,
        "tip_amount" => record.tip_amount,
        "toll_amount" => record.toll_amount,
        "surcharge" => record.surcharge,
        "total_amount" => record.total_amount,
        "trip_duration_min" => record.trip_duration_minutes(),
        other => unreachable!("unknown correlation column {other}"),
    }
}

/// Computes one statistic table. Histograms include zero-count bins so the
/// table shape is fixed; constant columns are left out of the correlation
/// matrix since their correlation is undefined.
pub fn emit_stats(records: &[TripRecord], kind: StatKind) -> Result<Table> {
    if records.is_empty() {
        return invalid_argument("no valid records");
    }
    match kind {
        StatKind::WeekdayHist => {
            let mut counts = [0u64; 7];
            for r in records {
                counts[r.pickup_time.weekday().num_days_from_monday() as usize] += 1;
            }
            let mut table = Table::new(&["weekday", "count"]);
            let names = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
            for (name, count) in names.iter().zip(counts) {
                table.push_row(&[name.to_string(), count.to_string()]);
            }
            Ok(table)
        }
        StatKind::HourHist => {
            let mut counts = [0u64; 24];
            for r in records {
                counts[r.pickup_time.hour() as usize] += 1;
            }
            let mut table = Table::new(&["hour", "count"]);
            for (hour, count) in counts.iter().enumerate() {
                table.push_row(&[hour.to_string(), count.to_string()]);
            }
            Ok(table)
        }
        StatKind::DayOfMonthHist => {
            let mut counts = [0u64; 31];
            for r in records {
                counts[(r.pickup_time.day() - 1) as usize] += 1;
            }
            let mut table = Table::new(&["day", "count"]);
            for (day, count) in counts.iter().enumerate() {
                table.push_row(&[(day + 1).to_string(), count.to_string()]);
            }
            Ok(table)
        }
        StatKind::PickupDropoffPairs => {
            let mut table = Table::new(&["pickup_s", "dropoff_s"]);
            for r in records {
                table.push_row(&[
                    r.pickup_time.and_utc().timestamp().to_string(),
                    r.dropoff_time.and_utc().timestamp().to_string(),
                ]);
            }
            Ok(table)
        }
        StatKind::FeatureCorrelation => correlation_table(records),
    }
}

fn correlation_table(records: &[TripRecord]) -> Result<Table> {
    let n = records.len() as f64;
    let mut kept = Vec::new();
    let mut centered: Vec<Vec<f64>> = Vec::new();
    let mut norms = Vec::new();
    for column in CORRELATION_COLUMNS {
        let values: Vec<f64> = records.iter().map(|r| correlation_value(r, column)).collect();
        let mean = values.iter().sum::<f64>() / n;
        let deviations: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let norm = deviations.iter().map(|d| d * d).sum::<f64>().sqrt();
        if norm > 1e-12 {
            kept.push(column);
            centered.push(deviations);
            norms.push(norm);
        }
    }
    let mut headers = vec!["feature".to_string()];
    headers.extend(kept.iter().map(|c| c.to_string()));
    let mut table = Table::from_headers(headers);
    for i in 0..kept.len() {
        let mut row = vec![kept[i].to_string()];
        for j in 0..kept.len() {
            let value = if i == j {
                1.0
            } else {
                let dot: f64 = centered[i]
                    .iter()
                    .zip(&centered[j])
                    .map(|(a, b)| a * b)
                    .sum();
                dot / (norms[i] * norms[j])
            };
            row.push(value.to_string());
        }
        table.push_row(&row);
    }
    Ok(table)
}

/// Hourly pickup counts, reusable as arrival weights for test sampling.
pub fn hourly_counts(records: &[TripRecord]) -> [f64; 24] {
    let mut counts = [0.0f64; 24];
    for r in records {
        counts[r.pickup_time.hour() as usize] += 1.0;
    }
    counts
}
