//! Green-taxi CSV ingestion with a configurable header mapping.
//!
//! Rows violating the record invariants (missing coordinates, negative
//! amounts, inverted timestamps, unparseable fields) are dropped and counted
//! rather than failing the load.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDateTime;

use super::TripRecord;
use crate::error::{CoreError, Result};

pub(crate) const TIME_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// Canonical column names in record-field order.
const CANONICAL: [&str; 21] = [
    "vendor_id",
    "pickup_time",
    "dropoff_time",
    "store_flag",
    "rate_code",
    "pickup_lon",
    "pickup_lat",
    "dropoff_lon",
    "dropoff_lat",
    "passenger_count",
    "trip_distance",
    "fare_amount",
    "extra",
    "mta_tax",
    "tip_amount",
    "toll_amount",
    "ehail_fee",
    "surcharge",
    "total_amount",
    "pay_type",
    "trip_type",
];

/// Header names used by the 2015 green-taxi release, in canonical order.
const GREEN_2015_HEADERS: [&str; 21] = [
    "VendorID",
    "lpep_pickup_datetime",
    "Lpep_dropoff_datetime",
    "Store_and_fwd_flag",
    "RateCodeID",
    "Pickup_longitude",
    "Pickup_latitude",
    "Dropoff_longitude",
    "Dropoff_latitude",
    "Passenger_count",
    "Trip_distance",
    "Fare_amount",
    "Extra",
    "MTA_tax",
    "Tip_amount",
    "Tolls_amount",
    "Ehail_fee",
    "improvement_surcharge",
    "Total_amount",
    "Payment_type",
    "Trip_type",
];

/// Maps canonical column names to the CSV headers of a particular file.
#[derive(Debug, Clone)]
pub struct SchemaMap {
    headers: BTreeMap<String, String>,
}

impl Default for SchemaMap {
    /// The 2015 green-taxi header layout.
    fn default() -> Self {
        let headers = CANONICAL
            .iter()
            .zip(GREEN_2015_HEADERS)
            .map(|(c, h)| (c.to_string(), h.to_string()))
            .collect();
        Self { headers }
    }
}

impl SchemaMap {
    /// Parses `canonical_name=csv_header` lines; unlisted columns keep their
    /// default header. Blank lines and `#` comments are ignored.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut map = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::InvalidArgument(format!(
                    "schema config line {} is not key=value: `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !CANONICAL.contains(&key) {
                return Err(CoreError::InvalidArgument(format!(
                    "unknown canonical column `{key}` in schema config"
                )));
            }
            map.headers.insert(key.to_string(), value.to_string());
        }
        Ok(map)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    pub fn header_for(&self, canonical: &str) -> &str {
        &self.headers[canonical]
    }
}

/// Outcome counters for one load: rows seen, rows kept and per-reason drops.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub total_rows: usize,
    pub loaded: usize,
    pub dropped: usize,
    pub drop_reasons: BTreeMap<String, usize>,
}

impl LoadReport {
    fn drop_row(&mut self, reason: &str) {
        self.dropped += 1;
        *self.drop_reasons.entry(reason.to_string()).or_insert(0) += 1;
    }
}

struct ColumnIndex {
    idx: [usize; 21],
}

impl ColumnIndex {
    fn build(headers: &csv::StringRecord, schema: &SchemaMap) -> Result<Self> {
        let mut idx = [0usize; 21];
        for (slot, canonical) in CANONICAL.iter().enumerate() {
            let wanted = schema.header_for(canonical);
            let found = headers
                .iter()
                .position(|h| h.trim() == wanted)
                .ok_or_else(|| CoreError::Schema {
                    column: wanted.to_string(),
                })?;
            idx[slot] = found;
        }
        Ok(Self { idx })
    }

    fn get<'a>(&self, row: &'a csv::StringRecord, slot: usize) -> &'a str {
        row.get(self.idx[slot]).unwrap_or("").trim()
    }
}

fn parse_row(cols: &ColumnIndex, row: &csv::StringRecord) -> std::result::Result<TripRecord, &'static str> {
    let time = |slot: usize| -> std::result::Result<NaiveDateTime, &'static str> {
        NaiveDateTime::parse_from_str(cols.get(row, slot), TIME_FORMAT)
            .map_err(|_| "unparseable timestamp")
    };
    let num = |slot: usize| -> std::result::Result<f64, &'static str> {
        cols.get(row, slot)
            .parse::<f64>()
            .map_err(|_| "unparseable number")
    };

    let pickup_time = time(1)?;
    let dropoff_time = time(2)?;
    let pickup_lon = num(5)?;
    let pickup_lat = num(6)?;
    let dropoff_lon = num(7)?;
    let dropoff_lat = num(8)?;
    let passenger_count = cols
        .get(row, 9)
        .parse::<u32>()
        .map_err(|_| "unparseable number")?;
    // Ehail fee is almost always empty in the source files; impute zero.
    let ehail_raw = cols.get(row, 16);
    let ehail_fee = if ehail_raw.is_empty() {
        0.0
    } else {
        ehail_raw.parse::<f64>().map_err(|_| "unparseable number")?
    };

    let record = TripRecord {
        vendor_id: cols.get(row, 0).to_string(),
        pickup_time,
        dropoff_time,
        store_flag: cols.get(row, 3).to_string(),
        rate_code: cols.get(row, 4).to_string(),
        pickup_lon,
        pickup_lat,
        dropoff_lon,
        dropoff_lat,
        passenger_count,
        trip_distance: num(10)?,
        fare_amount: num(11)?,
        extra: num(12)?,
        mta_tax: num(13)?,
        tip_amount: num(14)?,
        toll_amount: num(15)?,
        ehail_fee,
        surcharge: num(17)?,
        total_amount: num(18)?,
        pay_type: cols.get(row, 19).to_string(),
        trip_type: cols.get(row, 20).to_string(),
    };

    if (record.pickup_lat == 0.0 && record.pickup_lon == 0.0)
        || (record.dropoff_lat == 0.0 && record.dropoff_lon == 0.0)
    {
        return Err("missing coordinates");
    }
    let lat_ok = |lat: f64| (-90.0..=90.0).contains(&lat);
    let lon_ok = |lon: f64| (-180.0..=180.0).contains(&lon);
    if !lat_ok(record.pickup_lat)
        || !lat_ok(record.dropoff_lat)
        || !lon_ok(record.pickup_lon)
        || !lon_ok(record.dropoff_lon)
    {
        return Err("coordinates out of range");
    }
    if record.dropoff_time < record.pickup_time {
        return Err("negative duration");
    }
    if record.trip_distance < 0.0 {
        return Err("negative distance");
    }
    if record.fare_amount < 0.0 || record.total_amount < 0.0 {
        return Err("negative amount");
    }
    Ok(record)
}

/// Loads trip records from a headered CSV, dropping and counting rows that
/// fail the record invariants. A missing mandatory column is a schema error
/// naming that column.
pub fn load_trips(path: &Path, schema: &SchemaMap) -> Result<(Vec<TripRecord>, LoadReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let cols = ColumnIndex::build(&headers, schema)?;

    let mut report = LoadReport::default();
    let mut records = Vec::new();
    for row in reader.records() {
        report.total_rows += 1;
        let row = match row {
            Ok(row) => row,
            Err(_) => {
                report.drop_row("unreadable row");
                continue;
            }
        };
        match parse_row(&cols, &row) {
            Ok(record) => {
                report.loaded += 1;
                records.push(record);
            }
            Err(reason) => report.drop_row(reason),
        }
    }
    Ok((records, report))
}

/// Writes records as CSV using the default 2015 header layout. Loading the
/// result reproduces the records field-for-field.
pub fn write_trips(path: &Path, records: &[TripRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(GREEN_2015_HEADERS)?;
    for r in records {
        writer.write_record(&[
            r.vendor_id.clone(),
            r.pickup_time.format(TIME_FORMAT).to_string(),
            r.dropoff_time.format(TIME_FORMAT).to_string(),
            r.store_flag.clone(),
            r.rate_code.clone(),
            r.pickup_lon.to_string(),
            r.pickup_lat.to_string(),
            r.dropoff_lon.to_string(),
            r.dropoff_lat.to_string(),
            r.passenger_count.to_string(),
            r.trip_distance.to_string(),
            r.fare_amount.to_string(),
            r.extra.to_string(),
            r.mta_tax.to_string(),
            r.tip_amount.to_string(),
            r.toll_amount.to_string(),
            if r.ehail_fee == 0.0 {
                String::new()
            } else {
                r.ehail_fee.to_string()
            },
            r.surcharge.to_string(),
            r.total_amount.to_string(),
            r.pay_type.clone(),
            r.trip_type.clone(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn fixture_row(pickup_lat: f64, pickup_lon: f64) -> String {
        format!(
            "2,2015-01-01 08:15:00,2015-01-01 08:32:00,N,1,{pickup_lon},{pickup_lat},-73.95,40.71,1,2.5,11,0.5,0.5,2,0,,0.3,14.3,1,1"
        )
    }

    fn write_fixture(rows: &[String]) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "{}", GREEN_2015_HEADERS.join(",")).unwrap();
        for row in rows {
            writeln!(file, "{row}").unwrap();
        }
        file
    }

    #[test]
    fn well_formed_rows_all_load() {
        let file = write_fixture(&[
            fixture_row(40.70, -73.95),
            fixture_row(40.71, -73.96),
            fixture_row(40.72, -73.97),
        ]);
        let (records, report) = load_trips(file.path(), &SchemaMap::default()).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(report.dropped, 0);
        assert_eq!(report.loaded, 3);
        assert_eq!(records[0].total_amount, 14.3);
        assert_eq!(records[0].ehail_fee, 0.0);
    }

    #[test]
    fn zero_coordinate_row_is_dropped_and_counted() {
        let file = write_fixture(&[fixture_row(40.70, -73.95), fixture_row(0.0, 0.0)]);
        let (records, report) = load_trips(file.path(), &SchemaMap::default()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(report.dropped, 1);
        assert_eq!(report.drop_reasons["missing coordinates"], 1);
    }

    #[test]
    fn unparseable_row_is_skipped() {
        let mut bad = fixture_row(40.70, -73.95);
        bad = bad.replace("2015-01-01 08:15:00", "not-a-date");
        let file = write_fixture(&[bad, fixture_row(40.71, -73.96)]);
        let (records, report) = load_trips(file.path(), &SchemaMap::default()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(report.drop_reasons["unparseable timestamp"], 1);
    }

    #[test]
    fn missing_column_is_a_schema_error() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "VendorID,lpep_pickup_datetime").unwrap();
        writeln!(file, "2,2015-01-01 08:15:00").unwrap();
        let err = load_trips(file.path(), &SchemaMap::default()).unwrap_err();
        match err {
            CoreError::Schema { column } => assert_eq!(column, "Lpep_dropoff_datetime"),
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn schema_config_renames_headers() {
        let schema =
            SchemaMap::from_config_str("pickup_time=start\n# comment\ndropoff_time=end\n").unwrap();
        assert_eq!(schema.header_for("pickup_time"), "start");
        assert_eq!(schema.header_for("dropoff_time"), "end");
        assert_eq!(schema.header_for("vendor_id"), "VendorID");
        assert!(SchemaMap::from_config_str("nonsense=x").is_err());
        assert!(SchemaMap::from_config_str("no equals sign").is_err());
    }

    #[test]
    fn negative_amount_and_inverted_times_are_dropped() {
        let negative = fixture_row(40.70, -73.95).replace(",14.3,", ",-1.0,");
        let inverted = fixture_row(40.70, -73.95)
            .replace("2015-01-01 08:32:00", "2015-01-01 08:01:00");
        let file = write_fixture(&[negative, inverted]);
        let (records, report) = load_trips(file.path(), &SchemaMap::default()).unwrap();
        assert!(records.is_empty());
        assert_eq!(report.drop_reasons["negative amount"], 1);
        assert_eq!(report.drop_reasons["negative duration"], 1);
    }

    #[test]
    fn write_then_load_round_trips() {
        let file = write_fixture(&[
            fixture_row(40.701, -73.951),
            fixture_row(40.712, -73.962),
        ]);
        let (records, _) = load_trips(file.path(), &SchemaMap::default()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_trips(out.path(), &records).unwrap();
        let (reloaded, report) = load_trips(out.path(), &SchemaMap::default()).unwrap();
        assert_eq!(records, reloaded);
        assert_eq!(report.dropped, 0);
    }
}
