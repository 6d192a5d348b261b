//! Measurement logs: parsing, RSSI calibration, geolocation and the
//! RSSI-to-path-loss link budget.

use std::io::Read;

use chrono::{DateTime, NaiveDateTime};
use serde::Serialize;

use crate::config::CampaignConfig;
use crate::error::{Error, Result};
use crate::fit::SampleSet;
use crate::geometry::{great_circle_distance, GeoPoint};
use crate::models::RadioConfig;

/// Parses an ISO-8601 UTC timestamp into Unix seconds. Offsets other than
/// `Z` are converted; timestamps without an offset are taken as UTC.
pub fn parse_timestamp(s: &str) -> Result<i64> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t.and_utc().timestamp());
        }
    }
    Err(Error::Parse(format!("invalid timestamp '{s}'")))
}

pub fn format_timestamp(t: i64) -> String {
    DateTime::from_timestamp(t, 0)
        .map(|t| t.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| t.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    /// Line in the source log.
    pub line: u64,
    /// Unix seconds, UTC.
    pub timestamp: i64,
    pub position: GeoPoint,
    pub raw_rssi_dbm: f64,
    pub calibrated_rssi_dbm: Option<f64>,
    pub distance_m: Option<f64>,
    pub path_loss_db: Option<f64>,
    /// Calibration fell outside the table and used the nearest entry.
    pub clamped: bool,
    /// Inside an exclusion zone.
    pub excluded: bool,
    /// Closer to the base station than the configured minimum distance.
    pub below_minimum: bool,
}

impl MeasurementRecord {
    pub fn new(line: u64, timestamp: i64, position: GeoPoint, raw_rssi_dbm: f64) -> Self {
        MeasurementRecord {
            line,
            timestamp,
            position,
            raw_rssi_dbm,
            calibrated_rssi_dbm: None,
            distance_m: None,
            path_loss_db: None,
            clamped: false,
            excluded: false,
            below_minimum: false,
        }
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated_rssi_dbm.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reject {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsedLog {
    pub records: Vec<MeasurementRecord>,
    pub rejects: Vec<Reject>,
    pub warnings: Vec<String>,
}

const LOG_COLUMNS: [&str; 4] = ["timestamp", "lat", "lon", "rssi_dbm"];

/// Reads a CSV log with (at least) the columns `timestamp,lat,lon,rssi_dbm`.
/// Malformed rows are returned in `rejects` with their line numbers.
pub fn parse_log<R: Read>(reader: R) -> Result<ParsedLog> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.clone(),
        Ok(_) => return Err(Error::EmptyLog),
        Err(e) => return Err(Error::Parse(e.to_string())),
    };
    let mut idx = [0usize; 4];
    for (slot, col) in idx.iter_mut().zip(LOG_COLUMNS) {
        *slot = headers.iter().position(|h| h == col).ok_or_else(|| {
            Error::HeaderMismatch(format!(
                "expected columns {}, found {}",
                LOG_COLUMNS.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ))
        })?;
    }

    let mut out = ParsedLog {
        records: Vec::new(),
        rejects: Vec::new(),
        warnings: Vec::new(),
    };
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.rejects.push(Reject {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&row, &idx) {
            Ok((t, p, rssi)) => out.records.push(MeasurementRecord::new(line, t, p, rssi)),
            Err(e) => out.rejects.push(Reject {
                line,
                reason: match e {
                    Error::InvalidParameter(m) | Error::Parse(m) => m,
                    other => other.to_string(),
                },
            }),
        }
    }
    if out.records.is_empty() {
        out.warnings.push("log contains no measurement records".into());
    }
    Ok(out)
}

fn parse_row(row: &csv::StringRecord, idx: &[usize; 4]) -> Result<(i64, GeoPoint, f64)> {
    let field = |i: usize, name: &str| {
        row.get(idx[i])
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Parse(format!("missing {name}")))
    };
    let number = |i: usize, name: &str| -> Result<f64> {
        let s = field(i, name)?;
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("invalid {name} '{s}'")))
    };
    let t = parse_timestamp(field(0, "timestamp")?)?;
    let p = GeoPoint::new(number(1, "latitude")?, number(2, "longitude")?)?;
    Ok((t, p, number(3, "rssi")?))
}

/// Piecewise-linear RSSI correction from a step-attenuator calibration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationTable {
    /// (reported RSSI dBm, correction dB), strictly increasing in RSSI.
    entries: Vec<(f64, f64)>,
}

impl CalibrationTable {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("calibration table"));
        }
        if entries.iter().any(|(r, c)| !r.is_finite() || !c.is_finite()) {
            return Err(Error::InvalidParameter("calibration entries must be finite".into()));
        }
        if entries.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "calibration RSSI levels must be strictly increasing".into(),
            ));
        }
        Ok(CalibrationTable { entries })
    }

    pub fn identity() -> Self {
        CalibrationTable {
            entries: vec![(0.0, 0.0)],
        }
    }

    /// Reads a CSV with header `reported_rssi_dbm,correction_db`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::HeaderMismatch(format!("calibration table needs column {name}")))
        };
        let (ri, ci) = (col("reported_rssi_dbm")?, col("correction_db")?);
        let mut entries = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            let get = |i: usize| -> Result<f64> {
                row.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("calibration line {line}: bad number")))
            };
            entries.push((get(ri)?, get(ci)?));
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|e| e.1 == 0.0)
    }

    /// Correction for a reported RSSI, and whether it was clamped.
    pub fn correction(&self, rssi_dbm: f64) -> (f64, bool) {
        let first = self.entries[0];
        let last = self.entries[self.entries.len() - 1];
        if rssi_dbm < first.0 {
            return (first.1, true);
        }
        if rssi_dbm > last.0 {
            return (last.1, true);
        }
        let i = self.entries.partition_point(|e| e.0 <= rssi_dbm);
        if i == 0 {
            return (first.1, false);
        }
        let (r0, c0) = self.entries[i - 1];
        if r0 == rssi_dbm || i == self.entries.len() {
            return (c0, false);
        }
        let (r1, c1) = self.entries[i];
        (c0 + (c1 - c0) * (rssi_dbm - r0) / (r1 - r0), false)
    }
}

/// Adds the table correction to each raw RSSI. Calibrating already
/// calibrated records is only allowed with an identity table.
pub fn apply_calibration(
    mut records: Vec<MeasurementRecord>,
    table: &CalibrationTable,
) -> Result<Vec<MeasurementRecord>> {
    if !table.is_identity() && records.iter().any(MeasurementRecord::is_calibrated) {
        return Err(Error::AlreadyCalibrated);
    }
    for r in &mut records {
        let (c, clamped) = table.correction(r.raw_rssi_dbm);
        r.calibrated_rssi_dbm = Some(r.raw_rssi_dbm + c);
        r.clamped = clamped;
    }
    Ok(records)
}

/// Attaches base-station distances and exclusion flags.
pub fn geolocate(mut records: Vec<MeasurementRecord>, cfg: &CampaignConfig) -> Vec<MeasurementRecord> {
    for r in &mut records {
        let d = great_circle_distance(r.position, cfg.bs_position, cfg.earth);
        r.distance_m = Some(d);
        r.below_minimum = d < cfg.min_distance_m || d <= 0.0;
        r.excluded = cfg.exclusion_zones.iter().any(|z| z.contains(r.timestamp, d));
    }
    records
}

/// Converts calibrated RSSI to path loss through the link budget.
pub fn rssi_to_pathloss(mut records: Vec<MeasurementRecord>, radio: &RadioConfig) -> Result<Vec<MeasurementRecord>> {
    let eirp_and_gain = radio.tx_power_dbm + radio.tx_antenna_gain_dbi + radio.rx_antenna_gain_dbi
        - radio.polarization_loss_db;
    for r in &mut records {
        let rssi = r.calibrated_rssi_dbm.ok_or(Error::MissingCalibration)?;
        if r.distance_m.is_none() {
            return Err(Error::InvalidParameter(format!(
                "record on line {} has no distance; geolocate before applying the budget",
                r.line
            )));
        }
        r.path_loss_db = Some(eirp_and_gain - rssi);
    }
    Ok(records)
}

/// (distance, path loss) pairs of the usable records, sorted by distance.
pub fn to_sample_set(records: &[MeasurementRecord], source_id: &str) -> Result<SampleSet> {
    let mut pairs: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| !r.excluded && !r.below_minimum)
        .filter_map(|r| Some((r.distance_m?, r.path_loss_db?)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NoValidSamples);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    SampleSet::new(source_id, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExclusionZone;

    const LOG: &str = "timestamp,lat,lon,rssi_dbm,snr\n\
        2019-06-12T10:00:00Z,55.700,12.900,-90,7\n\
        2019-06-12T10:00:17Z,91.000,12.900,-91,7\n\
        2019-06-12T10:00:34Z,55.701,12.900,-92,7\n\
        not-a-time,55.702,12.900,-93,7\n\
        2019-06-12T10:01:08Z,55.703,12.900,,7\n";

    fn cfg() -> CampaignConfig {
        CampaignConfig::from_json(
            r#"{"radio": {"frequency_hz": 869.5e6, "tx_power_dbm": 18.3, "tx_antenna_gain_dbi": 0,
                "rx_antenna_gain_dbi": 9, "polarization_loss_db": 3, "rx_sensitivity_dbm": -138},
                "bs_position": {"latitude": 55.7, "longitude": 12.9},
                "antenna_heights": {"tx_m": 0.35, "rx_m": 5.2}}"#,
        )
        .unwrap()
    }

    #[test]
    fn parse_collects_rejects_with_lines() {
        let p = parse_log(LOG.as_bytes()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[0].line, 2);
        assert_eq!(p.records[1].line, 4);
        let lines: Vec<u64> = p.rejects.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![3, 5, 6]);
        assert_eq!(p.rejects[0].reason, "latitude out of range");
    }

    #[test]
    fn empty_and_bad_headers() {
        assert_eq!(parse_log("".as_bytes()), Err(Error::EmptyLog));
        assert!(matches!(parse_log("time,lat,lon,rssi\n".as_bytes()), Err(Error::HeaderMismatch(_))));
        let p = parse_log("timestamp,lat,lon,rssi_dbm\n".as_bytes()).unwrap();
        assert!(p.records.is_empty() && p.rejects.is_empty());
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("1970-01-01T00:01:00Z").unwrap(), 60);
        assert_eq!(parse_timestamp("1970-01-01T01:01:00+01:00").unwrap(), 60);
        assert_eq!(parse_timestamp("1970-01-01T00:01:00").unwrap(), 60);
        assert_eq!(format_timestamp(60), "1970-01-01T00:01:00Z");
        assert!(parse_timestamp("yesterday").is_err());
    }

    #[test]
    fn calibration_interpolates_and_clamps() {
        let t = CalibrationTable::new(vec![(-130.0, 1.0), (-110.0, 3.0), (-90.0, 2.0)]).unwrap();
        assert_eq!(t.correction(-120.0), (2.0, false));
        assert_eq!(t.correction(-110.0), (3.0, false));
        assert_eq!(t.correction(-90.0), (2.0, false));
        assert_eq!(t.correction(-130.0), (1.0, false));
        assert_eq!(t.correction(-140.0), (1.0, true));
        assert_eq!(t.correction(-80.0), (2.0, true));
        assert!(CalibrationTable::new(vec![(-90.0, 0.0), (-90.0, 1.0)]).is_err());
        assert!(CalibrationTable::new(vec![]).is_err());
    }

    #[test]
    fn calibration_csv_and_reapplication() {
        let t = CalibrationTable::from_csv("reported_rssi_dbm,correction_db\n-120,1\n-100,3\n".as_bytes()).unwrap();
        let recs = parse_log(LOG.as_bytes()).unwrap().records;
        let once = apply_calibration(recs.clone(), &t).unwrap();
        assert_eq!(once[0].calibrated_rssi_dbm, Some(-87.0));
        assert!(once[0].clamped);
        assert_eq!(apply_calibration(once.clone(), &t), Err(Error::AlreadyCalibrated));
        let id = apply_calibration(recs, &CalibrationTable::identity()).unwrap();
        assert_eq!(apply_calibration(id.clone(), &CalibrationTable::identity()).unwrap(), id);
        assert!(id.iter().all(|r| r.calibrated_rssi_dbm == Some(r.raw_rssi_dbm)));
    }

    #[test]
    fn geolocate_flags_without_dropping() {
        let mut c = cfg();
        c.exclusion_zones.push(ExclusionZone::Distance { min_m: 100.0, max_m: 150.0 });
        let recs = parse_log(LOG.as_bytes()).unwrap().records;
        let g = geolocate(recs, &c);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].distance_m, Some(0.0));
        assert!(g[0].below_minimum);
        let meridian = 0.001f64.to_radians() * c.earth.true_radius;
        assert!((g[1].distance_m.unwrap() - meridian).abs() < 0.1);
        assert!(g[1].excluded);
    }

    #[test]
    fn campaign_two_budget_arithmetic() {
        let c = cfg();
        let mut r = MeasurementRecord::new(1, 0, c.bs_position, -120.0);
        r.calibrated_rssi_dbm = Some(-120.0);
        r.distance_m = Some(1000.0);
        let out = rssi_to_pathloss(vec![r.clone()], &c.radio).unwrap();
        assert!((out[0].path_loss_db.unwrap() - 144.3).abs() < 1e-12);
        let mut up = r.clone();
        up.calibrated_rssi_dbm = Some(-110.0);
        let out2 = rssi_to_pathloss(vec![up], &c.radio).unwrap();
        assert!((out[0].path_loss_db.unwrap() - out2[0].path_loss_db.unwrap() - 10.0).abs() < 1e-12);
        let mut raw = r;
        raw.calibrated_rssi_dbm = None;
        assert_eq!(rssi_to_pathloss(vec![raw], &c.radio), Err(Error::MissingCalibration));
    }

    #[test]
    fn sample_set_sorted_and_filtered() {
        let c = cfg();
        let mk = |d: f64, excluded: bool| {
            let mut r = MeasurementRecord::new(1, 0, c.bs_position, -100.0);
            r.distance_m = Some(d);
            r.path_loss_db = Some(d / 10.0);
            r.excluded = excluded;
            r
        };
        let recs = vec![mk(500.0, false), mk(200.0, true), mk(100.0, false), mk(300.0, false)];
        let s = to_sample_set(&recs, "x").unwrap();
        assert_eq!(s.distances().collect::<Vec<_>>(), vec![100.0, 300.0, 500.0]);
        assert_eq!(to_sample_set(&[mk(1.0, true)], "x"), Err(Error::NoValidSamples));
    }
}
