//! Seeded synthetic measurement campaigns.
//!
//! A mobile node moves away from the base station at constant speed along a
//! fixed bearing. Each sample's path loss is a model prediction plus Gaussian
//! noise, converted to an integer RSSI through the link budget. Packets below
//! the receiver sensitivity are not logged.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::CampaignConfig;
use crate::error::{Error, Result};
use crate::geometry::{EarthModel, GeoPoint};
use crate::ingest::format_timestamp;
use crate::models::Model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTrack {
    pub seed: u64,
    pub n_samples: usize,
    pub start_distance_m: f64,
    pub end_distance_m: f64,
    pub bearing_deg: f64,
    pub noise_std_db: f64,
    /// Seconds between packets.
    pub interval_s: i64,
    /// Unix seconds of the first packet.
    pub start_time: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRow {
    pub timestamp: i64,
    pub position: GeoPoint,
    pub rssi_dbm: f64,
    pub distance_m: f64,
    pub loss_db: f64,
}

/// Point reached from `origin` after `distance_m` along `bearing_deg`.
pub fn destination_point(origin: GeoPoint, bearing_deg: f64, distance_m: f64, earth: EarthModel) -> Result<GeoPoint> {
    let delta = distance_m / earth.true_radius;
    let theta = bearing_deg.to_radians();
    let (lat1, lon1) = (origin.latitude().to_radians(), origin.longitude().to_radians());
    let lat2 = (lat1.sin() * delta.cos() + lat1.cos() * delta.sin() * theta.cos()).asin();
    let lon2 = lon1 + (theta.sin() * delta.sin() * lat1.cos()).atan2(delta.cos() - lat1.sin() * lat2.sin());
    let lon2 = (lon2.to_degrees() + 540.0).rem_euclid(360.0) - 180.0;
    GeoPoint::new(lat2.to_degrees(), lon2)
}

pub fn generate(cfg: &CampaignConfig, model: &Model, track: &SyntheticTrack) -> Result<Vec<SyntheticRow>> {
    if track.n_samples < 2 {
        return Err(Error::InvalidParameter("a synthetic track needs at least 2 samples".into()));
    }
    if !(track.start_distance_m > 0.0 && track.end_distance_m > track.start_distance_m) {
        return Err(Error::InvalidParameter("track distances must satisfy 0 < start < end".into()));
    }
    let noise = Normal::new(0.0, track.noise_std_db)
        .map_err(|e| Error::InvalidParameter(format!("noise standard deviation: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(track.seed);
    let ctx = cfg.model_context();
    let r = &cfg.radio;
    let gains = r.tx_power_dbm + r.tx_antenna_gain_dbi + r.rx_antenna_gain_dbi - r.polarization_loss_db;

    let step = (track.end_distance_m - track.start_distance_m) / (track.n_samples - 1) as f64;
    let mut rows = Vec::with_capacity(track.n_samples);
    for i in 0..track.n_samples {
        let d = track.start_distance_m + step * i as f64;
        let loss = ctx.evaluate(model, d)? + noise.sample(&mut rng);
        let rssi = (gains - loss).round();
        if rssi < r.rx_sensitivity_dbm {
            continue;
        }
        rows.push(SyntheticRow {
            timestamp: track.start_time + track.interval_s * i as i64,
            position: destination_point(cfg.bs_position, track.bearing_deg, d, cfg.earth)?,
            rssi_dbm: rssi,
            distance_m: d,
            loss_db: loss,
        });
    }
    Ok(rows)
}

/// Writes rows in the measurement-log CSV format.
pub fn write_log<W: Write>(rows: &[SyntheticRow], mut out: W) -> Result<()> {
    writeln!(out, "timestamp,lat,lon,rssi_dbm")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.7},{:.7},{}",
            format_timestamp(r.timestamp),
            r.position.latitude(),
            r.position.longitude(),
            r.rssi_dbm
        )?;
    }
    Ok(())
}
