//! Campaign configuration document.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{EarthModel, GeoPoint, LinkGeometry};
use crate::ingest::{format_timestamp, parse_timestamp};
use crate::models::{free_space_loss, ItuParams, LogDistanceParams, ModelContext, RadioConfig};
use crate::sea::{Polarization, ReflectionOptions, SeaState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaHeights {
    /// Transmitter (mobile node) height, m.
    pub tx_m: f64,
    /// Receiver (base station) height, m.
    pub rx_m: f64,
}

/// Interval of records to leave out of the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExclusionZone {
    /// Inclusive UTC time window.
    Time {
        #[serde(serialize_with = "ser_ts", deserialize_with = "de_ts")]
        start: i64,
        #[serde(serialize_with = "ser_ts", deserialize_with = "de_ts")]
        end: i64,
    },
    /// Inclusive distance band from the base station, m.
    Distance { min_m: f64, max_m: f64 },
}

fn ser_ts<S: Serializer>(t: &i64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_timestamp(*t))
}

fn de_ts<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<i64, D::Error> {
    let s = String::deserialize(d)?;
    parse_timestamp(&s).map_err(serde::de::Error::custom)
}

impl ExclusionZone {
    pub fn contains(&self, timestamp: i64, distance_m: f64) -> bool {
        match *self {
            ExclusionZone::Time { start, end } => (start..=end).contains(&timestamp),
            ExclusionZone::Distance { min_m, max_m } => (min_m..=max_m).contains(&distance_m),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ExclusionZone::Time { start, end } => start <= end,
            ExclusionZone::Distance { min_m, max_m } => {
                min_m.is_finite() && max_m.is_finite() && min_m >= 0.0 && min_m <= max_m
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("empty or inverted exclusion zone {self:?}")))
        }
    }
}

/// Everything needed to model and analyse one measurement campaign.
///
/// Optional sections fall back to defaults when deserialized, and
/// serializing a loaded config writes every field out explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub name: String,
    pub radio: RadioConfig,
    pub bs_position: GeoPoint,
    pub antenna_heights: AntennaHeights,
    #[serde(default)]
    pub earth: EarthModel,
    #[serde(default)]
    pub sea: SeaState,
    #[serde(default)]
    pub polarization: Polarization,
    #[serde(default)]
    pub reflection: ReflectionOptions,
    #[serde(default)]
    pub itu: ItuParams,
    #[serde(default)]
    pub exclusion_zones: Vec<ExclusionZone>,
    /// Reference distance of the log-distance fit, m.
    #[serde(default = "default_reference_distance")]
    pub reference_distance_m: f64,
    /// Records closer than this to the base station are flagged and skipped.
    #[serde(default = "default_min_distance")]
    pub min_distance_m: f64,
    /// Log-distance model used by `curves` and `range`. Defaults to n = 2
    /// anchored at free space at the reference distance.
    #[serde(default)]
    pub log_distance: Option<LogDistanceParams>,
}

fn default_reference_distance() -> f64 {
    100.0
}

fn default_min_distance() -> f64 {
    1.0
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: CampaignConfig = serde_json::from_str(text)?;
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the config and fills in derived defaults.
    pub fn resolve(&mut self) -> Result<()> {
        self.validate()?;
        if self.log_distance.is_none() {
            self.log_distance = Some(self.default_log_distance()?);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.earth.validate()?;
        self.sea.validate()?;
        self.itu.validate()?;
        LinkGeometry::new(self.antenna_heights.tx_m, self.antenna_heights.rx_m, 1.0, self.earth)?;
        if !(self.reference_distance_m.is_finite() && self.reference_distance_m > 0.0) {
            return Err(Error::InvalidParameter("reference distance must be positive".into()));
        }
        if !(self.min_distance_m.is_finite() && self.min_distance_m >= 0.0) {
            return Err(Error::InvalidParameter("minimum distance must be >= 0".into()));
        }
        for z in &self.exclusion_zones {
            z.validate()?;
        }
        Ok(())
    }

    fn default_log_distance(&self) -> Result<LogDistanceParams> {
        let d0 = self.reference_distance_m;
        LogDistanceParams::new(2.0, free_space_loss(d0, self.radio.frequency_hz), d0)
    }

    pub fn log_distance_params(&self) -> Result<LogDistanceParams> {
        match self.log_distance {
            Some(p) => Ok(p),
            None => self.default_log_distance(),
        }
    }

    pub fn model_context(&self) -> ModelContext {
        ModelContext {
            frequency_hz: self.radio.frequency_hz,
            tx_height_m: self.antenna_heights.tx_m,
            rx_height_m: self.antenna_heights.rx_m,
            earth: self.earth,
            sea: self.sea,
            polarization: self.polarization,
            reflection: self.reflection,
            itu: self.itu,
        }
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
