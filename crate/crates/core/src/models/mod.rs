//! Path-loss models for over-sea links. Every model returns the basic
//! transmission loss in dB between isotropic antennas.

mod budget;
mod composite;
mod diffraction;
mod sweep;
mod two_ray;

pub use budget::{link_budget_db, max_range, RangeResult, RANGE_CAP_M};
pub use composite::{
    bullington_height_ceiling, bullington_height_warning, bullington_loss, diffraction_weight, itu_p2001_reduced_loss, rel_loss,
    rel_loss_parts, RelParts,
};
pub use diffraction::{smooth_earth_diffraction_loss, surface_admittance};
pub use sweep::{distance_grid, sweep, MissingPoint, ModelCurve, Spacing};
pub use two_ray::{two_ray_flat, two_ray_round_earth, two_ray_with_geometry};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wavelength, EarthModel, LinkGeometry};
use crate::sea::{effective_reflection, Polarization, ReflectionOptions, SeaState};

/// Transmitter/receiver hardware parameters of a link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    pub frequency_hz: f64,
    pub tx_power_dbm: f64,
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    /// Polarization mismatch, subtracted from the receive gain.
    #[serde(default)]
    pub polarization_loss_db: f64,
    pub rx_sensitivity_dbm: f64,
    /// LoRa spreading factor; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spreading_factor: Option<u8>,
    /// LoRa bandwidth in Hz; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.frequency_hz,
            self.tx_power_dbm,
            self.tx_antenna_gain_dbi,
            self.rx_antenna_gain_dbi,
            self.polarization_loss_db,
            self.rx_sensitivity_dbm,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("radio parameters must be finite".into()));
        }
        if self.frequency_hz <= 0.0 {
            return Err(Error::InvalidParameter("frequency must be positive".into()));
        }
        if self.polarization_loss_db < 0.0 {
            return Err(Error::InvalidParameter("polarization loss must be >= 0 dB".into()));
        }
        Ok(())
    }
}

/// Parameters of `L(d) = L_p0 + 10 n log10(d / d_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogDistanceParams {
    pub n: f64,
    pub lp0_db: f64,
    pub d0_m: f64,
}

impl LogDistanceParams {
    pub fn new(n: f64, lp0_db: f64, d0_m: f64) -> Result<Self> {
        if !(d0_m.is_finite() && d0_m > 0.0) || !n.is_finite() || !lp0_db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "invalid log-distance parameters n={n} lp0={lp0_db} d0={d0_m}"
            )));
        }
        Ok(LogDistanceParams { n, lp0_db, d0_m })
    }
}

/// Settings of the reduced P.2001 model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ItuParams {
    /// Percentage of an average year for which the loss is not exceeded.
    pub time_percentage: f64,
    pub median_effective_radius_factor: f64,
}

impl Default for ItuParams {
    fn default() -> Self {
        ItuParams {
            time_percentage: 50.0,
            median_effective_radius_factor: 4.0 / 3.0,
        }
    }
}

impl ItuParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.time_percentage > 0.0 && self.time_percentage < 100.0) {
            return Err(Error::InvalidParameter(format!(
                "time percentage must be in (0, 100), got {}",
                self.time_percentage
            )));
        }
        if !(self.median_effective_radius_factor.is_finite() && self.median_effective_radius_factor > 0.0) {
            return Err(Error::InvalidParameter("median effective radius factor must be positive".into()));
        }
        Ok(())
    }
}

/// Stable model identifiers used in file outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    FreeSpace,
    TwoRayFlat,
    TwoRayRoundEarth,
    Rel,
    Bullington,
    ItuP2001,
    LogDistance,
}

impl ModelId {
    pub const ALL: [ModelId; 7] = [
        ModelId::FreeSpace,
        ModelId::TwoRayFlat,
        ModelId::TwoRayRoundEarth,
        ModelId::Rel,
        ModelId::Bullington,
        ModelId::ItuP2001,
        ModelId::LogDistance,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::FreeSpace => "free_space",
            ModelId::TwoRayFlat => "two_ray_flat",
            ModelId::TwoRayRoundEarth => "two_ray_round_earth",
            ModelId::Rel => "rel",
            ModelId::Bullington => "bullington",
            ModelId::ItuP2001 => "itu_p2001",
            ModelId::LogDistance => "log_distance",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let id = match key.as_str() {
            "free_space" | "fspl" => ModelId::FreeSpace,
            "two_ray_flat" | "two_ray" => ModelId::TwoRayFlat,
            "two_ray_round_earth" => ModelId::TwoRayRoundEarth,
            "rel" => ModelId::Rel,
            "bullington" => ModelId::Bullington,
            "itu_p2001" | "itu" | "p2001" => ModelId::ItuP2001,
            "log_distance" | "logd" => ModelId::LogDistance,
            _ => return Err(Error::InvalidParameter(format!("unknown model '{s}'"))),
        };
        Ok(id)
    }
}

/// A model to evaluate. Only the log-distance model carries parameters of
/// its own; the rest read the shared [`ModelContext`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    FreeSpace,
    /// Flat earth, smooth perfectly conducting surface (R = -1).
    TwoRayFlat,
    /// Round earth with the effective sea reflection and no diffraction.
    TwoRayRoundEarth,
    Rel,
    Bullington,
    ItuP2001,
    LogDistance(LogDistanceParams),
}

impl Model {
    pub fn id(&self) -> ModelId {
        match self {
            Model::FreeSpace => ModelId::FreeSpace,
            Model::TwoRayFlat => ModelId::TwoRayFlat,
            Model::TwoRayRoundEarth => ModelId::TwoRayRoundEarth,
            Model::Rel => ModelId::Rel,
            Model::Bullington => ModelId::Bullington,
            Model::ItuP2001 => ModelId::ItuP2001,
            Model::LogDistance(_) => ModelId::LogDistance,
        }
    }

    /// Builds the selector for `id`; the log-distance model needs `params`.
    pub fn from_id(id: ModelId, params: Option<LogDistanceParams>) -> Result<Self> {
        Ok(match id {
            ModelId::FreeSpace => Model::FreeSpace,
            ModelId::TwoRayFlat => Model::TwoRayFlat,
            ModelId::TwoRayRoundEarth => Model::TwoRayRoundEarth,
            ModelId::Rel => Model::Rel,
            ModelId::Bullington => Model::Bullington,
            ModelId::ItuP2001 => Model::ItuP2001,
            ModelId::LogDistance => Model::LogDistance(params.ok_or_else(|| {
                Error::InvalidParameter("log-distance model requires parameters".into())
            })?),
        })
    }
}

/// Everything the physical models share for one link: frequency, antenna
/// heights, earth, sea and the P.2001 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelContext {
    pub frequency_hz: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub earth: EarthModel,
    pub sea: SeaState,
    pub polarization: Polarization,
    pub reflection: ReflectionOptions,
    pub itu: ItuParams,
}

impl ModelContext {
    pub fn new(frequency_hz: f64, tx_height_m: f64, rx_height_m: f64) -> Self {
        ModelContext {
            frequency_hz,
            tx_height_m,
            rx_height_m,
            earth: EarthModel::default(),
            sea: SeaState::default(),
            polarization: Polarization::Vertical,
            reflection: ReflectionOptions::default(),
            itu: ItuParams::default(),
        }
    }

    pub fn geometry(&self, distance_m: f64) -> Result<LinkGeometry> {
        LinkGeometry::new(self.tx_height_m, self.rx_height_m, distance_m, self.earth)
    }

    /// Path loss of `model` at great-circle distance `distance_m`.
    pub fn evaluate(&self, model: &Model, distance_m: f64) -> Result<f64> {
        let f = self.frequency_hz;
        let loss = match model {
            Model::FreeSpace => {
                check_distance(distance_m)?;
                free_space_loss(distance_m, f)
            }
            Model::LogDistance(p) => {
                check_distance(distance_m)?;
                log_distance_loss(distance_m, p)
            }
            Model::TwoRayFlat => {
                let g = self.geometry(distance_m)?;
                two_ray_flat(g.distance(), g.tx_height(), g.rx_height(), f, Complex64::new(-1.0, 0.0))
            }
            Model::TwoRayRoundEarth => {
                let g = self.geometry(distance_m)?;
                let (r, rg) = effective_reflection(&g, f, &self.sea, self.polarization, &self.reflection)?;
                two_ray_with_geometry(&rg, f, &r)
            }
            Model::Rel => {
                let g = self.geometry(distance_m)?;
                rel_loss(&g, f, &self.sea, self.polarization, &self.reflection)?
            }
            Model::Bullington => {
                let g = self.geometry(distance_m)?;
                bullington_loss(&g, f, &self.sea, self.polarization)?
            }
            Model::ItuP2001 => {
                let g = self.geometry(distance_m)?;
                itu_p2001_reduced_loss(&g, f, &self.itu, &self.sea, self.polarization)?
            }
        };
        if loss.is_finite() {
            Ok(loss)
        } else {
            Err(Error::NumericalFailure(format!(
                "{} produced a non-finite loss at {distance_m} m",
                model.id()
            )))
        }
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("distance must be positive, got {d}")))
    }
}

/// Free-space basic transmission loss `20 log10(4 pi d / lambda)`.
pub fn free_space_loss(distance_m: f64, frequency_hz: f64) -> f64 {
    20.0 * (4.0 * PI * distance_m / wavelength(frequency_hz)).log10()
}

/// `L_p0 + 10 n log10(d / d_0)`.
pub fn log_distance_loss(distance_m: f64, p: &LogDistanceParams) -> f64 {
    p.lp0_db + 10.0 * p.n * (distance_m / p.d0_m).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const F: f64 = 869.5e6;

    #[test]
    fn free_space_reference_points() {
        let lambda = wavelength(F);
        assert!(free_space_loss(lambda / (4.0 * PI), F).abs() < 1e-12);
        assert!((free_space_loss(1_000.0, F) - 91.23).abs() < 0.01);
        let step = free_space_loss(2_000.0, F) - free_space_loss(1_000.0, F);
        assert_relative_eq!(step, 20.0 * 2f64.log10(), max_relative = 1e-12);
        assert!((step - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn log_distance_reference_and_slope() {
        let p = LogDistanceParams::new(4.0, 80.0, 100.0).unwrap();
        assert_eq!(log_distance_loss(100.0, &p), 80.0);
        assert_relative_eq!(log_distance_loss(1_000.0, &p) - log_distance_loss(100.0, &p), 40.0, max_relative = 1e-12);

        let fs = LogDistanceParams::new(2.0, free_space_loss(100.0, F), 100.0).unwrap();
        for d in [1.0, 37.0, 1_000.0, 12_345.0] {
            assert_relative_eq!(log_distance_loss(d, &fs), free_space_loss(d, F), max_relative = 1e-12);
        }
    }

    #[test]
    fn model_ids_round_trip() {
        for id in ModelId::ALL {
            assert_eq!(id.as_str().parse::<ModelId>().unwrap(), id);
        }
        assert!("okumura".parse::<ModelId>().is_err());
    }

    #[test]
    fn log_distance_selector_needs_params() {
        assert!(Model::from_id(ModelId::LogDistance, None).is_err());
        assert!(Model::from_id(ModelId::Rel, None).is_ok());
    }

    #[test]
    fn every_model_is_finite_over_campaign_range() {
        let ctx = ModelContext::new(F, 0.35, 5.2);
        let ld = LogDistanceParams::new(4.0, 80.0, 100.0).unwrap();
        let models = [
            Model::FreeSpace,
            Model::TwoRayFlat,
            Model::Rel,
            Model::Bullington,
            Model::ItuP2001,
            Model::LogDistance(ld),
        ];
        for m in &models {
            for i in 0..400 {
                let d = 1.0 * 10f64.powf(i as f64 * 5.0 / 400.0);
                let loss = ctx.evaluate(m, d).unwrap();
                assert!(loss.is_finite(), "{} at {d}", m.id());
            }
        }
    }
}
