//! Over-sea radio path-loss models and the analysis pipeline for LPWAN
//! measurement campaigns at low antenna heights.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: great-circle distances, characteristic link distances and
//!   the round-earth specular reflection point.
//! * [`sea`]: Fresnel, roughness, shadowing and divergence factors that make
//!   up the effective sea reflection coefficient.
//! * [`models`]: free space, flat and round-earth two-ray, REL, Bullington,
//!   reduced P.2001 and log-distance, plus sweeps and range search.
//! * [`fit`]: least-squares log-distance fit and RMSE/MAE comparison.
//! * [`ingest`]: measurement logs, RSSI calibration, link budget and
//!   geolocation.
//! * [`config`]: the campaign JSON document.

pub mod config;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod ingest;
pub mod models;
pub mod report;
pub mod sea;
pub mod special;
pub mod synthetic;

pub use error::{Error, Result};
pub use geometry::{EarthModel, GeoPoint, LinkGeometry, ReflectionGeometry};
pub use models::{ItuParams, LogDistanceParams, Model, ModelContext, ModelCurve, ModelId, RadioConfig};
pub use sea::{EffectiveReflection, Polarization, ReflectionOptions, SeaState};
