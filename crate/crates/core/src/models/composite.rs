//! Composite over-sea models: Bullington, REL and the reduced P.2001 path.

use num_complex::Complex64;

use super::diffraction::smooth_earth_diffraction_loss;
use super::two_ray::{two_ray_flat, two_ray_with_geometry};
use super::{free_space_loss, ItuParams};
use crate::error::{Error, Result};
use crate::geometry::{fresnel60_distance, horizon_distance, EarthModel, LinkGeometry};
use crate::sea::{effective_reflection, Polarization, ReflectionOptions, SeaState};

const BULLINGTON_REFERENCE_HZ: f64 = 868e6;
const BULLINGTON_REFERENCE_CEILING_M: f64 = 15.0;
/// The 15 m ceiling is enforced within this distance of 868 MHz.
const BULLINGTON_ENFORCED_BAND_HZ: f64 = 100e6;

/// Weight of the full diffraction loss: 0 up to `d60`, 1 from `dh` on,
/// linear in `log10(d)` in between.
pub fn diffraction_weight(distance_m: f64, d60: f64, dh: f64) -> f64 {
    if distance_m <= d60 {
        0.0
    } else if distance_m >= dh {
        1.0
    } else {
        (distance_m / d60).log10() / (dh / d60).log10()
    }
}

/// Antenna-height ceiling of the Bullington method, scaled as `f^(-1/3)`
/// from 15 m at 868 MHz.
pub fn bullington_height_ceiling(frequency_hz: f64) -> f64 {
    BULLINGTON_REFERENCE_CEILING_M * (BULLINGTON_REFERENCE_HZ / frequency_hz).cbrt()
}

/// True when an antenna is above the scaled ceiling at a frequency where the
/// ceiling is only advisory.
pub fn bullington_height_warning(g: &LinkGeometry, frequency_hz: f64) -> bool {
    let enforced = (frequency_hz - BULLINGTON_REFERENCE_HZ).abs() <= BULLINGTON_ENFORCED_BAND_HZ;
    !enforced && g.tx_height().max(g.rx_height()) > bullington_height_ceiling(frequency_hz)
}

// Smooth-sphere loss relative to the plane-earth (R = -1) two-ray loss.
fn shadow_loss_over_plane_earth(g: &LinkGeometry, frequency_hz: f64, sea: &SeaState, pol: Polarization) -> f64 {
    let d = g.distance();
    let plane_excess =
        two_ray_flat(d, g.tx_height(), g.rx_height(), frequency_hz, Complex64::new(-1.0, 0.0)) - free_space_loss(d, frequency_hz);
    (smooth_earth_diffraction_loss(g, frequency_hz, sea, pol) - plane_excess).max(0.0)
}

/// Flat-earth two-ray loss over a smooth perfect conductor plus the
/// smooth-sphere shadow loss relative to plane earth.
///
/// The shadow loss is taken in full from the horizon on and blended in from
/// zero at the 60 % Fresnel-clearance distance.
pub fn bullington_loss(g: &LinkGeometry, frequency_hz: f64, sea: &SeaState, pol: Polarization) -> Result<f64> {
    let highest = g.tx_height().max(g.rx_height());
    if (frequency_hz - BULLINGTON_REFERENCE_HZ).abs() <= BULLINGTON_ENFORCED_BAND_HZ
        && highest > BULLINGTON_REFERENCE_CEILING_M
    {
        return Err(Error::AntennaTooHigh {
            height_m: highest,
            ceiling_m: BULLINGTON_REFERENCE_CEILING_M,
        });
    }
    let d = g.distance();
    let plane = two_ray_flat(d, g.tx_height(), g.rx_height(), frequency_hz, Complex64::new(-1.0, 0.0));
    let dh = horizon_distance(g);
    let correction = if d >= dh {
        shadow_loss_over_plane_earth(g, frequency_hz, sea, pol)
    } else {
        let w = diffraction_weight(d, fresnel60_distance(g, frequency_hz), dh);
        if w == 0.0 {
            0.0
        } else {
            w * shadow_loss_over_plane_earth(&g.with_distance(dh)?, frequency_hz, sea, pol)
        }
    };
    Ok(plane + correction)
}

/// The two additive terms of the REL loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelParts {
    /// Round-earth two-ray loss, or free-space loss where no specular point
    /// exists.
    pub reflection_db: f64,
    pub diffraction_db: f64,
    /// False when `reflection_db` fell back to free space.
    pub two_ray: bool,
}

impl RelParts {
    pub fn total(&self) -> f64 {
        self.reflection_db + self.diffraction_db
    }
}

pub fn rel_loss_parts(
    g: &LinkGeometry,
    frequency_hz: f64,
    sea: &SeaState,
    pol: Polarization,
    opts: &ReflectionOptions,
) -> Result<RelParts> {
    let d = g.distance();
    let dh = horizon_distance(g);
    let (reflection_db, two_ray) = match effective_reflection(g, frequency_hz, sea, pol, opts) {
        Ok((r, rg)) => (two_ray_with_geometry(&rg, frequency_hz, &r), true),
        Err(Error::NoSpecularPoint { .. }) => (free_space_loss(d, frequency_hz), false),
        Err(e) => return Err(e),
    };
    let diffraction_db = if d >= dh {
        smooth_earth_diffraction_loss(g, frequency_hz, sea, pol)
    } else {
        let w = diffraction_weight(d, fresnel60_distance(g, frequency_hz), dh);
        if w == 0.0 {
            0.0
        } else {
            w * smooth_earth_diffraction_loss(&g.with_distance(dh)?, frequency_hz, sea, pol)
        }
    };
    Ok(RelParts {
        reflection_db,
        diffraction_db,
        two_ray,
    })
}

/// Round-earth loss: two-ray with the effective sea reflection plus the
/// smooth-sphere diffraction loss, blended in between the 60 %
/// Fresnel-clearance distance and the horizon. Beyond the horizon it is free
/// space plus the full diffraction loss.
pub fn rel_loss(
    g: &LinkGeometry,
    frequency_hz: f64,
    sea: &SeaState,
    pol: Polarization,
    opts: &ReflectionOptions,
) -> Result<f64> {
    rel_loss_parts(g, frequency_hz, sea, pol, opts).map(|p| p.total())
}

/// Median normal-propagation loss of P.2001 over a smooth sea path: free
/// space plus smooth-sphere diffraction on the median effective earth.
pub fn itu_p2001_reduced_loss(
    g: &LinkGeometry,
    frequency_hz: f64,
    itu: &ItuParams,
    sea: &SeaState,
    pol: Polarization,
) -> Result<f64> {
    if !(30e6..=50e9).contains(&frequency_hz) {
        return Err(Error::FrequencyOutOfRange(frequency_hz));
    }
    itu.validate()?;
    if itu.time_percentage != 50.0 {
        return Err(Error::UnsupportedTimePercentage(itu.time_percentage));
    }
    let median = g.with_earth(EarthModel::new(g.earth().true_radius, itu.median_effective_radius_factor)?)?;
    Ok(free_space_loss(g.distance(), frequency_hz) + smooth_earth_diffraction_loss(&median, frequency_hz, sea, pol))
}
