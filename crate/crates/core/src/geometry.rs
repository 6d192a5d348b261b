//! Earth and link geometry.
//!
//! Distances are in metres, angles in radians unless a name says otherwise.
//! The round-earth reflection geometry uses the parabolic-earth (small-angle)
//! approximation: heights above the tangent plane at the specular point are
//! `h - s^2 / (2 r_e)` where `s` is the ground distance to that point. This is
//! accurate to a few millimetres in reflection-point position for antenna
//! heights well below 1 km.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Antenna heights above this are rejected; the tangent-plane construction
/// assumes `h << r_e`.
pub const MAX_ANTENNA_HEIGHT_M: f64 = 10_000.0;

/// Free-space wavelength for a frequency in Hz.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Spherical earth with an effective-radius factor `k` for refraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarthModel {
    /// Mean earth radius in metres. Used for great-circle distances.
    #[serde(default = "EarthModel::default_radius")]
    pub true_radius: f64,
    /// Ratio of effective to true radius. Used for horizon, reflection and
    /// diffraction geometry.
    #[serde(default = "EarthModel::default_factor")]
    pub effective_radius_factor: f64,
}

impl EarthModel {
    pub const MEAN_RADIUS_M: f64 = 6_371_000.0;

    fn default_radius() -> f64 {
        Self::MEAN_RADIUS_M
    }

    fn default_factor() -> f64 {
        1.0
    }

    pub fn new(true_radius: f64, effective_radius_factor: f64) -> Result<Self> {
        let earth = EarthModel {
            true_radius,
            effective_radius_factor,
        };
        earth.validate()?;
        Ok(earth)
    }

    /// Mean-radius earth with the given effective-radius factor.
    pub fn with_factor(effective_radius_factor: f64) -> Result<Self> {
        Self::new(Self::MEAN_RADIUS_M, effective_radius_factor)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.true_radius.is_finite() && self.true_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "earth radius must be positive, got {}",
                self.true_radius
            )));
        }
        if !(self.effective_radius_factor.is_finite() && self.effective_radius_factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "effective radius factor must be positive, got {}",
                self.effective_radius_factor
            )));
        }
        Ok(())
    }

    pub fn effective_radius(&self) -> f64 {
        self.true_radius * self.effective_radius_factor
    }
}

impl Default for EarthModel {
    fn default() -> Self {
        EarthModel {
            true_radius: Self::MEAN_RADIUS_M,
            effective_radius_factor: 1.0,
        }
    }
}

/// A point-to-point link over a smooth sea: two antenna heights and the
/// great-circle distance between their ground points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    tx_height: f64,
    rx_height: f64,
    distance: f64,
    earth: EarthModel,
}

impl LinkGeometry {
    pub fn new(tx_height: f64, rx_height: f64, distance: f64, earth: EarthModel) -> Result<Self> {
        earth.validate()?;
        for (name, h) in [("tx", tx_height), ("rx", rx_height)] {
            if !(h.is_finite() && h > 0.0 && h <= MAX_ANTENNA_HEIGHT_M) {
                return Err(Error::InvalidParameter(format!(
                    "{name} antenna height must be in (0, {MAX_ANTENNA_HEIGHT_M}] m, got {h}"
                )));
            }
        }
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "link distance must be positive, got {distance}"
            )));
        }
        Ok(LinkGeometry {
            tx_height,
            rx_height,
            distance,
            earth,
        })
    }

    /// Same antennas and earth, different distance.
    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Self::new(self.tx_height, self.rx_height, distance, self.earth)
    }

    /// Same antennas and distance, different earth model.
    pub fn with_earth(&self, earth: EarthModel) -> Result<Self> {
        Self::new(self.tx_height, self.rx_height, self.distance, earth)
    }

    pub fn tx_height(&self) -> f64 {
        self.tx_height
    }

    pub fn rx_height(&self) -> f64 {
        self.rx_height
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn earth(&self) -> EarthModel {
        self.earth
    }

    pub fn effective_radius(&self) -> f64 {
        self.earth.effective_radius()
    }
}

/// GPS position in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeoPoint", into = "RawGeoPoint")]
pub struct GeoPoint {
    latitude: f64,
    longitude: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeoPoint {
    latitude: f64,
    longitude: f64,
}

impl TryFrom<RawGeoPoint> for GeoPoint {
    type Error = Error;

    fn try_from(raw: RawGeoPoint) -> Result<Self> {
        GeoPoint::new(raw.latitude, raw.longitude)
    }
}

impl From<GeoPoint> for RawGeoPoint {
    fn from(p: GeoPoint) -> Self {
        RawGeoPoint {
            latitude: p.latitude,
            longitude: p.longitude,
        }
    }
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(Error::InvalidParameter("latitude out of range".into()));
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(Error::InvalidParameter("longitude out of range".into()));
        }
        Ok(GeoPoint {
            latitude,
            longitude,
        })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }
}

/// Haversine great-circle distance on a sphere of `earth.true_radius`.
pub fn great_circle_distance(a: GeoPoint, b: GeoPoint, earth: EarthModel) -> f64 {
    let (lat1, lat2) = (a.latitude.to_radians(), b.latitude.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.longitude - a.longitude).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    let h = h.clamp(0.0, 1.0);
    2.0 * earth.true_radius * h.sqrt().atan2((1.0 - h).sqrt())
}

/// Distance beyond which the flat-earth two-ray pattern stops oscillating,
/// `4 h_t h_r / lambda`.
pub fn critical_distance(g: &LinkGeometry, wavelength: f64) -> f64 {
    4.0 * g.tx_height * g.rx_height / wavelength
}

/// Great-circle distance at which the direct ray grazes the sphere.
pub fn horizon_distance(g: &LinkGeometry) -> f64 {
    let a = g.effective_radius();
    horizon_arc(a, g.tx_height) + horizon_arc(a, g.rx_height)
}

// a * acos(a / (a + h)), written with atan2 so it stays accurate when a >> h.
fn horizon_arc(a: f64, h: f64) -> f64 {
    a * (h * (2.0 * a + h)).sqrt().atan2(a)
}

/// Distance at which the first Fresnel zone is 60 % clear of a smooth sea.
///
/// The empirical closed form is evaluated with the frequency in Hz; its
/// result is in kilometres and is returned here in metres. The constants
/// embed a 4/3-earth horizon, so the result does not depend on `g.earth()`.
pub fn fresnel60_distance(g: &LinkGeometry, frequency_hz: f64) -> f64 {
    let (ht, hr) = (g.tx_height, g.rx_height);
    let root_sum = ht.sqrt() + hr.sqrt();
    let num = 1.5949e-10 * frequency_hz * ht * hr * root_sum;
    let den = 3.89e-11 * frequency_hz * ht * hr + 4.1 * root_sum;
    1000.0 * num / den
}

/// Specular reflection geometry over the curved earth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionGeometry {
    /// Ground distance from the transmitter foot to the specular point.
    pub tx_ground: f64,
    /// Ground distance from the specular point to the receiver foot.
    pub rx_ground: f64,
    /// Slant length transmitter to specular point.
    pub tx_slant: f64,
    /// Slant length specular point to receiver.
    pub rx_slant: f64,
    /// Direct-ray length.
    pub direct: f64,
    /// Transmitter height above the tangent plane at the specular point.
    pub tx_height_prime: f64,
    /// Receiver height above the tangent plane at the specular point.
    pub rx_height_prime: f64,
    pub grazing_angle: f64,
}

impl ReflectionGeometry {
    pub fn reflected_path(&self) -> f64 {
        self.tx_slant + self.rx_slant
    }

    /// Excess length of the reflected ray over the direct ray.
    pub fn path_difference(&self) -> f64 {
        // (r^2 - l^2) / (r + l) without cancellation.
        4.0 * self.tx_height_prime * self.rx_height_prime / (self.reflected_path() + self.direct)
    }
}

const ROOT_REL_TOL: f64 = 1e-10;
const ROOT_MAX_ITER: usize = 200;

/// Locate the specular point on the sphere and derive the ray lengths.
pub fn reflection_geometry(g: &LinkGeometry) -> Result<ReflectionGeometry> {
    let d = g.distance;
    let horizon = horizon_distance(g);
    let no_point = || Error::NoSpecularPoint {
        distance_m: d,
        horizon_m: horizon,
    };
    if d >= horizon {
        return Err(no_point());
    }

    let a = g.effective_radius();
    let (ht, hr) = (g.tx_height, g.rx_height);
    // Specular condition h_t'/x = h_r'/(d - x) with h' = h - s^2/(2a), as a
    // cubic in t = x / d:
    //   2t^3 - 3t^2 + (1 - p) t + q = 0,  p = 2a(h_t+h_r)/d^2,  q = 2a h_t/d^2
    let p = 2.0 * a * (ht + hr) / (d * d);
    let q = 2.0 * a * ht / (d * d);
    let cubic = Cubic { p, q };

    let flat_guess = ht / (ht + hr);
    for (lo, hi) in cubic.brackets() {
        let t = cubic.root(lo, hi, flat_guess)?;
        let x = t * d;
        let x_prime = d - x;
        let ht_p = ht - x * x / (2.0 * a);
        let hr_p = hr - x_prime * x_prime / (2.0 * a);
        if ht_p <= 0.0 || hr_p <= 0.0 {
            continue;
        }
        let direct = (d * d + (ht_p - hr_p).powi(2)).sqrt();
        // Image construction: the reflected path is a straight line from the
        // mirrored transmitter, split at the specular point by similar triangles.
        let reflected = (d * d + (ht_p + hr_p).powi(2)).sqrt();
        let tx_share = ht_p / (ht_p + hr_p);
        return Ok(ReflectionGeometry {
            tx_ground: x,
            rx_ground: x_prime,
            tx_slant: reflected * tx_share,
            rx_slant: reflected * (1.0 - tx_share),
            direct,
            tx_height_prime: ht_p,
            rx_height_prime: hr_p,
            grazing_angle: ht_p.atan2(x),
        });
    }
    Err(no_point())
}

struct Cubic {
    p: f64,
    q: f64,
}

impl Cubic {
    fn eval(&self, t: f64) -> f64 {
        ((2.0 * t - 3.0) * t + (1.0 - self.p)) * t + self.q
    }

    fn slope(&self, t: f64) -> f64 {
        (6.0 * t - 6.0) * t + (1.0 - self.p)
    }

    fn scale(&self, t: f64) -> f64 {
        2.0 * t.powi(3) + 3.0 * t * t + (1.0 - self.p).abs() * t + self.q.abs()
    }

    /// Sub-intervals of (0, 1) on which the cubic is monotone and changes sign.
    fn brackets(&self) -> Vec<(f64, f64)> {
        // g'(t) = 0 at t = 1/2 +- sqrt(1/4 - (1 - p)/6); g' < 0 throughout
        // (0, 1) whenever p >= 1, which covers most within-horizon links.
        let mut knots = vec![0.0];
        let disc = 0.25 - (1.0 - self.p) / 6.0;
        if disc > 0.0 {
            let r = disc.sqrt();
            for c in [0.5 - r, 0.5 + r] {
                if c > 0.0 && c < 1.0 {
                    knots.push(c);
                }
            }
        }
        knots.push(1.0);
        knots
            .windows(2)
            .filter(|w| self.eval(w[0]).signum() != self.eval(w[1]).signum())
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Safeguarded Newton iteration on a sign-changing bracket.
    fn root(&self, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64> {
        let f_lo_positive = self.eval(lo) > 0.0;
        let mut t = if guess > lo && guess < hi {
            guess
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..ROOT_MAX_ITER {
            let f = self.eval(t);
            if f.abs() <= ROOT_REL_TOL * self.scale(t) {
                return Ok(t);
            }
            if (f > 0.0) == f_lo_positive {
                lo = t;
            } else {
                hi = t;
            }
            let fp = self.slope(t);
            let newton = t - f / fp;
            t = if fp != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi.max(1e-300) {
                break;
            }
        }
        let f = self.eval(t);
        if f.abs() <= ROOT_REL_TOL * self.scale(t) {
            Ok(t)
        } else {
            Err(Error::NumericalFailure(format!(
                "specular-point cubic residual {:.3e} after {ROOT_MAX_ITER} iterations",
                f.abs() / self.scale(t)
            )))
        }
    }
}
