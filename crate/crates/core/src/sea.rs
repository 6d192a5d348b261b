//! Sea-surface reflection: Fresnel coefficients for sea water, roughness and
//! shadowing of the specular component, and the spherical-earth divergence
//! factor. Together they form the effective reflection coefficient used by
//! the round-earth two-ray model.
//!
//! `sigma_h` is the standard deviation of the surface *height* in metres and
//! `beta_0` the RMS surface *slope* in radians. All reduction factors act on
//! the field amplitude.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{reflection_geometry, wavelength, LinkGeometry, ReflectionGeometry};
use crate::special::{bessel_i0_scaled, erfc};

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Statistical and electrical description of the sea surface.
///
/// The defaults (70, 5 S/m, 0.1 m, 0.05 rad) are illustrative UHF sea-water
/// values, not measured ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeaState {
    /// Surface-height standard deviation, m.
    pub sigma_h: f64,
    /// RMS surface slope, rad.
    pub beta_0: f64,
    pub relative_permittivity: f64,
    /// Conductivity, S/m.
    pub conductivity: f64,
}

impl Default for SeaState {
    fn default() -> Self {
        SeaState {
            sigma_h: 0.1,
            beta_0: 0.05,
            relative_permittivity: 70.0,
            conductivity: 5.0,
        }
    }
}

impl SeaState {
    /// Default sea water with no roughness.
    pub fn smooth() -> Self {
        SeaState {
            sigma_h: 0.0,
            beta_0: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma_h.is_finite()
            && self.sigma_h >= 0.0
            && self.beta_0.is_finite()
            && self.beta_0 >= 0.0
            && self.relative_permittivity.is_finite()
            && self.relative_permittivity > 1.0
            && self.conductivity >= 0.0
            && !self.conductivity.is_nan();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid sea state {self:?}")))
        }
    }

    /// Complex relative permittivity `eps_r - j sigma / (omega eps_0)`
    /// (time dependence `exp(+j omega t)`).
    pub fn complex_permittivity(&self, frequency_hz: f64) -> Complex64 {
        let loss = self.conductivity / (2.0 * PI * frequency_hz * EPSILON_0);
        Complex64::new(self.relative_permittivity, -loss)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    #[default]
    Vertical,
    Horizontal,
    /// Reflected with the vertical coefficient; the co-/cross-polar mismatch
    /// belongs in the link budget.
    Circular,
}

/// Specular scattering-loss model for a rough surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RoughnessModel {
    /// `exp(-2g^2) I0(2g^2)`
    #[default]
    MillerBrown,
    /// `exp(-2g^2)`
    Ament,
    None,
}

/// Which reduction factors enter the effective reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReflectionOptions {
    pub roughness: RoughnessModel,
    pub shadowing: bool,
    pub divergence: bool,
}

impl Default for ReflectionOptions {
    fn default() -> Self {
        ReflectionOptions {
            roughness: RoughnessModel::MillerBrown,
            shadowing: true,
            divergence: true,
        }
    }
}

/// Effective reflection coefficient with its factor breakdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveReflection {
    pub magnitude: f64,
    pub phase: f64,
    pub fresnel: Complex64,
    pub roughness: f64,
    pub shadowing: f64,
    pub divergence: f64,
}

impl EffectiveReflection {
    pub fn from_factors(fresnel: Complex64, roughness: f64, shadowing: f64, divergence: f64) -> Self {
        EffectiveReflection {
            magnitude: fresnel.norm() * roughness * shadowing * divergence,
            phase: fresnel.arg(),
            fresnel,
            roughness,
            shadowing,
            divergence,
        }
    }

    /// A bare coefficient with every reduction factor equal to one.
    pub fn from_coefficient(r: Complex64) -> Self {
        Self::from_factors(r, 1.0, 1.0, 1.0)
    }

    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Fresnel reflection coefficient of a lossy half-space at grazing angle
/// `psi` (measured from the surface).
pub fn fresnel_reflection(
    grazing_angle: f64,
    frequency_hz: f64,
    sea: &SeaState,
    pol: Polarization,
) -> Complex64 {
    let eps = sea.complex_permittivity(frequency_hz);
    let (sin_psi, cos_psi) = grazing_angle.sin_cos();
    let root = (eps - cos_psi * cos_psi).sqrt();
    match pol {
        Polarization::Horizontal => (sin_psi - root) / (sin_psi + root),
        Polarization::Vertical | Polarization::Circular => {
            (eps * sin_psi - root) / (eps * sin_psi + root)
        }
    }
}

/// Rayleigh roughness parameter `g = 2 pi sigma_h sin(psi) / lambda`.
pub fn rayleigh_parameter(grazing_angle: f64, wavelength: f64, sea: &SeaState) -> f64 {
    2.0 * PI * sea.sigma_h * grazing_angle.sin() / wavelength
}

/// Miller-Brown-Vegh specular scattering coefficient.
pub fn roughness_factor(grazing_angle: f64, wavelength: f64, sea: &SeaState) -> f64 {
    roughness_factor_with(RoughnessModel::MillerBrown, grazing_angle, wavelength, sea)
}

pub fn roughness_factor_with(
    model: RoughnessModel,
    grazing_angle: f64,
    wavelength: f64,
    sea: &SeaState,
) -> f64 {
    let g = rayleigh_parameter(grazing_angle, wavelength, sea);
    let x = 2.0 * g * g;
    match model {
        RoughnessModel::MillerBrown => bessel_i0_scaled(x),
        RoughnessModel::Ament => (-x).exp(),
        RoughnessModel::None => 1.0,
    }
}

/// Smith's Gaussian-slope shadowing probability for a surface seen at
/// grazing angle `psi`.
pub fn shadowing_factor(grazing_angle: f64, sea: &SeaState) -> f64 {
    if sea.beta_0 == 0.0 {
        return 1.0;
    }
    if grazing_angle >= FRAC_PI_2 {
        return 1.0;
    }
    let nu = grazing_angle.tan() / (std::f64::consts::SQRT_2 * sea.beta_0);
    if nu <= 0.0 {
        return 0.0;
    }
    let lambda = 0.5 * ((-nu * nu).exp() / (nu * PI.sqrt()) - erfc(nu));
    ((1.0 - 0.5 * erfc(nu)) / (1.0 + lambda)).clamp(0.0, 1.0)
}

/// Spherical-earth divergence factor of the reflected ray.
pub fn divergence_factor(rg: &ReflectionGeometry, g: &LinkGeometry) -> f64 {
    let (x, xp) = (rg.tx_ground, rg.rx_ground);
    let spread = 2.0 * x * xp / (g.effective_radius() * (x + xp) * rg.grazing_angle.sin());
    (1.0 + spread).powf(-0.5)
}

/// Effective reflection coefficient at the specular point of `g`.
pub fn effective_reflection(
    g: &LinkGeometry,
    frequency_hz: f64,
    sea: &SeaState,
    pol: Polarization,
    opts: &ReflectionOptions,
) -> Result<(EffectiveReflection, ReflectionGeometry)> {
    let rg = reflection_geometry(g)?;
    let psi = rg.grazing_angle;
    let fresnel = fresnel_reflection(psi, frequency_hz, sea, pol);
    let roughness = roughness_factor_with(opts.roughness, psi, wavelength(frequency_hz), sea);
    let shadowing = if opts.shadowing {
        shadowing_factor(psi, sea)
    } else {
        1.0
    };
    let divergence = if opts.divergence {
        divergence_factor(&rg, g)
    } else {
        1.0
    };
    Ok((
        EffectiveReflection::from_factors(fresnel, roughness, shadowing, divergence),
        rg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{horizon_distance, EarthModel};
    use approx::assert_relative_eq;

    const F: f64 = 869.5e6;

    fn pec() -> SeaState {
        SeaState {
            conductivity: 1e12,
            ..SeaState::smooth()
        }
    }

    #[test]
    fn grazing_limit_is_minus_one() {
        let sea = SeaState::default();
        for pol in [Polarization::Vertical, Polarization::Horizontal] {
            let r = fresnel_reflection(1e-7, F, &sea, pol);
            assert!((r - Complex64::new(-1.0, 0.0)).norm() < 1e-4, "{pol:?} {r}");
        }
    }

    #[test]
    fn perfect_conductor_has_unit_magnitude() {
        for i in 1..=90 {
            let psi = (i as f64).to_radians();
            for pol in [Polarization::Vertical, Polarization::Horizontal] {
                let r = fresnel_reflection(psi, F, &pec(), pol);
                assert!((r.norm() - 1.0).abs() < 1e-4, "{psi} {pol:?} {r}");
            }
        }
    }

    #[test]
    fn horizontal_sea_water_at_ten_degrees() {
        // Direct evaluation of the Fresnel formula, done by hand here in
        // polar form as a second route.
        let sea = SeaState {
            relative_permittivity: 70.0,
            conductivity: 5.0,
            ..SeaState::smooth()
        };
        let psi = 10f64.to_radians();
        let loss = 5.0 / (2.0 * PI * F * EPSILON_0);
        // eps - cos^2 psi = (70 - cos^2) - j loss
        let re = 70.0 - psi.cos().powi(2);
        let mag = (re * re + loss * loss).sqrt().sqrt();
        let ang = -0.5 * loss.atan2(re);
        let (sr, si) = (mag * ang.cos(), mag * ang.sin());
        let s = psi.sin();
        let num_n = (s - sr).powi(2) + si * si;
        let den_n = (s + sr).powi(2) + si * si;
        let expected_mag = (num_n / den_n).sqrt();
        let expected_phase = (-si).atan2(s - sr) - (si).atan2(s + sr);
        let r = fresnel_reflection(psi, F, &sea, Polarization::Horizontal);
        assert!((r.norm() - expected_mag).abs() < 1e-12);
        let dphase = (r.arg() - expected_phase).rem_euclid(2.0 * PI);
        assert!(dphase < 1e-12 || 2.0 * PI - dphase < 1e-12);
        assert!(r.norm() > 0.8 && r.norm() < 1.0);
    }

    #[test]
    fn circular_uses_vertical_coefficient() {
        let sea = SeaState::default();
        let v = fresnel_reflection(0.02, F, &sea, Polarization::Vertical);
        let c = fresnel_reflection(0.02, F, &sea, Polarization::Circular);
        assert_eq!(v, c);
    }

    #[test]
    fn passive_magnitude_bounded() {
        let sea = SeaState::default();
        for i in 1..=1000 {
            let psi = FRAC_PI_2 * i as f64 / 1000.0;
            for pol in [Polarization::Vertical, Polarization::Horizontal] {
                assert!(fresnel_reflection(psi, F, &sea, pol).norm() <= 1.0);
            }
        }
    }

    #[test]
    fn roughness_limits_and_value() {
        let lambda = wavelength(F);
        assert_eq!(roughness_factor(0.1, lambda, &SeaState::smooth()), 1.0);
        // Pick sigma_h so that g = 0.5 at psi = 30 deg.
        let psi = 30f64.to_radians();
        let sea = SeaState {
            sigma_h: 0.5 * lambda / (2.0 * PI * psi.sin()),
            ..SeaState::default()
        };
        assert_relative_eq!(rayleigh_parameter(psi, lambda, &sea), 0.5, max_relative = 1e-12);
        // exp(-0.5) * I0(0.5), I0 by its power series.
        let i0: f64 = (0..30)
            .map(|k| 0.25f64.powi(2 * k) / (1..=k).map(|j| j as f64).product::<f64>().powi(2))
            .sum();
        let oracle = (-0.5f64).exp() * i0;
        assert!((oracle - 0.6450).abs() < 1e-4);
        assert!((roughness_factor(psi, lambda, &sea) - oracle).abs() < 1e-6);
        let rough = SeaState {
            sigma_h: 100.0,
            ..SeaState::default()
        };
        assert!(roughness_factor(1.0, lambda, &rough) < 1e-3);
    }

    #[test]
    fn ament_is_stronger_than_miller_brown() {
        let lambda = wavelength(F);
        let sea = SeaState {
            sigma_h: 0.3,
            ..SeaState::default()
        };
        for i in 1..50 {
            let psi = 0.01 * i as f64;
            let mb = roughness_factor_with(RoughnessModel::MillerBrown, psi, lambda, &sea);
            let am = roughness_factor_with(RoughnessModel::Ament, psi, lambda, &sea);
            assert!(am <= mb);
        }
    }

    #[test]
    fn shadowing_limits() {
        let smooth_slope = SeaState {
            beta_0: 0.0,
            ..SeaState::default()
        };
        assert_eq!(shadowing_factor(0.001, &smooth_slope), 1.0);
        let sea = SeaState::default();
        let mut prev = 0.0;
        for i in 1..200 {
            let s = shadowing_factor(0.005 * i as f64, &sea);
            assert!(s >= prev && (0.0..=1.0).contains(&s));
            prev = s;
        }
        assert!(shadowing_factor(1.0, &sea) > 0.9999);
    }

    #[test]
    fn divergence_flat_limit_and_monotone() {
        let flat = LinkGeometry::new(0.35, 5.2, 5_000.0, EarthModel::with_factor(1e9).unwrap()).unwrap();
        let rg = reflection_geometry(&flat).unwrap();
        assert!((divergence_factor(&rg, &flat) - 1.0).abs() < 1e-6);

        let base = LinkGeometry::new(0.35, 5.2, 1.0, EarthModel::default()).unwrap();
        let dh = horizon_distance(&base);
        let mut prev = 1.0;
        for i in 1..100 {
            let g = base.with_distance(dh * i as f64 / 100.0).unwrap();
            let rg = reflection_geometry(&g).unwrap();
            let dv = divergence_factor(&rg, &g);
            assert!(dv < prev && dv > 0.0);
            prev = dv;
        }
    }

    #[test]
    fn effective_reflection_identity_composition() {
        let g = LinkGeometry::new(0.35, 5.2, 2_000.0, EarthModel::with_factor(1e9).unwrap()).unwrap();
        let (r, _) = effective_reflection(&g, F, &pec(), Polarization::Horizontal, &ReflectionOptions::default()).unwrap();
        assert!((r.magnitude - 1.0).abs() < 1e-6);
        assert!((r.phase.abs() - PI).abs() < 1e-6);
    }

    #[test]
    fn effective_reflection_recomposes() {
        let base = LinkGeometry::new(0.35, 5.2, 1.0, EarthModel::default()).unwrap();
        for d in [100.0, 1_000.0, 5_000.0, 9_000.0] {
            let g = base.with_distance(d).unwrap();
            let (r, _) = effective_reflection(&g, F, &SeaState::default(), Polarization::Vertical, &ReflectionOptions::default()).unwrap();
            let product = r.fresnel.norm() * r.roughness * r.shadowing * r.divergence;
            assert!((product - r.magnitude).abs() < 1e-12);
            assert!(r.magnitude <= r.fresnel.norm());
        }
    }

    #[test]
    fn beyond_horizon_propagates_error() {
        let g = LinkGeometry::new(0.35, 5.2, 20_000.0, EarthModel::default()).unwrap();
        let res = effective_reflection(&g, F, &SeaState::default(), Polarization::Vertical, &ReflectionOptions::default());
        assert!(matches!(res, Err(Error::NoSpecularPoint { .. })));
    }
}
