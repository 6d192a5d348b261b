use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::{reflection_geometry, wavelength, LinkGeometry, ReflectionGeometry};
use crate::sea::EffectiveReflection;

// -20 log10( lambda/(4 pi) * |1/l + R/r * exp(-j k (r - l))| )
//
// Phase convention exp(+j omega t), matching the sea permittivity
// eps_r - j sigma/(omega eps_0).
fn two_ray_db(direct: f64, reflected: f64, path_difference: f64, frequency_hz: f64, r: Complex64) -> f64 {
    let lambda = wavelength(frequency_hz);
    let k = 2.0 * PI / lambda;
    let field = Complex64::new(1.0 / direct, 0.0)
        + r / reflected * Complex64::from_polar(1.0, -k * path_difference);
    -20.0 * (lambda / (4.0 * PI) * field.norm()).log10()
}

/// Two-ray loss over a flat surface with reflection coefficient `r`.
pub fn two_ray_flat(distance_m: f64, tx_height: f64, rx_height: f64, frequency_hz: f64, r: Complex64) -> f64 {
    let d2 = distance_m * distance_m;
    let direct = (d2 + (tx_height - rx_height).powi(2)).sqrt();
    let reflected = (d2 + (tx_height + rx_height).powi(2)).sqrt();
    let delta = 4.0 * tx_height * rx_height / (direct + reflected);
    two_ray_db(direct, reflected, delta, frequency_hz, r)
}

/// Two-ray loss in round-earth geometry with an effective reflection
/// coefficient. Fails beyond the horizon.
pub fn two_ray_round_earth(g: &LinkGeometry, frequency_hz: f64, r_eff: &EffectiveReflection) -> Result<f64> {
    let rg = reflection_geometry(g)?;
    Ok(two_ray_with_geometry(&rg, frequency_hz, r_eff))
}

/// Round-earth two-ray loss from an already solved reflection geometry.
pub fn two_ray_with_geometry(rg: &ReflectionGeometry, frequency_hz: f64, r_eff: &EffectiveReflection) -> f64 {
    two_ray_db(rg.direct, rg.reflected_path(), rg.path_difference(), frequency_hz, r_eff.coefficient())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{critical_distance, horizon_distance, EarthModel};
    use crate::models::free_space_loss;

    const F: f64 = 869.5e6;
    const MINUS_ONE: Complex64 = Complex64::new(-1.0, 0.0);

    #[test]
    fn zero_reflection_is_free_space_over_direct_ray() {
        for d in [1.0, 10.0, 300.0, 5_000.0] {
            let l = (d * d + (5.2f64 - 0.35).powi(2)).sqrt();
            let got = two_ray_flat(d, 0.35, 5.2, F, Complex64::new(0.0, 0.0));
            assert!((got - free_space_loss(l, F)).abs() < 1e-10);
        }
    }

    #[test]
    fn far_field_asymptote() {
        let got = two_ray_flat(5_000.0, 0.35, 5.2, F, MINUS_ONE);
        let asymptote = 40.0 * 5_000f64.log10() - 20.0 * (0.35f64 * 5.2).log10();
        assert!((asymptote - 142.8).abs() < 0.05);
        assert!((got - asymptote).abs() < 0.5, "{got} vs {asymptote}");
    }

    #[test]
    fn nulls_at_analytic_positions() {
        // Phase difference k * 2 h_t h_r / d = 2 pi m gives d_m = 2 h_t h_r / (m lambda).
        // Heights well above lambda so the nulls sit at d >> h, where the
        // small-angle path difference is accurate.
        let (ht, hr) = (20.0, 30.0);
        let lambda = wavelength(F);
        for m in 1..=4 {
            let dm = 2.0 * ht * hr / (m as f64 * lambda);
            let at_null = two_ray_flat(dm, ht, hr, F, MINUS_ONE);
            let fs = free_space_loss(dm, F);
            assert!(at_null - fs > 20.0, "m={m} d={dm} excess {}", at_null - fs);
            // Local maximum of loss: neighbours on a 0.5 % grid are lower.
            for s in [0.995, 1.005] {
                assert!(two_ray_flat(dm * s, ht, hr, F, MINUS_ONE) < at_null);
            }
        }
    }

    #[test]
    fn oscillation_envelope_below_critical_distance() {
        // |1/l - 1/r e^{-j..}| lies between 1/l - 1/r and 1/l + 1/r, so the loss
        // never drops more than 6.02 dB below free space.
        let g_dc = critical_distance(
            &LinkGeometry::new(0.35, 5.2, 1.0, EarthModel::default()).unwrap(),
            wavelength(F),
        );
        for i in 1..1000 {
            let d = g_dc * i as f64 / 1000.0;
            let loss = two_ray_flat(d, 0.35, 5.2, F, MINUS_ONE);
            assert!(loss >= free_space_loss(d, F) - 6.0206 - 1e-9);
        }
    }

    #[test]
    fn round_earth_flat_limit() {
        let e = EarthModel::with_factor(1e9).unwrap();
        let r = EffectiveReflection::from_coefficient(MINUS_ONE);
        for d in [50.0, 500.0, 5_000.0] {
            let g = LinkGeometry::new(0.35, 5.2, d, e).unwrap();
            let round = two_ray_round_earth(&g, F, &r).unwrap();
            let flat = two_ray_flat(d, 0.35, 5.2, F, MINUS_ONE);
            assert!((round - flat).abs() < 1e-6, "{d}: {round} {flat}");
        }
    }

    #[test]
    fn round_earth_zero_reflection_is_free_space() {
        let g = LinkGeometry::new(0.35, 2.65, 1_000.0, EarthModel::default()).unwrap();
        let rg = reflection_geometry(&g).unwrap();
        let r = EffectiveReflection::from_coefficient(Complex64::new(0.0, 0.0));
        let got = two_ray_round_earth(&g, F, &r).unwrap();
        assert!((got - free_space_loss(rg.direct, F)).abs() < 1e-10);
    }

    #[test]
    fn round_earth_rejects_beyond_horizon() {
        let g = LinkGeometry::new(0.35, 2.65, 1.0, EarthModel::default()).unwrap();
        let g = g.with_distance(horizon_distance(&g) + 1.0).unwrap();
        let r = EffectiveReflection::from_coefficient(MINUS_ONE);
        assert!(two_ray_round_earth(&g, F, &r).is_err());
    }
}
