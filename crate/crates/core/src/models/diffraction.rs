//! First-term residue-series diffraction over a smooth sphere, in the
//! normalized-coordinate form of ITU-R P.526: attenuation function `F(X)`
//! plus the two height-gain functions `G(Y)`.

use crate::geometry::LinkGeometry;
use crate::sea::{Polarization, SeaState};

/// Normalized surface admittance `K` (P.526 units: `ae` in km, `f` in MHz).
pub fn surface_admittance(effective_radius_m: f64, frequency_hz: f64, sea: &SeaState, pol: Polarization) -> f64 {
    let ae_km = effective_radius_m / 1000.0;
    let f_mhz = frequency_hz / 1e6;
    let cond = 18_000.0 * sea.conductivity / f_mhz;
    let eps = sea.relative_permittivity;
    let k_h = 0.36 * (ae_km * f_mhz).powf(-1.0 / 3.0) * ((eps - 1.0).powi(2) + cond * cond).powf(-0.25);
    match pol {
        Polarization::Horizontal => k_h,
        Polarization::Vertical | Polarization::Circular => k_h * (eps * eps + cond * cond).sqrt(),
    }
}

fn beta(k: f64) -> f64 {
    let k2 = k * k;
    let k4 = k2 * k2;
    (1.0 + 1.6 * k2 + 0.67 * k4) / (1.0 + 4.5 * k2 + 1.53 * k4)
}

// Distance term, dB.
fn attenuation(x: f64) -> f64 {
    if x >= 1.6 {
        11.0 + 10.0 * x.log10() - 17.6 * x
    } else {
        -20.0 * x.log10() - 5.6488 * x.powf(1.425)
    }
}

// Height-gain term, dB, floored at 2 + 20 log10(K).
fn height_gain(y: f64, beta: f64, k: f64) -> f64 {
    let b = beta * y;
    let g = if b > 2.0 {
        17.6 * (b - 1.1).sqrt() - 5.0 * (b - 1.1).log10() - 8.0
    } else {
        20.0 * (b + 0.1 * b.powi(3)).log10()
    };
    g.max(2.0 + 20.0 * k.log10())
}

/// Diffraction loss in excess of free space, dB. Clamped at 0 dB where the
/// first residue term would predict a gain (well inside line of sight).
pub fn smooth_earth_diffraction_loss(g: &LinkGeometry, frequency_hz: f64, sea: &SeaState, pol: Polarization) -> f64 {
    let ae = g.effective_radius();
    let ae_km = ae / 1000.0;
    let f_mhz = frequency_hz / 1e6;
    let k = surface_admittance(ae, frequency_hz, sea, pol);
    let b = beta(k);
    let x = 2.188 * b * f_mhz.powf(1.0 / 3.0) * ae_km.powf(-2.0 / 3.0) * (g.distance() / 1000.0);
    let y_scale = 9.575e-3 * b * f_mhz.powf(2.0 / 3.0) * ae_km.powf(-1.0 / 3.0);
    let field_db = attenuation(x) + height_gain(y_scale * g.tx_height(), b, k) + height_gain(y_scale * g.rx_height(), b, k);
    (-field_db).max(0.0)
}
