//! Special functions that are not in std.

pub use statrs::function::erf::erfc;

/// Exponentially scaled modified Bessel function of the first kind, order
/// zero: `exp(-|x|) * I0(x)`.
///
/// Polynomial approximations from Abramowitz & Stegun 9.8.1 and 9.8.2,
/// relative error below 2e-7.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 3.75 {
        let t = (ax / 3.75).powi(2);
        let i0 = 1.0
            + t * (3.515_622_9
                + t * (3.089_942_4
                    + t * (1.206_749_2 + t * (0.265_973_2 + t * (0.036_076_8 + t * 0.004_581_3)))));
        i0 * (-ax).exp()
    } else {
        let t = 3.75 / ax;
        let poly = 0.398_942_28
            + t * (0.013_285_92
                + t * (0.002_253_19
                    + t * (-0.001_575_65
                        + t * (0.009_162_81
                            + t * (-0.020_577_06
                                + t * (0.026_355_37 + t * (-0.016_476_33 + t * 0.003_923_77)))))));
        poly / ax.sqrt()
    }
}
