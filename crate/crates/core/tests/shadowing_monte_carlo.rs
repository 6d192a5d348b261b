use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sealoss_core::sea::{shadowing_factor, SeaState};

/// Fraction of points on a 1-D Gaussian random surface that are lit by a
/// plane wave at grazing angle `psi`: the facet faces the wave and no
/// earlier part of the surface blocks the ray.
fn lit_fraction(heights: &[f64], dx: f64, psi: f64) -> f64 {
    let tan = psi.tan();
    let top = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let margin = 200;
    let mut lit = 0usize;
    let mut counted = 0usize;
    for i in margin..heights.len() - 1 {
        counted += 1;
        let slope = (heights[i + 1] - heights[i - 1]) / (2.0 * dx);
        if slope < -tan {
            continue;
        }
        let mut blocked = false;
        let mut j = i;
        while j > 0 {
            j -= 1;
            let ray = heights[i] + (i - j) as f64 * dx * tan;
            if ray > top {
                break;
            }
            if heights[j] > ray {
                blocked = true;
                break;
            }
        }
        if !blocked {
            lit += 1;
        }
    }
    lit as f64 / counted as f64
}

/// Gaussian surface from white noise smoothed by a Gaussian kernel.
fn surface(n: usize, kernel_sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (4.0 * kernel_sd) as isize;
    let w: Vec<f64> = (-half..=half)
        .map(|k| (-(k as f64).powi(2) / (2.0 * kernel_sd * kernel_sd)).exp())
        .collect();
    let noise: Vec<f64> = (0..n + w.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    (0..n)
        .map(|i| w.iter().enumerate().map(|(k, wk)| wk * noise[i + k]).sum())
        .collect()
}

#[test]
fn smith_agrees_with_simulation_at_psi_equal_beta() {
    let dx = 1.0;
    let h = surface(100_000, 10.0, 5);
    let slopes: Vec<f64> = h.windows(3).map(|w| (w[2] - w[0]) / (2.0 * dx)).collect();
    let beta_0 = (slopes.iter().map(|s| s * s).sum::<f64>() / slopes.len() as f64).sqrt();
    let sea = SeaState {
        beta_0,
        ..SeaState::default()
    };
    let psi = beta_0.atan();
    let simulated = lit_fraction(&h, dx, psi);
    let smith = shadowing_factor(psi, &sea);
    assert!((smith - simulated).abs() < 0.02, "Smith {smith:.4} vs simulated {simulated:.4}");
}

