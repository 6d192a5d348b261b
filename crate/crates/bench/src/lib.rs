//! Shared fixtures for the benchmarks.

use sealoss_core::ModelContext;

pub const FREQUENCY_HZ: f64 = 869.5e6;

/// Model context for the higher (5.2 m) receiver campaign.
pub fn campaign_context() -> ModelContext {
    ModelContext::new(FREQUENCY_HZ, 0.35, 5.2)
}

/// Noise-free Bullington losses on a linear grid, for comparison benches.
pub fn campaign_samples(n: usize) -> sealoss_core::fit::SampleSet {
    let ctx = campaign_context();
    let pairs = (0..n)
        .map(|i| {
            let d = 60.0 + (9_790.0 - 60.0) * i as f64 / (n - 1) as f64;
            (d, ctx.evaluate(&sealoss_core::Model::Bullington, d).unwrap())
        })
        .collect();
    sealoss_core::fit::SampleSet::new("bench", pairs).unwrap()
}
