//! Log-distance fitting and model error metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{LogDistanceParams, Model, ModelContext, ModelId};

/// Measured (distance, path loss) pairs from one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    /// (distance in m, loss in dB).
    pub pairs: Vec<(f64, f64)>,
    pub source_id: String,
}

impl SampleSet {
    pub fn new(source_id: impl Into<String>, pairs: Vec<(f64, f64)>) -> Result<Self> {
        for &(d, l) in &pairs {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidParameter(format!("sample distance must be positive, got {d}")));
            }
            if !l.is_finite() {
                return Err(Error::InvalidParameter(format!("sample loss must be finite, got {l}")));
            }
        }
        Ok(SampleSet {
            pairs,
            source_id: source_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn losses(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    /// Averages samples into `n_bins` log-spaced distance bins. Each bin is
    /// represented by its geometric-mean distance and arithmetic-mean loss;
    /// empty bins are dropped.
    pub fn binned(&self, n_bins: usize) -> Result<SampleSet> {
        if n_bins == 0 {
            return Err(Error::InvalidParameter("bin count must be at least 1".into()));
        }
        if self.is_empty() {
            return Err(Error::Empty("samples"));
        }
        let lo = self.distances().fold(f64::INFINITY, f64::min).log10();
        let hi = self.distances().fold(f64::NEG_INFINITY, f64::max).log10();
        let width = (hi - lo) / n_bins as f64;
        let mut acc = vec![(0.0, 0.0, 0usize); n_bins];
        for &(d, l) in &self.pairs {
            let i = if width > 0.0 {
                (((d.log10() - lo) / width) as usize).min(n_bins - 1)
            } else {
                0
            };
            acc[i].0 += d.log10();
            acc[i].1 += l;
            acc[i].2 += 1;
        }
        let pairs = acc
            .into_iter()
            .filter(|b| b.2 > 0)
            .map(|(ld, l, n)| (10f64.powf(ld / n as f64), l / n as f64))
            .collect();
        Ok(SampleSet {
            pairs,
            source_id: format!("{} ({n_bins} bins)", self.source_id),
        })
    }
}

/// Least-squares log-distance fit with its standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDistanceFit {
    pub params: LogDistanceParams,
    /// Standard error of `n`; absent with fewer than three samples.
    pub n_std_error: Option<f64>,
    pub lp0_std_error: Option<f64>,
    /// Residual standard deviation in dB.
    pub residual_std_db: Option<f64>,
    pub n_samples: usize,
}

/// Ordinary least squares of loss against `10 log10(d / d0)`.
pub fn fit_log_distance(samples: &SampleSet, d0_m: f64) -> Result<LogDistanceParams> {
    fit_log_distance_with_errors(samples, d0_m).map(|f| f.params)
}

pub fn fit_log_distance_with_errors(samples: &SampleSet, d0_m: f64) -> Result<LogDistanceFit> {
    if !(d0_m.is_finite() && d0_m > 0.0) {
        return Err(Error::InvalidParameter(format!("reference distance must be positive, got {d0_m}")));
    }
    let n = samples.len();
    if n < 2 {
        return Err(Error::DegenerateFit);
    }
    let xs: Vec<f64> = samples.distances().map(|d| 10.0 * (d / d0_m).log10()).collect();
    let ys: Vec<f64> = samples.losses().collect();
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx <= 0.0 || samples.distances().all(|d| d == samples.pairs[0].0) {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let (mut n_se, mut lp0_se, mut resid) = (None, None, None);
    if n > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        let s2 = ssr / (nf - 2.0);
        n_se = Some((s2 / sxx).sqrt());
        lp0_se = Some((s2 * (1.0 / nf + x_mean * x_mean / sxx)).sqrt());
        resid = Some(s2.sqrt());
    }
    Ok(LogDistanceFit {
        params: LogDistanceParams::new(slope, intercept, d0_m)?,
        n_std_error: n_se,
        lp0_std_error: lp0_se,
        residual_std_db: resid,
        n_samples: n,
    })
}

fn check_lengths(predicted: &[f64], measured: &[f64]) -> Result<()> {
    if predicted.len() != measured.len() {
        return Err(Error::LengthMismatch {
            predicted: predicted.len(),
            measured: measured.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::Empty("error vectors"));
    }
    Ok(())
}

// Differences are scaled by their largest magnitude before squaring.
fn largest_error(predicted: &[f64], measured: &[f64]) -> f64 {
    predicted
        .iter()
        .zip(measured)
        .map(|(p, m)| (p - m).abs())
        .fold(0.0, f64::max)
}

/// Root-mean-square error.
pub fn rmse(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    check_lengths(predicted, measured)?;
    let scale = largest_error(predicted, measured);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mean_sq = predicted
        .iter()
        .zip(measured)
        .map(|(p, m)| ((p - m) / scale).powi(2))
        .sum::<f64>()
        / predicted.len() as f64;
    Ok(scale * mean_sq.sqrt())
}

/// Mean absolute error.
pub fn mae(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    check_lengths(predicted, measured)?;
    let scale = largest_error(predicted, measured);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mean_abs = predicted
        .iter()
        .zip(measured)
        .map(|(p, m)| (p - m).abs() / scale)
        .sum::<f64>()
        / predicted.len() as f64;
    Ok(scale * mean_abs)
}

/// RMSE and MAE of one model against a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub model_id: ModelId,
    pub rmse: f64,
    pub mae: f64,
    /// Mean of `predicted - measured`.
    pub mean_error: f64,
    pub mean_prediction: f64,
    pub n_samples: usize,
    /// Samples at which the model could not be evaluated.
    pub excluded: usize,
}

impl ErrorReport {
    pub fn new(model_id: ModelId, predicted: &[f64], measured: &[f64], excluded: usize) -> Result<Self> {
        let rmse = rmse(predicted, measured)?;
        let mae = mae(predicted, measured)?;
        assert!(
            mae <= rmse * (1.0 + 1e-12),
            "mean absolute error {mae} exceeds rms error {rmse}"
        );
        let n = predicted.len() as f64;
        let mean_error = predicted.iter().zip(measured).map(|(p, m)| p - m).sum::<f64>() / n;
        Ok(ErrorReport {
            model_id,
            rmse,
            mae,
            mean_error,
            mean_prediction: predicted.iter().sum::<f64>() / n,
            n_samples: predicted.len(),
            excluded,
        })
    }
}

/// A model that could not be evaluated at any sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFailure {
    pub model_id: ModelId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// Sorted by RMSE, ties by model id.
    pub reports: Vec<ErrorReport>,
    pub failures: Vec<ModelFailure>,
}

/// Scores every model on the samples and ranks them by RMSE. Samples where a
/// model is undefined are skipped for that model and counted in `excluded`.
pub fn compare_models(samples: &SampleSet, models: &[Model], ctx: &ModelContext) -> Result<Comparison> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    if models.is_empty() {
        return Err(Error::Empty("models"));
    }
    let outcomes: Vec<std::result::Result<ErrorReport, ModelFailure>> = models
        .par_iter()
        .map(|model| {
            let mut predicted = Vec::with_capacity(samples.len());
            let mut measured = Vec::with_capacity(samples.len());
            let mut last_error = None;
            for &(d, l) in &samples.pairs {
                match ctx.evaluate(model, d) {
                    Ok(p) => {
                        predicted.push(p);
                        measured.push(l);
                    }
                    Err(e) => last_error = Some(e),
                }
            }
            let excluded = samples.len() - predicted.len();
            if predicted.is_empty() {
                return Err(ModelFailure {
                    model_id: model.id(),
                    reason: last_error.map(|e| e.to_string()).unwrap_or_default(),
                });
            }
            ErrorReport::new(model.id(), &predicted, &measured, excluded).map_err(|e| ModelFailure {
                model_id: model.id(),
                reason: e.to_string(),
            })
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => reports.push(r),
            Err(f) => failures.push(f),
        }
    }
    reports.sort_by(|a, b| {
        a.rmse
            .total_cmp(&b.rmse)
            .then_with(|| a.model_id.as_str().cmp(b.model_id.as_str()))
    });
    failures.sort_by(|a, b| a.model_id.as_str().cmp(b.model_id.as_str()));
    Ok(Comparison { reports, failures })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn rmse_dominates_mae(v in prop::collection::vec((-200.0f64..200.0, -200.0f64..200.0), 1..200)) {
            let (p, m): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let r = rmse(&p, &m).unwrap();
            let a = mae(&p, &m).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(r >= a * (1.0 - 1e-12));
        }

        #[test]
        fn rmse_matches_two_pass_sum(v in prop::collection::vec((-200.0f64..200.0, -200.0f64..200.0), 100)) {
            let (p, m): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let mut sq = 0.0;
            let mut ab = 0.0;
            for i in 0..p.len() {
                sq += (p[i] - m[i]) * (p[i] - m[i]);
                ab += (p[i] - m[i]).abs();
            }
            let oracle_r = (sq / 100.0).sqrt();
            let oracle_a = ab / 100.0;
            prop_assert!((rmse(&p, &m).unwrap() - oracle_r).abs() <= 1e-12 * oracle_r.max(1.0));
            prop_assert!((mae(&p, &m).unwrap() - oracle_a).abs() <= 1e-12 * oracle_a.max(1.0));
        }

        #[test]
        fn fit_invariant_to_order(seed in 0u64..1000, n in 1.5f64..5.0, lp0 in 40.0f64..120.0) {
            let mut pairs: Vec<(f64, f64)> = (0..40)
                .map(|i| {
                    let d = 50.0 + 37.0 * i as f64;
                    let wobble = (((i as u64 * 2654435761 + seed) % 1000) as f64 / 1000.0 - 0.5) * 4.0;
                    (d, lp0 + 10.0 * n * (d / 100.0).log10() + wobble)
                })
                .collect();
            let a = fit_log_distance(&SampleSet::new("a", pairs.clone()).unwrap(), 100.0).unwrap();
            pairs.reverse();
            pairs.rotate_left((seed % 40) as usize);
            let b = fit_log_distance(&SampleSet::new("b", pairs).unwrap(), 100.0).unwrap();
            prop_assert!((a.n - b.n).abs() < 1e-9);
            prop_assert!((a.lp0_db - b.lp0_db).abs() < 1e-9);
        }
    }
}
