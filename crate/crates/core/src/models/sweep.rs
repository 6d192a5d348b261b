use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bullington_height_warning, Model, ModelContext, ModelId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" | "logarithmic" => Ok(Spacing::Log),
            _ => Err(Error::InvalidParameter(format!("unknown spacing '{s}'"))),
        }
    }
}

/// A grid point where the model could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingPoint {
    pub distance_m: f64,
    pub reason: String,
}

/// A model evaluated over a distance grid. Only evaluated points appear in
/// `distances`/`losses`; the rest are listed in `missing`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelCurve {
    pub model_id: ModelId,
    pub distances: Vec<f64>,
    pub losses: Vec<f64>,
    pub missing: Vec<MissingPoint>,
    pub warnings: Vec<String>,
}

impl ModelCurve {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.distances.iter().copied().zip(self.losses.iter().copied())
    }
}

/// `n_points` distances from `d_min` to `d_max` inclusive.
pub fn distance_grid(d_min: f64, d_max: f64, n_points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(d_min.is_finite() && d_max.is_finite() && d_min > 0.0 && d_min < d_max) {
        return Err(Error::InvalidParameter(format!(
            "distance range must satisfy 0 < dmin < dmax, got [{d_min}, {d_max}]"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidParameter("a sweep needs at least 2 points".into()));
    }
    let last = (n_points - 1) as f64;
    let mut grid: Vec<f64> = match spacing {
        Spacing::Linear => {
            let step = (d_max - d_min) / last;
            (0..n_points).map(|i| d_min + step * i as f64).collect()
        }
        Spacing::Log => {
            let (a, b) = (d_min.log10(), d_max.log10());
            let step = (b - a) / last;
            (0..n_points).map(|i| 10f64.powf(a + step * i as f64)).collect()
        }
    };
    grid[0] = d_min;
    grid[n_points - 1] = d_max;
    Ok(grid)
}

/// Evaluates `model` on a distance grid. Points are computed in parallel;
/// the output order and values do not depend on the thread count.
pub fn sweep(
    model: &Model,
    ctx: &ModelContext,
    d_min: f64,
    d_max: f64,
    n_points: usize,
    spacing: Spacing,
) -> Result<ModelCurve> {
    let grid = distance_grid(d_min, d_max, n_points, spacing)?;
    let results: Vec<Result<f64>> = grid.par_iter().map(|&d| ctx.evaluate(model, d)).collect();

    let mut curve = ModelCurve {
        model_id: model.id(),
        distances: Vec::with_capacity(grid.len()),
        losses: Vec::with_capacity(grid.len()),
        missing: Vec::new(),
        warnings: Vec::new(),
    };
    for (d, r) in grid.into_iter().zip(results) {
        match r {
            Ok(loss) => {
                curve.distances.push(d);
                curve.losses.push(loss);
            }
            Err(e) => curve.missing.push(MissingPoint {
                distance_m: d,
                reason: e.to_string(),
            }),
        }
    }
    if matches!(model, Model::Bullington) {
        if let Ok(g) = ctx.geometry(d_min) {
            if bullington_height_warning(&g, ctx.frequency_hz) {
                curve.warnings.push(format!(
                    "antenna height exceeds the scaled Bullington ceiling of {:.1} m at {:.1} MHz",
                    super::bullington_height_ceiling(ctx.frequency_hz),
                    ctx.frequency_hz / 1e6
                ));
            }
        }
    }
    Ok(curve)
}
