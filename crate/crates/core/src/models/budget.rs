use serde::Serialize;

use super::{Model, ModelContext, RadioConfig};
use crate::error::{Error, Result};

/// Largest distance searched by [`max_range`], just under half the earth's
/// circumference.
pub const RANGE_CAP_M: f64 = 20_000_000.0;
const MIN_RANGE_M: f64 = 1.0;
const SCAN_POINTS: usize = 8_000;

/// Maximum tolerable path loss: transmit power plus antenna gains, minus
/// polarization mismatch, minus receiver sensitivity.
pub fn link_budget_db(radio: &RadioConfig) -> f64 {
    radio.tx_power_dbm + radio.tx_antenna_gain_dbi + radio.rx_antenna_gain_dbi - radio.polarization_loss_db
        - radio.rx_sensitivity_dbm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeResult {
    pub range_m: f64,
    pub budget_db: f64,
    pub loss_at_range_db: f64,
}

/// Largest distance at which the link budget still closes.
///
/// Scans a log grid from 1 m to [`RANGE_CAP_M`] for the last point where
/// the loss fits the budget (two-ray curves oscillate, so the loss is not
/// monotone) and then bisects the crossing after it.
pub fn max_range(model: &Model, ctx: &ModelContext, radio: &RadioConfig) -> Result<RangeResult> {
    radio.validate()?;
    let budget = link_budget_db(radio);
    let fits = |d: f64| ctx.evaluate(model, d).map(|l| l <= budget).unwrap_or(false);

    if !fits(MIN_RANGE_M) {
        return Err(Error::NoCoverage(MIN_RANGE_M));
    }
    if fits(RANGE_CAP_M) {
        return Err(Error::Unbounded { cap_m: RANGE_CAP_M });
    }
    let ratio = (RANGE_CAP_M / MIN_RANGE_M).ln() / (SCAN_POINTS - 1) as f64;
    let at = |i: usize| MIN_RANGE_M * (ratio * i as f64).exp();
    let last_fit = (0..SCAN_POINTS).rev().find(|&i| fits(at(i))).unwrap_or(0);

    let (mut lo, mut hi) = (at(last_fit), at(last_fit + 1).min(RANGE_CAP_M));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    Ok(RangeResult {
        range_m: lo,
        budget_db: budget,
        loss_at_range_db: ctx.evaluate(model, lo)?,
    })
}
