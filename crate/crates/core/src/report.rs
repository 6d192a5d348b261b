//! Plain-text, CSV and JSON renderings of results.

use std::fmt::Write;

use crate::fit::{Comparison, ErrorReport, SampleSet};
use crate::models::ModelCurve;

/// Curves as `distance_m,loss_db,model_id` rows.
pub fn curves_csv(curves: &[ModelCurve]) -> String {
    let mut s = String::from("distance_m,loss_db,model_id\n");
    for c in curves {
        for (d, l) in c.points() {
            let _ = writeln!(s, "{d},{l},{}", c.model_id);
        }
    }
    s
}

pub fn samples_csv(samples: &SampleSet) -> String {
    let mut s = String::from("distance_m,loss_db\n");
    for (d, l) in &samples.pairs {
        let _ = writeln!(s, "{d},{l}");
    }
    s
}

pub fn error_table_csv(reports: &[ErrorReport]) -> String {
    let mut s = String::from("model_id,rmse_db,mae_db,mean_error_db,n_samples,excluded\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.model_id, r.rmse, r.mae, r.mean_error, r.n_samples, r.excluded
        );
    }
    s
}

/// Fixed-width table for terminals.
pub fn error_table_text(cmp: &Comparison) -> String {
    let mut s = format!(
        "{:<20} {:>9} {:>9} {:>10} {:>7} {:>8}\n",
        "model", "RMSE dB", "MAE dB", "bias dB", "n", "excluded"
    );
    for r in &cmp.reports {
        let _ = writeln!(
            s,
            "{:<20} {:>9.2} {:>9.2} {:>+10.2} {:>7} {:>8}",
            r.model_id.as_str(),
            r.rmse,
            r.mae,
            r.mean_error,
            r.n_samples,
            r.excluded
        );
    }
    for f in &cmp.failures {
        let _ = writeln!(s, "{:<20} not evaluated: {}", f.model_id.as_str(), f.reason);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelId;

    #[test]
    fn curve_rows() {
        let c = ModelCurve {
            model_id: ModelId::FreeSpace,
            distances: vec![100.0, 1000.0],
            losses: vec![71.25, 91.5],
            missing: vec![],
            warnings: vec![],
        };
        assert_eq!(
            curves_csv(&[c]),
            "distance_m,loss_db,model_id\n100,71.25,free_space\n1000,91.5,free_space\n"
        );
    }

    #[test]
    fn error_table_layout() {
        let r = ErrorReport::new(ModelId::Rel, &[100.0, 102.0], &[101.0, 103.0], 0).unwrap();
        let csv = error_table_csv(std::slice::from_ref(&r));
        assert_eq!(csv.lines().nth(1).unwrap(), "rel,1,1,-1,2,0");
        let text = error_table_text(&Comparison {
            reports: vec![r],
            failures: vec![],
        });
        assert!(text.lines().nth(1).unwrap().starts_with("rel "));
    }
}
