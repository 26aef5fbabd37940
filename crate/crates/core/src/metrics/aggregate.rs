use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Length-weighted mean `Σ sᵢ·Lᵢ / Σ Lᵢ`.
pub fn weighted_average(scores: &[f64], lengths_sec: &[f64]) -> Result<f64, MetricsError> {
    if scores.len() != lengths_sec.len() {
        return Err(MetricsError::LengthMismatch { scores: scores.len(), lengths: lengths_sec.len() });
    }
    if scores.is_empty() {
        return Err(MetricsError::EmptyAggregate);
    }
    if let Some((index, &value)) = lengths_sec.iter().enumerate().find(|(_, &l)| !(l > 0.0 && l.is_finite())) {
        return Err(MetricsError::NonPositiveLength { index, value });
    }
    let total: f64 = lengths_sec.iter().sum();
    Ok(scores.iter().zip(lengths_sec).map(|(s, l)| s * l).sum::<f64>() / total)
}

/// Per-file metric row. PN fields are `None` when the file has no entities
/// (or no entity annotations were supplied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub file_id: String,
    pub length_sec: f64,
    pub wer: f64,
    pub pn_jaro: Option<f64>,
    pub pn_wer: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricAggregates {
    pub wer: Option<f64>,
    pub pn_jaro: Option<f64>,
    pub pn_wer: Option<f64>,
    pub total_length_sec: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub aggregates: MetricAggregates,
}

impl EvalReport {
    /// Builds the report and its length-weighted aggregates. Rows missing a
    /// metric are left out of that metric's average only.
    pub fn from_rows(rows: Vec<EvalRow>) -> Result<Self, MetricsError> {
        fn agg(rows: &[EvalRow], pick: impl Fn(&EvalRow) -> Option<f64>) -> Result<Option<f64>, MetricsError> {
            let (scores, lengths): (Vec<f64>, Vec<f64>) =
                rows.iter().filter_map(|r| pick(r).map(|s| (s, r.length_sec))).unzip();
            if scores.is_empty() {
                return Ok(None);
            }
            weighted_average(&scores, &lengths).map(Some)
        }
        let aggregates = MetricAggregates {
            wer: agg(&rows, |r| Some(r.wer))?,
            pn_jaro: agg(&rows, |r| r.pn_jaro)?,
            pn_wer: agg(&rows, |r| r.pn_wer)?,
            total_length_sec: rows.iter().map(|r| r.length_sec).sum(),
        };
        Ok(EvalReport { rows, aggregates })
    }

    /// CSV body: `file_id,length_sec,wer,pn_jaro,pn_wer`, empty cells for
    /// missing PN scores, followed by one `__aggregate__` row.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["file_id", "length_sec", "wer", "pn_jaro", "pn_wer"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.file_id.clone(),
                format!("{:.3}", r.length_sec),
                format!("{:.6}", r.wer),
                opt(r.pn_jaro),
                opt(r.pn_wer),
            ])?;
        }
        let a = &self.aggregates;
        w.write_record([
            "__aggregate__".to_string(),
            format!("{:.3}", a.total_length_sec),
            opt(a.wer),
            opt(a.pn_jaro),
            opt(a.pn_wer),
        ])?;
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        // (0.2·10 + 0.1·30) / 40 = 5 / 40
        assert_abs_diff_eq!(weighted_average(&[0.2, 0.1], &[10.0, 30.0]).unwrap(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn single_and_equal() {
        assert_abs_diff_eq!(weighted_average(&[0.7], &[3.0]).unwrap(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(weighted_average(&[0.1, 0.2, 0.6], &[5.0, 5.0, 5.0]).unwrap(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(weighted_average(&[0.1], &[1.0, 2.0]), Err(MetricsError::LengthMismatch { .. })));
        assert!(matches!(weighted_average(&[0.1], &[0.0]), Err(MetricsError::NonPositiveLength { index: 0, .. })));
        assert!(matches!(weighted_average(&[0.1, 0.2], &[1.0, -2.0]), Err(MetricsError::NonPositiveLength { index: 1, .. })));
        assert!(matches!(weighted_average(&[], &[]), Err(MetricsError::EmptyAggregate)));
    }

    #[test]
    fn report_aggregates_skip_missing_pn() {
        let rows = vec![
            EvalRow { file_id: "a".into(), length_sec: 10.0, wer: 0.2, pn_jaro: Some(10.0), pn_wer: None },
            EvalRow { file_id: "b".into(), length_sec: 30.0, wer: 0.1, pn_jaro: None, pn_wer: None },
        ];
        let rep = EvalReport::from_rows(rows).unwrap();
        assert_abs_diff_eq!(rep.aggregates.wer.unwrap(), 0.125, epsilon = 1e-15);
        assert_eq!(rep.aggregates.pn_jaro, Some(10.0));
        assert_eq!(rep.aggregates.pn_wer, None);
        let csv = rep.to_csv().unwrap();
        assert!(csv.lines().last().unwrap().starts_with("__aggregate__,40.000,0.125000,10.000000,"));
    }

    proptest! {
        #[test]
        fn rescaling_lengths_is_invariant(
            pairs in proptest::collection::vec((0.0f64..2.0, 0.1f64..100.0), 1..10),
            c in 0.01f64..100.0,
        ) {
            let (s, l): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let scaled: Vec<f64> = l.iter().map(|x| x * c).collect();
            let a = weighted_average(&s, &l).unwrap();
            let b = weighted_average(&s, &scaled).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
        }
    }
}
