use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::confusion::{confusion_at_threshold, scalar_metrics, ConfusionMatrix};
use crate::curves::{pr_curve, roc_auc, CurveKind, CurveSeries};
use crate::error::{MetricsError, Result};
use crate::histogram::prob_histogram;

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_BINS: usize = 10;

/// Full evaluation of one model on one split: confusion counts, scalar
/// metrics, curve series and the predicted-probability histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub samples: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub roc_auc: Option<f64>,
    pub roc: CurveSeries,
    pub pr: CurveSeries,
    pub histogram: Vec<u64>,
}

impl EvalReport {
    /// Builds the report at the default threshold (0.5) with 10 histogram
    /// bins. Degenerate label sets leave the affected curve empty and its
    /// scalar undefined instead of failing the whole report.
    pub fn from_scores(model: impl Into<String>, scores: &[f64], labels: &[bool]) -> Result<Self> {
        let confusion = confusion_at_threshold(scores, labels, DEFAULT_THRESHOLD)?;
        let scalars = scalar_metrics(&confusion);
        let (roc, auc) = match roc_auc(scores, labels) {
            Ok((series, auc)) => (series, Some(auc)),
            Err(MetricsError::DegenerateLabels(_)) => (
                CurveSeries {
                    kind: CurveKind::Roc,
                    points: Vec::new(),
                },
                None,
            ),
            Err(e) => return Err(e),
        };
        let pr = match pr_curve(scores, labels) {
            Ok(series) => series,
            Err(MetricsError::DegenerateLabels(_)) => CurveSeries {
                kind: CurveKind::Pr,
                points: Vec::new(),
            },
            Err(e) => return Err(e),
        };
        let histogram = prob_histogram(scores, DEFAULT_BINS)?;
        Ok(Self {
            model: model.into(),
            samples: scores.len(),
            confusion,
            accuracy: scalars.accuracy,
            precision: scalars.precision,
            recall: scalars.recall,
            f1: scalars.f1,
            roc_auc: auc,
            roc,
            pr,
            histogram,
        })
    }
}

/// Flat key-value document with the scalar metrics and confusion counts.
/// Field order is fixed, so identical reports serialize byte-identically.
#[derive(Debug, Serialize, Deserialize)]
struct MetricsDoc {
    model: String,
    samples: usize,
    tp: u64,
    fp: u64,
    tn: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    accuracy: Option<f64>,
    precision: Option<f64>,
    recall: Option<f64>,
    f1: Option<f64>,
    roc_auc: Option<f64>,
}

pub fn write_metrics_json<W: Write>(report: &EvalReport, mut w: W) -> Result<()> {
    let doc = MetricsDoc {
        model: report.model.clone(),
        samples: report.samples,
        tp: report.confusion.tp,
        fp: report.confusion.fp,
        tn: report.confusion.tn,
        fn_: report.confusion.fn_,
        accuracy: report.accuracy,
        precision: report.precision,
        recall: report.recall,
        f1: report.f1,
        roc_auc: report.roc_auc,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// `threshold,x,y` rows; x/y are FPR/TPR for ROC and recall/precision for
/// PR curves.
pub fn write_curve_csv<W: Write>(series: &CurveSeries, mut w: W) -> Result<()> {
    writeln!(w, "threshold,x,y")?;
    for p in &series.points {
        writeln!(w, "{},{},{}", p.threshold, p.x, p.y)?;
    }
    Ok(())
}

pub fn write_confusion_csv<W: Write>(cm: &ConfusionMatrix, mut w: W) -> Result<()> {
    writeln!(w, "tp,fp,tn,fn")?;
    writeln!(w, "{},{},{},{}", cm.tp, cm.fp, cm.tn, cm.fn_)?;
    Ok(())
}

/// `bin_low,bin_high,count` rows over equal-width bins spanning [0, 1].
pub fn write_histogram_csv<W: Write>(histogram: &[u64], mut w: W) -> Result<()> {
    writeln!(w, "bin_low,bin_high,count")?;
    let bins = histogram.len();
    for (i, &count) in histogram.iter().enumerate() {
        let low = i as f64 / bins as f64;
        let high = (i + 1) as f64 / bins as f64;
        writeln!(w, "{low},{high},{count}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_from_scores_has_consistent_pieces() {
        let scores = [0.9, 0.8, 0.3, 0.4, 0.6];
        let labels = [true, true, false, false, true];
        let report = EvalReport::from_scores("demo", &scores, &labels).unwrap();
        assert_eq!(report.samples, 5);
        assert_eq!(report.confusion.total(), 5);
        assert_eq!(report.accuracy, Some(1.0));
        assert_eq!(report.roc_auc, Some(1.0));
        assert_eq!(report.histogram.iter().sum::<u64>(), 5);
    }

    #[test]
    fn degenerate_labels_leave_auc_undefined() {
        let report = EvalReport::from_scores("demo", &[0.9, 0.2], &[true, true]).unwrap();
        assert_eq!(report.roc_auc, None);
        assert!(report.roc.points.is_empty());
        assert_eq!(report.precision, Some(1.0));
        assert_eq!(report.recall, Some(0.5));
    }

    #[test]
    fn metrics_json_is_deterministic_and_null_for_undefined() {
        let report = EvalReport::from_scores("demo", &[0.2, 0.3], &[false, false]).unwrap();
        let mut a = Vec::new();
        write_metrics_json(&report, &mut a).unwrap();
        let mut b = Vec::new();
        write_metrics_json(&report, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("\"precision\": null"));
        assert!(text.contains("\"model\": \"demo\""));
    }

    #[test]
    fn curve_csv_round_trips_first_and_last() {
        let scores = [0.1, 0.4, 0.35, 0.8];
        let labels = [false, false, true, true];
        let (roc, _) = crate::roc_auc(&scores, &labels).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&roc, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "threshold,x,y");
        assert_eq!(lines[1], "inf,0,0");
        assert_eq!(lines.last().unwrap(), &"0.1,1,1");
    }
}
