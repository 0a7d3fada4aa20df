//! Binary-classification evaluation: confusion matrix, scalar metrics,
//! ROC and precision-recall curves, AUC, and probability histograms.
//!
//! All operations are pure functions over score/label slices. Metrics with
//! a zero denominator are reported as an explicit `None` ("n/a" in rendered
//! output), never silently as a number.

#![forbid(unsafe_code)]

mod confusion;
mod curves;
mod error;
mod histogram;
mod report;

pub use confusion::{confusion_at_threshold, scalar_metrics, ConfusionMatrix, ScalarMetrics};
pub use curves::{pr_curve, roc_auc, CurveKind, CurvePoint, CurveSeries};
pub use error::{MetricsError, Result};
pub use histogram::prob_histogram;
pub use report::{
    write_confusion_csv, write_curve_csv, write_histogram_csv, write_metrics_json, EvalReport,
};
