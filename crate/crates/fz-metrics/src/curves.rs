use serde::{Deserialize, Serialize};

use crate::error::{MetricsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// x = false-positive rate, y = true-positive rate.
    Roc,
    /// x = recall, y = precision.
    Pr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

fn validate(scores: &[f64], labels: &[bool]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Indices sorted by descending score, grouped by distinct score value.
/// The callback receives `(threshold, cumulative_tp, cumulative_fp)` after
/// each group.
fn sweep_thresholds(scores: &[f64], labels: &[bool], mut visit: impl FnMut(f64, u64, u64)) {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        visit(t, tp, fp);
    }
}

/// ROC curve over every distinct score threshold plus the (0,0) sentinel,
/// and its area computed by trapezoidal integration.
///
/// The trapezoid rule over this construction equals the Mann-Whitney pair
/// statistic (ties counted 1/2), which the tests assert directly.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<(CurveSeries, f64)> {
    validate(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 {
        return Err(MetricsError::DegenerateLabels("no positive labels"));
    }
    if neg == 0 {
        return Err(MetricsError::DegenerateLabels("no negative labels"));
    }

    let mut points = vec![CurvePoint {
        threshold: f64::INFINITY,
        x: 0.0,
        y: 0.0,
    }];
    sweep_thresholds(scores, labels, |t, tp, fp| {
        points.push(CurvePoint {
            threshold: t,
            x: fp as f64 / neg as f64,
            y: tp as f64 / pos as f64,
        });
    });

    let mut auc = 0.0;
    for pair in points.windows(2) {
        auc += (pair[1].x - pair[0].x) * (pair[0].y + pair[1].y) / 2.0;
    }
    Ok((
        CurveSeries {
            kind: CurveKind::Roc,
            points,
        },
        auc,
    ))
}

/// Precision-recall pairs at every distinct score threshold in descending
/// threshold order. Points with no predicted positives would have undefined
/// precision and are omitted (the `>=` rule makes the first threshold
/// always predict at least one positive).
pub fn pr_curve(scores: &[f64], labels: &[bool]) -> Result<CurveSeries> {
    validate(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l).count() as u64;
    if pos == 0 {
        return Err(MetricsError::DegenerateLabels("no positive labels"));
    }
    let mut points = Vec::new();
    sweep_thresholds(scores, labels, |t, tp, fp| {
        if tp + fp > 0 {
            points.push(CurvePoint {
                threshold: t,
                x: tp as f64 / pos as f64,
                y: tp as f64 / (tp + fp) as f64,
            });
        }
    });
    Ok(CurveSeries {
        kind: CurveKind::Pr,
        points,
    })
}
