//! Rejection curves: accuracy-rejection (AUARC) and prediction-rejection (PRR).

use serde::{Deserialize, Serialize};

use super::{sorted_by_uncertainty, LabeledScore};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionPoint {
    /// Fraction of examples rejected, most uncertain first.
    pub rejected: f64,
    pub value: f64,
}

/// Accuracy of the m least-uncertain examples for m = N..1.
pub fn accuracy_rejection_curve(scores: &[LabeledScore]) -> Vec<RejectionPoint> {
    let n = scores.len();
    let mut correct_prefix = Vec::with_capacity(n);
    let mut c = 0usize;
    for s in sorted_by_uncertainty(scores) {
        c += s.correct as usize;
        correct_prefix.push(c);
    }
    (1..=n)
        .rev()
        .map(|m| RejectionPoint {
            rejected: (n - m) as f64 / n as f64,
            value: correct_prefix[m - 1] as f64 / m as f64,
        })
        .collect()
}

/// Mean accuracy over the retention counts m = 1..N.
pub fn auarc(scores: &[LabeledScore]) -> Result<f64> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Metric {
            metric: "AUARC",
            reason: "no examples".into(),
        });
    }
    let mut c = 0usize;
    let mut total = 0.0;
    for (m, s) in sorted_by_uncertainty(scores).into_iter().enumerate() {
        c += s.correct as usize;
        total += c as f64 / (m + 1) as f64;
    }
    Ok(total / n as f64)
}

/// Mean retained quality after rejecting j = 0..N examples, given qualities in
/// retention order (kept first). Full rejection sits on the mean quality.
fn rejection_curve(ordered_quality: &[f64]) -> Vec<f64> {
    let n = ordered_quality.len();
    let mut prefix = Vec::with_capacity(n);
    let mut sum = 0.0;
    for q in ordered_quality {
        sum += q;
        prefix.push(sum);
    }
    let mean = sum / n as f64;
    (0..=n)
        .map(|j| {
            let kept = n - j;
            if kept == 0 {
                mean
            } else {
                prefix[kept - 1] / kept as f64
            }
        })
        .collect()
}

/// Trapezoidal area between a rejection curve and the constant mean quality.
fn area_above_mean(curve: &[f64], mean: f64) -> f64 {
    let n = curve.len() - 1;
    let mut total = 0.0;
    for j in 0..n {
        total += (curve[j] - mean) + (curve[j + 1] - mean);
    }
    0.5 * total / n as f64
}

fn quality_orders(scores: &[LabeledScore]) -> (Vec<f64>, Vec<f64>) {
    let by_method: Vec<f64> = sorted_by_uncertainty(scores)
        .into_iter()
        .map(|s| s.quality)
        .collect();
    let mut by_oracle = by_method.clone();
    by_oracle.sort_by(|a, b| b.total_cmp(a));
    (by_method, by_oracle)
}

/// Method and oracle prediction-rejection curves over j = 0..N rejections.
pub fn prediction_rejection_curve(
    scores: &[LabeledScore],
) -> Vec<(RejectionPoint, RejectionPoint)> {
    if scores.is_empty() {
        return vec![];
    }
    let n = scores.len();
    let (by_method, by_oracle) = quality_orders(scores);
    rejection_curve(&by_method)
        .into_iter()
        .zip(rejection_curve(&by_oracle))
        .enumerate()
        .map(|(j, (m, o))| {
            let rejected = j as f64 / n as f64;
            (
                RejectionPoint { rejected, value: m },
                RejectionPoint { rejected, value: o },
            )
        })
        .collect()
}

/// Prediction-rejection ratio: the method's area above the random-rejection
/// baseline divided by the oracle's (rejecting lowest quality first).
pub fn prr(scores: &[LabeledScore]) -> Result<f64> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::Metric {
            metric: "PRR",
            reason: format!("needs at least 2 examples, got {n}"),
        });
    }
    let (by_method, by_oracle) = quality_orders(scores);
    if by_oracle[0] == by_oracle[n - 1] {
        return Err(Error::Metric {
            metric: "PRR",
            reason: "all qualities are equal, so the oracle area is zero".into(),
        });
    }
    let mean = by_method.iter().sum::<f64>() / n as f64;
    let method_area = area_above_mean(&rejection_curve(&by_method), mean);
    let oracle_area = area_above_mean(&rejection_curve(&by_oracle), mean);
    Ok(method_area / oracle_area)
}
