//! Correctness labels and the evaluation metrics AUROC, AUARC and PRR.
//!
//! All sorting is by ascending uncertainty with ties broken by record id, so
//! results do not depend on input order or platform.

mod f1;
mod rejection;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use f1::{normalize_answer, token_f1};
pub use rejection::{
    accuracy_rejection_curve, auarc, prediction_rejection_curve, prr, RejectionPoint,
};

pub const DEFAULT_CORRECTNESS_THRESHOLD: f64 = 0.5;

/// An uncertainty score joined with the quality of the answer it describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub record_id: String,
    pub uncertainty: f64,
    /// Higher is better, in [0,1].
    pub quality: f64,
    /// quality ≥ the run's correctness threshold.
    pub correct: bool,
}

impl LabeledScore {
    pub fn new(
        record_id: impl Into<String>,
        uncertainty: f64,
        quality: f64,
        threshold: f64,
    ) -> Self {
        Self {
            record_id: record_id.into(),
            uncertainty,
            quality,
            correct: quality >= threshold,
        }
    }

    /// A score with a binary label; quality is 1 for correct, 0 otherwise.
    pub fn binary(record_id: impl Into<String>, uncertainty: f64, correct: bool) -> Self {
        Self {
            record_id: record_id.into(),
            uncertainty,
            quality: if correct { 1.0 } else { 0.0 },
            correct,
        }
    }
}

pub(crate) fn by_uncertainty(a: &LabeledScore, b: &LabeledScore) -> Ordering {
    a.uncertainty
        .total_cmp(&b.uncertainty)
        .then_with(|| a.record_id.cmp(&b.record_id))
}

/// Least uncertain first.
pub fn sorted_by_uncertainty(scores: &[LabeledScore]) -> Vec<&LabeledScore> {
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| by_uncertainty(a, b));
    sorted
}

/// Probability that a random incorrect example is more uncertain than a
/// random correct one, ties counted ½. Mann–Whitney U via mid-ranks.
pub fn auroc(scores: &[LabeledScore]) -> Result<f64> {
    let n_incorrect = scores.iter().filter(|s| !s.correct).count();
    let n_correct = scores.len() - n_incorrect;
    if n_incorrect == 0 || n_correct == 0 {
        return Err(Error::Metric {
            metric: "AUROC",
            reason: format!(
                "needs both classes, got {n_correct} correct and {n_incorrect} incorrect"
            ),
        });
    }
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.uncertainty.total_cmp(&b.uncertainty));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].uncertainty == sorted[i].uncertainty {
            j += 1;
        }
        // ranks i+1..=j share their mean
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        let incorrect_in_group = sorted[i..j].iter().filter(|s| !s.correct).count();
        rank_sum += mid_rank * incorrect_in_group as f64;
        i = j;
    }
    let n1 = n_incorrect as f64;
    let u = rank_sum - n1 * (n1 + 1.0) / 2.0;
    Ok(u / (n1 * n_correct as f64))
}

/// ROC curve with incorrect answers as the positive class, thresholding
/// uncertainty from high to low. Points are (false positive rate, true positive rate).
pub fn roc_points(scores: &[LabeledScore]) -> Vec<(f64, f64)> {
    let positives = scores.iter().filter(|s| !s.correct).count() as f64;
    let negatives = scores.len() as f64 - positives;
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| b.uncertainty.total_cmp(&a.uncertainty));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].uncertainty == sorted[i].uncertainty {
            if sorted[j].correct {
                fp += 1.0;
            } else {
                tp += 1.0;
            }
            j += 1;
        }
        let fpr = if negatives > 0.0 { fp / negatives } else { 0.0 };
        let tpr = if positives > 0.0 { tp / positives } else { 0.0 };
        points.push((fpr, tpr));
        i = j;
    }
    points
}
