//! Similarity constructions under which the clustering-free estimators reduce
//! to the clustering-based ones: SNNE → DSE and WSNNE → SE.
//!
//! Cross-cluster pairs get f = −∞, which `log_sum_exp` maps to an exact zero
//! contribution, so the reductions hold to rounding error.

use super::{dse, se, snne, wsnne, SequenceProbabilities};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::similarity::{ClusterAssignment, SimilarityMatrix};

/// f(aⁱ,aʲ) = τ·log(1/n) within a cluster, −∞ across clusters.
pub fn dse_construction(clusters: &ClusterAssignment, tau: f64) -> Result<SimilarityMatrix> {
    let n = clusters.n();
    let intra = tau * (1.0 / n as f64).ln();
    let m = SquareMatrix::from_fn(n, |i, j| {
        if clusters.same_cluster(i, j) {
            intra
        } else {
            f64::NEG_INFINITY
        }
    });
    SimilarityMatrix::custom(m)
}

/// f(aⁱ,aʲ) = τ·log(P̃(aʲ|q)/Q) within a cluster, −∞ across clusters.
/// Asymmetric: the value depends only on the column answer.
pub fn se_construction(
    clusters: &ClusterAssignment,
    probs: &SequenceProbabilities,
    tau: f64,
) -> Result<SimilarityMatrix> {
    let n = clusters.n();
    if probs.n() != n {
        return Err(Error::InvalidInput(format!(
            "partition covers {n} answers but {} probabilities given",
            probs.n()
        )));
    }
    let log_q = probs.log_q();
    let m = SquareMatrix::from_fn(n, |i, j| {
        if clusters.same_cluster(i, j) {
            tau * (probs.norm_log_p()[j] - log_q)
        } else {
            f64::NEG_INFINITY
        }
    });
    SimilarityMatrix::custom(m)
}

/// SNNE under the DSE construction alongside DSE itself.
pub fn verify_theorem1(clusters: &ClusterAssignment, tau: f64) -> Result<(f64, f64)> {
    let sim = dse_construction(clusters, tau)?;
    Ok((snne(&sim, tau)?, dse(clusters)?))
}

/// WSNNE under the SE construction alongside SE itself.
pub fn verify_theorem2(
    clusters: &ClusterAssignment,
    probs: &SequenceProbabilities,
    tau: f64,
) -> Result<(f64, f64)> {
    let sim = se_construction(clusters, probs, tau)?;
    Ok((wsnne(&sim, probs, tau)?, se(clusters, probs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn two_equal_clusters() {
        let (s, d) = verify_theorem1(&ClusterAssignment::from_sizes(&[5, 5]), 1.0).unwrap();
        assert!((s - LN_2).abs() < 1e-12);
        assert!((d - LN_2).abs() < 1e-15);
    }

    #[test]
    fn three_clusters_large_tau() {
        let (s, d) = verify_theorem1(&ClusterAssignment::from_sizes(&[3, 2, 1]), 10.0).unwrap();
        assert!((s - 1.011404).abs() < 1e-6);
        assert!((s - d).abs() <= 1e-10);
    }

    #[test]
    fn single_cluster_se_is_zero() {
        let probs = SequenceProbabilities::from_normalized(vec![-0.3, -1.2, -0.8]).unwrap();
        let (w, s) = verify_theorem2(&ClusterAssignment::from_sizes(&[3]), &probs, 1.0).unwrap();
        assert!(w.abs() < 1e-12);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn uniform_probabilities_reduce_to_dse() {
        let clusters = ClusterAssignment::from_labels(&[0, 1, 0, 2, 1, 0]);
        let probs = SequenceProbabilities::from_normalized(vec![-0.4; 6]).unwrap();
        let (w, s) = verify_theorem2(&clusters, &probs, 10.0).unwrap();
        let d = dse(&clusters).unwrap();
        assert!((w - d).abs() < 1e-12);
        assert!((s - d).abs() < 1e-12);
    }

    #[test]
    fn construction_is_asymmetric_and_blocks_cross_pairs() {
        let clusters = ClusterAssignment::from_labels(&[0, 0, 1]);
        let probs = SequenceProbabilities::from_normalized(vec![-0.1, -0.9, -0.5]).unwrap();
        let sim = se_construction(&clusters, &probs, 1.0).unwrap();
        assert!(sim.is_directed());
        assert_ne!(sim.get(0, 1), sim.get(1, 0));
        assert_eq!(sim.get(0, 2), f64::NEG_INFINITY);
    }
}
