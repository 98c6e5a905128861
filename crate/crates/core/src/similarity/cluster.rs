use serde::{Deserialize, Serialize};

use super::{SimilarityMatrix, SimilarityName};
use crate::error::{Error, Result};

pub const DEFAULT_ENTAIL_THRESHOLD: f64 = 0.5;

/// A partition of n answers into M semantic clusters.
///
/// Labels are canonical: cluster k is the k-th cluster to appear in answer
/// order, so `representatives[k]` is the smallest index labeled k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    representatives: Vec<usize>,
}

impl ClusterAssignment {
    /// Relabels any partition (arbitrary label values) into canonical form.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut representatives = Vec::new();
        let labels = raw
            .iter()
            .enumerate()
            .map(|(i, l)| {
                *remap.entry(*l).or_insert_with(|| {
                    representatives.push(i);
                    representatives.len() - 1
                })
            })
            .collect();
        Self {
            labels,
            representatives,
        }
    }

    /// Consecutive blocks of the given sizes: [2, 1] → labels [0, 0, 1].
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let raw: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
            .collect();
        Self::from_labels(&raw)
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of clusters M.
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn same_cluster(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    /// The partition after reindexing answers by `perm` (answer i of the
    /// result is answer perm[i] of `self`), relabeled canonically.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let raw: Vec<usize> = perm.iter().map(|&p| self.labels[p]).collect();
        Self::from_labels(&raw)
    }
}

/// Greedy bidirectional-entailment clustering.
///
/// Answers are visited in order; answer i joins the first existing cluster
/// whose representative r has entail[r][i] ≥ threshold and entail[i][r] ≥
/// threshold, else it founds a new cluster.
pub fn cluster_bidirectional(
    entail: &SimilarityMatrix,
    threshold: f64,
) -> Result<ClusterAssignment> {
    if entail.name() != SimilarityName::Entail {
        return Err(Error::InvalidInput(format!(
            "clustering needs an entailment matrix, got `{}`",
            entail.name()
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "entailment threshold {threshold} outside (0,1)"
        )));
    }
    let n = entail.n();
    let mut labels = Vec::with_capacity(n);
    let mut representatives: Vec<usize> = Vec::new();
    for i in 0..n {
        let found = representatives
            .iter()
            .position(|&r| entail.get(r, i) >= threshold && entail.get(i, r) >= threshold);
        match found {
            Some(k) => labels.push(k),
            None => {
                labels.push(representatives.len());
                representatives.push(i);
            }
        }
    }
    Ok(ClusterAssignment {
        labels,
        representatives,
    })
}
