//! Entropy-style estimators: SNNE, WSNNE, SE, DSE, naive entropy, LexSim,
//! NumSet and the pTrue pass-through.

use super::SequenceProbabilities;
use crate::corpus::GenerationRecord;
use crate::error::{Error, Result};
use crate::similarity::{ClusterAssignment, SimilarityMatrix};

/// Max-shifted log Σ exp(x). −∞ terms contribute exactly zero; an empty or
/// all −∞ input gives −∞.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.into_iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "scale factor tau must be positive, got {tau}"
        )));
    }
    Ok(())
}

/// log Σⱼ exp(f(aⁱ,aʲ)/τ) for every i. `include_self` exists for fault
/// injection in the verification suite; estimators always pass `true`.
pub(crate) fn row_log_sums(sim: &SimilarityMatrix, tau: f64, include_self: bool) -> Vec<f64> {
    sim.values()
        .rows()
        .enumerate()
        .map(|(i, row)| {
            let terms = row
                .iter()
                .enumerate()
                .filter(move |&(j, _)| include_self || j != i)
                .map(move |(_, &f)| f / tau);
            log_sum_exp(terms)
        })
        .collect()
}

pub(crate) fn snne_with(sim: &SimilarityMatrix, tau: f64, include_self: bool) -> Result<f64> {
    check_tau(tau)?;
    let n = sim.n();
    if n == 0 {
        return Err(Error::InvalidInput("SNNE needs at least one answer".into()));
    }
    let total: f64 = row_log_sums(sim, tau, include_self).iter().sum();
    Ok(-total / n as f64)
}

/// Semantic nearest neighbor entropy: −(1/n) Σᵢ log Σⱼ exp(f(aⁱ,aʲ)/τ),
/// self-pairs included.
pub fn snne(sim: &SimilarityMatrix, tau: f64) -> Result<f64> {
    snne_with(sim, tau, true)
}

pub(crate) fn wsnne_with(sim: &SimilarityMatrix, weights: &[f64], tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if sim.n() == 0 {
        return Err(Error::InvalidInput(
            "WSNNE needs at least one answer".into(),
        ));
    }
    if weights.len() != sim.n() {
        return Err(Error::InvalidInput(format!(
            "{} probabilities for {} answers",
            weights.len(),
            sim.n()
        )));
    }
    let rows = row_log_sums(sim, tau, true);
    // zero-weight rows are skipped so an unreachable −∞ row cannot produce NaN
    Ok(-weights
        .iter()
        .zip(&rows)
        .filter(|(w, _)| **w != 0.0)
        .map(|(w, r)| w * r)
        .sum::<f64>())
}

/// White-box SNNE: −Σᵢ P̄(aⁱ|q) log Σⱼ exp(f(aⁱ,aʲ)/τ).
pub fn wsnne(sim: &SimilarityMatrix, probs: &SequenceProbabilities, tau: f64) -> Result<f64> {
    wsnne_with(sim, probs.bar_p(), tau)
}

fn check_cover(clusters: &ClusterAssignment, n: usize) -> Result<()> {
    if clusters.n() != n {
        return Err(Error::InvalidInput(format!(
            "partition covers {} answers, expected {n}",
            clusters.n()
        )));
    }
    Ok(())
}

fn entropy_of(masses: impl IntoIterator<Item = f64>) -> f64 {
    -masses
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Semantic entropy over normalized cluster masses P̄(C_k) = Σ_{i∈C_k} P̃ᵢ / Q.
pub fn se(clusters: &ClusterAssignment, probs: &SequenceProbabilities) -> Result<f64> {
    check_cover(clusters, probs.n())?;
    let mut mass = vec![0.0; clusters.count()];
    for (&label, &m) in clusters.labels().iter().zip(probs.scaled_masses()) {
        mass[label] += m;
    }
    let total = probs.scaled_total();
    Ok(entropy_of(mass.into_iter().map(|m| m / total)))
}

/// Discrete semantic entropy over empirical cluster frequencies |C_k|/n.
pub fn dse(clusters: &ClusterAssignment) -> Result<f64> {
    let n = clusters.n();
    if n == 0 {
        return Err(Error::InvalidInput("DSE needs at least one answer".into()));
    }
    Ok(entropy_of(
        clusters.sizes().into_iter().map(|s| s as f64 / n as f64),
    ))
}

/// Monte-Carlo naive entropy: −(1/n) Σᵢ log P(aⁱ|q)/len(aⁱ).
pub fn naive_entropy(probs: &SequenceProbabilities) -> f64 {
    let v = probs.norm_log_p();
    -v.iter().sum::<f64>() / v.len() as f64
}

/// Negated mean off-diagonal similarity over unordered pairs.
pub fn lexsim(sim: &SimilarityMatrix) -> Result<f64> {
    let n = sim.n();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "LexSim needs at least 2 answers, got {n}"
        )));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += sim.get(i, j);
        }
    }
    Ok(-2.0 * total / (n * (n - 1)) as f64)
}

/// Number of semantic clusters.
pub fn num_set(clusters: &ClusterAssignment) -> f64 {
    clusters.count() as f64
}

/// 1 − pTrue: the model's own probability that its answer is false.
pub fn ptrue_passthrough(record: &GenerationRecord) -> Result<f64> {
    record.ptrue.map(|p| 1.0 - p).ok_or_else(|| Error::Missing {
        id: record.id.clone(),
        what: "ptrue",
        by: "ptrue".into(),
    })
}
