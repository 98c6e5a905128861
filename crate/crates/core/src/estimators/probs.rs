use crate::corpus::GenerationRecord;
use crate::error::{Error, Result};

/// Sequence probabilities of a record's answers in the forms the white-box
/// estimators need.
///
/// The length-normalized likelihood P̃ = exp(log P / len) is kept as
/// `exp(norm_log_p − shift)` with `shift = max(norm_log_p)`, so the masses and
/// their total stay representable however small the raw likelihoods are.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceProbabilities {
    log_p: Vec<f64>,
    norm_log_p: Vec<f64>,
    shift: f64,
    scaled: Vec<f64>,
    scaled_total: f64,
    bar_p: Vec<f64>,
}

impl SequenceProbabilities {
    /// From per-answer sequence log-probabilities and token counts.
    pub fn new(log_p: Vec<f64>, lengths: &[usize]) -> Result<Self> {
        if log_p.is_empty() {
            return Err(Error::InvalidInput("no sequence probabilities".into()));
        }
        if log_p.len() != lengths.len() {
            return Err(Error::InvalidInput(format!(
                "{} log-probabilities but {} lengths",
                log_p.len(),
                lengths.len()
            )));
        }
        if let Some(bad) = log_p.iter().find(|v| !v.is_finite() || **v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sequence log-probability {bad} is not a finite value ≤ 0"
            )));
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidInput("zero answer length".into()));
        }
        let norm_log_p: Vec<f64> = log_p
            .iter()
            .zip(lengths)
            .map(|(lp, &len)| lp / len as f64)
            .collect();
        Ok(Self::from_norm(log_p, norm_log_p))
    }

    /// From length-normalized log-probabilities directly (lengths taken as 1).
    pub fn from_normalized(norm_log_p: Vec<f64>) -> Result<Self> {
        let lengths = vec![1; norm_log_p.len()];
        Self::new(norm_log_p, &lengths)
    }

    fn from_norm(log_p: Vec<f64>, norm_log_p: Vec<f64>) -> Self {
        let shift = norm_log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = norm_log_p.iter().map(|v| (v - shift).exp()).collect();
        let scaled_total: f64 = scaled.iter().sum();
        let bar_p = scaled.iter().map(|s| s / scaled_total).collect();
        Self {
            log_p,
            norm_log_p,
            shift,
            scaled,
            scaled_total,
            bar_p,
        }
    }

    /// Requires token log-probs on every answer.
    pub fn from_record(record: &GenerationRecord) -> Result<Self> {
        let mut log_p = Vec::with_capacity(record.n());
        let mut lengths = Vec::with_capacity(record.n());
        for a in &record.answers {
            let lp = a.sequence_log_prob().ok_or_else(|| Error::Missing {
                id: record.id.clone(),
                what: "token_logprobs",
                by: "white-box estimators".into(),
            })?;
            log_p.push(lp);
            lengths.push(a.token_count());
        }
        Self::new(log_p, &lengths)
    }

    pub fn n(&self) -> usize {
        self.log_p.len()
    }

    /// Sequence log-probabilities log P(aⁱ|q).
    pub fn log_p(&self) -> &[f64] {
        &self.log_p
    }

    /// log P(aⁱ|q) / len(aⁱ).
    pub fn norm_log_p(&self) -> &[f64] {
        &self.norm_log_p
    }

    /// P̃(aⁱ|q); may underflow to 0 for very unlikely answers.
    pub fn lin_tilde(&self) -> Vec<f64> {
        self.norm_log_p.iter().map(|v| v.exp()).collect()
    }

    /// P̃ divided by its largest entry; never underflows for the argmax.
    pub fn scaled_masses(&self) -> &[f64] {
        &self.scaled
    }

    /// Sum of `scaled_masses`.
    pub fn scaled_total(&self) -> f64 {
        self.scaled_total
    }

    /// log Q where Q = Σ P̃(aⁱ|q).
    pub fn log_q(&self) -> f64 {
        self.shift + self.scaled_total.ln()
    }

    pub fn q(&self) -> f64 {
        self.log_q().exp()
    }

    /// P̄(aⁱ|q) = P̃(aⁱ|q) / Q.
    pub fn bar_p(&self) -> &[f64] {
        &self.bar_p
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let log_p = perm.iter().map(|&p| self.log_p[p]).collect();
        let norm = perm.iter().map(|&p| self.norm_log_p[p]).collect();
        Self::from_norm(log_p, norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalizes_by_length() {
        let p = SequenceProbabilities::new(vec![-2.0, -3.0], &[2, 3]).unwrap();
        assert_eq!(p.norm_log_p(), [-1.0, -1.0]);
        assert_eq!(p.bar_p(), [0.5, 0.5]);
        assert!((p.q() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tiny_likelihoods_do_not_underflow() {
        let p = SequenceProbabilities::from_normalized(vec![-2000.0, -2000.0 - 2f64.ln()]).unwrap();
        assert_eq!(p.lin_tilde(), [0.0, 0.0]);
        assert!((p.bar_p()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.log_q() - (-2000.0 + 1.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SequenceProbabilities::new(vec![], &[]).is_err());
        assert!(SequenceProbabilities::new(vec![0.5], &[1]).is_err());
        assert!(SequenceProbabilities::new(vec![-0.5], &[0]).is_err());
        assert!(SequenceProbabilities::new(vec![-0.5, -1.0], &[1]).is_err());
    }

    proptest! {
        #[test]
        fn bar_p_sums_to_one(lp in proptest::collection::vec(-500.0f64..0.0, 1..40)) {
            let p = SequenceProbabilities::from_normalized(lp).unwrap();
            let total: f64 = p.bar_p().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(p.bar_p().iter().all(|&b| b > 0.0 && b <= 1.0));
            prop_assert!(p.q().is_finite());
        }
    }
}
