//! Reproducible runs tying ingestion, similarity, estimators and metrics
//! together. Everything here is deterministic for a fixed config and seed;
//! the number of worker threads never changes results.

pub mod ablate;
pub mod evaluate;
pub mod score;
pub mod verify;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::GenerationRecord;
use crate::error::{Error, Result};
use crate::estimators::{Method, DEFAULT_TAU};
use crate::metrics::DEFAULT_CORRECTNESS_THRESHOLD;
use crate::similarity::{SimilarityName, DEFAULT_ENTAIL_THRESHOLD};

pub use ablate::{ablate, AblationGrid, AblationReport};
pub use evaluate::{evaluate, EvalReport};
pub use score::{check_requirements, render_score_file, score_records};
pub use verify::{verify, Fault, VerifyOptions, VerifyReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub similarity: SimilarityName,
    pub tau: f64,
    pub entail_threshold: f64,
    pub eccen_k: Option<usize>,
    pub correctness_threshold: f64,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            output: None,
            methods: vec![Method::Snne],
            similarity: SimilarityName::RougeL,
            tau: DEFAULT_TAU,
            entail_threshold: DEFAULT_ENTAIL_THRESHOLD,
            eccen_k: None,
            correctness_threshold: DEFAULT_CORRECTNESS_THRESHOLD,
            seed: 0,
            jobs: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods requested".into()));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.entail_threshold > 0.0 && self.entail_threshold < 1.0) {
            return Err(Error::InvalidInput(format!(
                "entail threshold must lie in (0,1), got {}",
                self.entail_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.correctness_threshold) {
            return Err(Error::InvalidInput(format!(
                "correctness threshold must lie in [0,1], got {}",
                self.correctness_threshold
            )));
        }
        if self.similarity == SimilarityName::Custom {
            return Err(Error::InvalidInput(
                "runs use rouge_l, entail or embed similarity".into(),
            ));
        }
        if self.eccen_k == Some(0) {
            return Err(Error::InvalidInput("eccen k must be positive".into()));
        }
        Ok(())
    }

    /// The config as written into run headers. Output location and thread
    /// count are left out since they never change results.
    pub fn header(&self) -> serde_json::Value {
        serde_json::json!({
            "input": self.input,
            "methods": self.methods,
            "similarity": self.similarity,
            "tau": self.tau,
            "entail_threshold": self.entail_threshold,
            "eccen_k": self.eccen_k,
            "correctness_threshold": self.correctness_threshold,
            "seed": self.seed,
        })
    }
}

/// Maps `f` over records, in input order, on up to `jobs` threads.
pub(crate) fn map_records<T, F>(records: &[GenerationRecord], jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&GenerationRecord) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 && records.len() > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| records.par_iter().map(&f).collect());
        }
    }
    let _ = jobs;
    records.iter().map(f).collect()
}

/// Quality of the greedy answer: the precomputed value when ingested, else
/// token-F1 against the gold answers. `None` for unlabeled records.
pub fn record_quality(record: &GenerationRecord) -> Option<f64> {
    if let Some(q) = record.quality {
        return Some(q);
    }
    if record.gold_answers.is_empty() {
        return None;
    }
    Some(crate::metrics::token_f1(
        &record.greedy_answer.text,
        &record.gold_answers,
    ))
}
