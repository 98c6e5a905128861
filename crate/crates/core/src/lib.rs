//! Uncertainty scores for sets of sampled LLM answers.
//!
//! The crate implements semantic nearest neighbor entropy (SNNE) and its
//! white-box variant WSNNE, semantic entropy and the usual black-box and
//! white-box baselines, plus the evaluation protocol used to compare them
//! (token-F1 correctness labels, AUROC, AUARC and PRR).
//!
//! ```
//! use snne_core::estimators::snne;
//! use snne_core::similarity::SimilarityMatrix;
//!
//! let sim = SimilarityMatrix::rouge_l(&["Paris", "Paris, France", "Lyon"]);
//! let score = snne(&sim, 1.0).unwrap();
//! assert!(score.is_finite());
//! ```

pub mod corpus;
pub mod error;
pub mod estimators;
pub mod matrix;
pub mod metrics;
pub mod runner;
pub mod similarity;

pub use error::{Error, Result};
