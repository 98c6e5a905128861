//! Pairwise answer similarity and semantic clustering.

mod cluster;
pub mod rouge;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::GenerationRecord;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

pub use cluster::{cluster_bidirectional, ClusterAssignment, DEFAULT_ENTAIL_THRESHOLD};
pub use rouge::rouge_l;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityName {
    RougeL,
    Entail,
    Embed,
    Custom,
}

impl SimilarityName {
    /// The similarities a record can provide (natively or from ingested data).
    pub const MEASURED: [SimilarityName; 3] = [Self::RougeL, Self::Entail, Self::Embed];

    pub fn name(self) -> &'static str {
        match self {
            Self::RougeL => "rouge_l",
            Self::Entail => "entail",
            Self::Embed => "embed",
            Self::Custom => "custom",
        }
    }

    /// Whether `record` carries what this similarity needs.
    pub fn available_for(self, record: &GenerationRecord) -> bool {
        match self {
            Self::RougeL => true,
            Self::Entail => record.entailment.is_some(),
            Self::Embed => record.embed_sim.is_some(),
            Self::Custom => false,
        }
    }
}

impl fmt::Display for SimilarityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rouge_l" | "rouge-l" | "rougel" => Ok(Self::RougeL),
            "entail" => Ok(Self::Entail),
            "embed" => Ok(Self::Embed),
            "custom" => Ok(Self::Custom),
            other => Err(Error::UnknownSimilarity(other.to_string())),
        }
    }
}

/// An n×n matrix of f(aⁱ, aʲ) values under a named similarity function.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    name: SimilarityName,
    values: SquareMatrix,
    directed: bool,
}

impl SimilarityMatrix {
    /// ROUGE-L over all ordered pairs, self-pairs included.
    pub fn rouge_l<S: AsRef<str>>(texts: &[S]) -> Self {
        let tokens: Vec<_> = texts.iter().map(|t| rouge::tokenize(t.as_ref())).collect();
        let n = tokens.len();
        let mut values = SquareMatrix::zeros(n);
        for i in 0..n {
            values[(i, i)] = rouge::rouge_l_tokens(&tokens[i], &tokens[i]);
            for j in (i + 1)..n {
                let f = rouge::rouge_l_tokens(&tokens[i], &tokens[j]);
                values[(i, j)] = f;
                values[(j, i)] = f;
            }
        }
        Self {
            name: SimilarityName::RougeL,
            values,
            directed: false,
        }
    }

    pub fn entailment(values: SquareMatrix) -> Result<Self> {
        if let Some(v) = values.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!(
                "entailment value {v} outside [0,1]"
            )));
        }
        Ok(Self {
            name: SimilarityName::Entail,
            values,
            directed: true,
        })
    }

    pub fn embedding(values: SquareMatrix) -> Result<Self> {
        if let Some(v) = values
            .values()
            .iter()
            .find(|v| !v.is_finite() || v.abs() > 1.0 + 1e-9)
        {
            return Err(Error::InvalidInput(format!(
                "embedding value {v} outside [-1,1]"
            )));
        }
        if values.asymmetry() > 1e-9 {
            return Err(Error::InvalidInput(
                "embedding matrix is not symmetric".into(),
            ));
        }
        Ok(Self {
            name: SimilarityName::Embed,
            values,
            directed: false,
        })
    }

    /// Arbitrary similarity values. Entries may be −∞ (a pair that contributes
    /// nothing to a LogSumExp) but never NaN or +∞.
    pub fn custom(values: SquareMatrix) -> Result<Self> {
        if values
            .values()
            .iter()
            .any(|v| v.is_nan() || *v == f64::INFINITY)
        {
            return Err(Error::InvalidInput(
                "custom similarity contains NaN or +inf".into(),
            ));
        }
        let directed = values.asymmetry() != 0.0;
        Ok(Self {
            name: SimilarityName::Custom,
            values,
            directed,
        })
    }

    pub fn name(&self) -> SimilarityName {
        self.name
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// The same similarity after reindexing answers by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            values: self.values.permuted(perm),
            ..self.clone()
        }
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            name: SimilarityName::Custom,
            values: self.values.map(|v| v + c),
            directed: self.directed,
        }
    }
}

/// Builds the named similarity matrix for a record. ROUGE-L is computed here;
/// entailment and embedding matrices are validated views of ingested data.
pub fn build_matrix(record: &GenerationRecord, name: SimilarityName) -> Result<SimilarityMatrix> {
    let missing = |what| Error::Missing {
        id: record.id.clone(),
        what,
        by: format!("similarity `{name}`"),
    };
    match name {
        SimilarityName::RougeL => Ok(SimilarityMatrix::rouge_l(&record.texts())),
        SimilarityName::Entail => {
            let m = record
                .entailment
                .clone()
                .ok_or_else(|| missing("entailment matrix"))?;
            SimilarityMatrix::entailment(m)
        }
        SimilarityName::Embed => {
            let m = record
                .embed_sim
                .clone()
                .ok_or_else(|| missing("embed_sim matrix"))?;
            SimilarityMatrix::embedding(m)
        }
        SimilarityName::Custom => Err(Error::InvalidInput(
            "custom similarities are built from explicit values, not records".into(),
        )),
    }
}
