//! Uncertainty estimators. Every estimator returns "higher = more uncertain".

mod entropy;
pub mod graph;
mod probs;
pub mod theorems;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use entropy::{
    dse, lexsim, log_sum_exp, naive_entropy, num_set, ptrue_passthrough, se, snne, wsnne,
};
pub(crate) use entropy::{snne_with, wsnne_with};
pub use graph::{deg, eccen, sum_eigv};
pub use probs::SequenceProbabilities;
pub use theorems::{verify_theorem1, verify_theorem2};

/// Default LogSumExp scale factor.
pub const DEFAULT_TAU: f64 = 1.0;

/// Scale factors swept by ablations.
pub const TAU_GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Snne,
    Wsnne,
    Se,
    Dse,
    Ne,
    LexSim,
    PTrue,
    NumSet,
    SumEigv,
    Deg,
    Eccen,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Method::Snne,
        Method::Wsnne,
        Method::Se,
        Method::Dse,
        Method::Ne,
        Method::LexSim,
        Method::PTrue,
        Method::NumSet,
        Method::SumEigv,
        Method::Deg,
        Method::Eccen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Snne => "snne",
            Method::Wsnne => "wsnne",
            Method::Se => "se",
            Method::Dse => "dse",
            Method::Ne => "ne",
            Method::LexSim => "lexsim",
            Method::PTrue => "ptrue",
            Method::NumSet => "numset",
            Method::SumEigv => "sumeigv",
            Method::Deg => "deg",
            Method::Eccen => "eccen",
        }
    }

    /// Needs token log-probs on every answer.
    pub fn is_white_box(self) -> bool {
        matches!(self, Method::Wsnne | Method::Se | Method::Ne)
    }

    /// Needs semantic clusters, hence the entailment matrix.
    pub fn needs_clusters(self) -> bool {
        matches!(self, Method::Se | Method::Dse | Method::NumSet)
    }

    /// Consumes the run's configured similarity matrix.
    pub fn uses_similarity(self) -> bool {
        matches!(
            self,
            Method::Snne | Method::Wsnne | Method::SumEigv | Method::Deg | Method::Eccen
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}
