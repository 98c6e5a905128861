//! Sweeps of the scale factor τ against the similarity function for SNNE and
//! WSNNE, laid out as a τ × similarity grid.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::evaluate::{method_report, MetricOutcome};
use super::{map_records, record_quality};
use crate::corpus::GenerationRecord;
use crate::error::{Error, Result};
use crate::estimators::theorems::{dse_construction, se_construction};
use crate::estimators::{snne, wsnne, Method, SequenceProbabilities, TAU_GRID};
use crate::metrics::LabeledScore;
use crate::similarity::{build_matrix, cluster_bidirectional, SimilarityName};

/// A similarity column of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Measured(SimilarityName),
    /// The clustering-reduction construction: τ·log(1/n) (SNNE) or
    /// τ·log(P̃ⱼ/Q) (WSNNE) within entailment clusters, −∞ across them.
    Construction,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Measured(s) => write!(f, "{s}"),
            Column::Construction => f.write_str("construction"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationGrid {
    pub taus: Vec<f64>,
    pub similarities: Vec<SimilarityName>,
    pub include_construction: bool,
    pub entail_threshold: f64,
    pub correctness_threshold: f64,
    pub jobs: usize,
}

impl Default for AblationGrid {
    fn default() -> Self {
        Self {
            taus: TAU_GRID.to_vec(),
            similarities: SimilarityName::MEASURED.to_vec(),
            include_construction: false,
            entail_threshold: crate::similarity::DEFAULT_ENTAIL_THRESHOLD,
            correctness_threshold: crate::metrics::DEFAULT_CORRECTNESS_THRESHOLD,
            jobs: 1,
        }
    }
}

impl AblationGrid {
    /// Sorted, deduplicated axes so the sweep is independent of input order.
    fn axes(&self) -> Result<(Vec<f64>, Vec<Column>)> {
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "tau must be positive, got {t}"
            )));
        }
        let mut taus = self.taus.clone();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let mut columns: Vec<Column> = self
            .similarities
            .iter()
            .filter(|s| **s != SimilarityName::Custom)
            .map(|&s| Column::Measured(s))
            .collect();
        if self.include_construction {
            columns.push(Column::Construction);
        }
        columns.sort();
        columns.dedup();
        Ok((taus, columns))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellOutcome {
    Computed {
        n: usize,
        auroc: MetricOutcome,
        auarc: MetricOutcome,
        prr: MetricOutcome,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub method: Method,
    pub column: Column,
    pub tau: f64,
    pub outcome: CellOutcome,
    /// Per-record scores in input order (empty when skipped).
    pub scores: Vec<f64>,
}

/// Largest per-record change of a (method, column) score across τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSpread {
    pub method: Method,
    pub column: Column,
    pub max_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub taus: Vec<f64>,
    pub columns: Vec<Column>,
    pub methods: Vec<Method>,
    pub cells: Vec<AblationCell>,
    pub tau_spread: Vec<TauSpread>,
}

impl AblationReport {
    pub fn cell(&self, method: Method, column: Column, tau: f64) -> Option<&AblationCell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.column == column && c.tau == tau)
    }

    pub fn spread(&self, method: Method, column: Column) -> Option<f64> {
        self.tau_spread
            .iter()
            .find(|s| s.method == method && s.column == column)
            .map(|s| s.max_spread)
    }
}

fn record_score(
    record: &GenerationRecord,
    method: Method,
    column: Column,
    tau: f64,
    entail_threshold: f64,
) -> Result<f64> {
    let probs = || SequenceProbabilities::from_record(record);
    match column {
        Column::Measured(name) => {
            let sim = build_matrix(record, name)?;
            match method {
                Method::Wsnne => wsnne(&sim, &probs()?, tau),
                _ => snne(&sim, tau),
            }
        }
        Column::Construction => {
            let entail = build_matrix(record, SimilarityName::Entail)?;
            let clusters = cluster_bidirectional(&entail, entail_threshold)?;
            match method {
                Method::Wsnne => {
                    let p = probs()?;
                    wsnne(&se_construction(&clusters, &p, tau)?, &p, tau)
                }
                _ => snne(&dse_construction(&clusters, tau)?, tau),
            }
        }
    }
}

fn skip_reason(records: &[GenerationRecord], method: Method, column: Column) -> Option<String> {
    let lacking = |pred: &dyn Fn(&GenerationRecord) -> bool, what: &str| {
        records
            .iter()
            .find(|r| !pred(r))
            .map(|r| format!("record `{}` has no {what}", r.id))
    };
    let sim_gap = match column {
        Column::Measured(SimilarityName::Entail) | Column::Construction => {
            lacking(&|r| r.entailment.is_some(), "entailment matrix")
        }
        Column::Measured(SimilarityName::Embed) => {
            lacking(&|r| r.embed_sim.is_some(), "embed_sim matrix")
        }
        Column::Measured(_) => None,
    };
    sim_gap.or_else(|| {
        (method == Method::Wsnne)
            .then(|| lacking(&|r| r.has_logprobs(), "token_logprobs"))
            .flatten()
    })
}

/// Runs the τ × similarity sweep for SNNE and WSNNE. Combinations whose data
/// is missing on any record are marked skipped, not failed.
pub fn ablate(records: &[GenerationRecord], grid: &AblationGrid) -> Result<AblationReport> {
    let (taus, columns) = grid.axes()?;
    let methods = vec![Method::Snne, Method::Wsnne];
    let quality: Vec<Option<f64>> = records.iter().map(record_quality).collect();
    let mut cells = Vec::new();
    let mut tau_spread = Vec::new();

    for &method in &methods {
        for &column in &columns {
            let skip = skip_reason(records, method, column);
            let mut per_tau: Vec<Vec<f64>> = Vec::new();
            for &tau in &taus {
                if let Some(reason) = &skip {
                    cells.push(AblationCell {
                        method,
                        column,
                        tau,
                        outcome: CellOutcome::Skipped {
                            reason: reason.clone(),
                        },
                        scores: vec![],
                    });
                    continue;
                }
                let scores: Vec<f64> = map_records(records, grid.jobs, |r| {
                    record_score(r, method, column, tau, grid.entail_threshold)
                })
                .into_iter()
                .collect::<Result<_>>()?;
                let labels: Vec<LabeledScore> = records
                    .iter()
                    .zip(&scores)
                    .zip(&quality)
                    .filter_map(|((r, &s), q)| {
                        q.map(|q| LabeledScore::new(r.id.clone(), s, q, grid.correctness_threshold))
                    })
                    .collect();
                let report = method_report(method, BTreeMap::new(), labels);
                cells.push(AblationCell {
                    method,
                    column,
                    tau,
                    outcome: CellOutcome::Computed {
                        n: report.n,
                        auroc: report.auroc,
                        auarc: report.auarc,
                        prr: report.prr,
                    },
                    scores: scores.clone(),
                });
                per_tau.push(scores);
            }
            if !per_tau.is_empty() {
                let max_spread = (0..records.len())
                    .map(|i| {
                        let (lo, hi) = per_tau
                            .iter()
                            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                                (lo.min(s[i]), hi.max(s[i]))
                            });
                        hi - lo
                    })
                    .fold(0.0, f64::max);
                tau_spread.push(TauSpread {
                    method,
                    column,
                    max_spread,
                });
            }
        }
    }

    Ok(AblationReport {
        taus,
        columns,
        methods,
        cells,
        tau_spread,
    })
}

/// One block per metric: rows are τ, columns are method × similarity.
pub fn render_ablation(report: &AblationReport) -> String {
    let mut out = String::new();
    let headers: Vec<(Method, Column)> = report
        .methods
        .iter()
        .flat_map(|&m| report.columns.iter().map(move |&c| (m, c)))
        .collect();
    for (index, name) in ["AUROC", "AUARC", "PRR"].into_iter().enumerate() {
        let _ = writeln!(out, "{name}");
        let mut line = format!("{:>8}", "tau");
        for (m, c) in &headers {
            line.push_str(&format!("  {:>18}", format!("{m}/{c}")));
        }
        let _ = writeln!(out, "{line}");
        for &tau in &report.taus {
            let mut line = format!("{tau:>8}");
            for &(m, c) in &headers {
                let cell = report
                    .cell(m, c, tau)
                    .map(|cell| outcome_cell(&cell.outcome, index))
                    .unwrap_or_default();
                line.push_str(&format!("  {cell:>18}"));
            }
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out);
    }
    for s in &report.tau_spread {
        let _ = writeln!(
            out,
            "tau spread {}/{}: {:.3e}",
            s.method, s.column, s.max_spread
        );
    }
    let mut skipped: Vec<String> = report
        .cells
        .iter()
        .filter_map(|c| match &c.outcome {
            CellOutcome::Skipped { reason } => {
                Some(format!("skipped {}/{}: {reason}", c.method, c.column))
            }
            _ => None,
        })
        .collect();
    skipped.dedup();
    for s in skipped {
        let _ = writeln!(out, "{s}");
    }
    out
}

fn outcome_cell(outcome: &CellOutcome, index: usize) -> String {
    match outcome {
        CellOutcome::Computed {
            auroc, auarc, prr, ..
        } => match [auroc, auarc, prr][index] {
            MetricOutcome::Value(v) => format!("{v:.4}"),
            MetricOutcome::Error(_) => "n/a".into(),
        },
        CellOutcome::Skipped { .. } => "skipped".into(),
    }
}
