use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::record_quality;
use crate::corpus::{GenerationRecord, UncertaintyScore};
use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::metrics::{
    accuracy_rejection_curve, auarc, auroc, prediction_rejection_curve, prr, roc_points,
    LabeledScore, RejectionPoint,
};

/// A metric value, or the reason it is undefined for this method's data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricOutcome {
    Value(f64),
    Error(String),
}

impl MetricOutcome {
    fn from(result: Result<f64>) -> Self {
        match result {
            Ok(v) => Self::Value(v),
            Err(e) => Self::Error(e.to_string()),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(*v),
            Self::Error(_) => None,
        }
    }

    fn cell(&self) -> String {
        match self {
            Self::Value(v) => format!("{v:.4}"),
            Self::Error(_) => "n/a".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    /// (false positive rate, true positive rate), incorrect = positive.
    pub roc: Vec<(f64, f64)>,
    pub accuracy_rejection: Vec<RejectionPoint>,
    /// (method, oracle) retained-quality curves.
    pub prediction_rejection: Vec<(RejectionPoint, RejectionPoint)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub params: BTreeMap<String, String>,
    pub n: usize,
    pub n_correct: usize,
    pub auroc: MetricOutcome,
    pub auarc: MetricOutcome,
    pub prr: MetricOutcome,
    pub labels: Vec<LabeledScore>,
    pub curves: Curves,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub correctness_threshold: f64,
    pub records: usize,
    /// Records without gold answers or precomputed quality; their scores are skipped.
    pub unlabeled_records: Vec<String>,
    pub methods: Vec<MethodReport>,
}

/// Computes the three metrics for a set of labeled scores.
pub fn method_report(
    method: Method,
    params: BTreeMap<String, String>,
    labels: Vec<LabeledScore>,
) -> MethodReport {
    MethodReport {
        method,
        params,
        n: labels.len(),
        n_correct: labels.iter().filter(|l| l.correct).count(),
        auroc: MetricOutcome::from(auroc(&labels)),
        auarc: MetricOutcome::from(auarc(&labels)),
        prr: MetricOutcome::from(prr(&labels)),
        curves: Curves {
            roc: roc_points(&labels),
            accuracy_rejection: accuracy_rejection_curve(&labels),
            prediction_rejection: prediction_rejection_curve(&labels),
        },
        labels,
    }
}

type Group = (Method, BTreeMap<String, String>, Vec<LabeledScore>);

/// Joins scores to correctness labels and reports every method configuration
/// found in the scores, in order of first appearance.
pub fn evaluate(
    scores: &[UncertaintyScore],
    records: &[GenerationRecord],
    correctness_threshold: f64,
) -> Result<EvalReport> {
    let quality: HashMap<&str, Option<f64>> = records
        .iter()
        .map(|r| (r.id.as_str(), record_quality(r)))
        .collect();

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Group> = HashMap::new();
    for s in scores {
        let q = quality.get(s.record_id.as_str()).ok_or_else(|| {
            Error::InvalidInput(format!("score refers to unknown record `{}`", s.record_id))
        })?;
        let key = s.config_key();
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            let params = s
                .params
                .iter()
                .filter(|(k, _)| !k.starts_with("diag_"))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            (s.method, params, Vec::new())
        });
        if let Some(q) = q {
            entry.2.push(LabeledScore::new(
                s.record_id.clone(),
                s.value,
                *q,
                correctness_threshold,
            ));
        }
    }

    let methods = order
        .into_iter()
        .map(|key| {
            let (method, params, labels) = groups.remove(&key).expect("grouped key");
            method_report(method, params, labels)
        })
        .collect();
    Ok(EvalReport {
        correctness_threshold,
        records: records.len(),
        unlabeled_records: records
            .iter()
            .filter(|r| !r.is_labeled())
            .map(|r| r.id.clone())
            .collect(),
        methods,
    })
}

fn params_text(params: &BTreeMap<String, String>) -> String {
    if params.is_empty() {
        return "-".into();
    }
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Plain-text table: method, params, AUROC, AUARC, PRR, N, threshold.
pub fn render_table(report: &EvalReport) -> String {
    let rows: Vec<[String; 7]> = report
        .methods
        .iter()
        .map(|m| {
            [
                m.method.to_string(),
                params_text(&m.params),
                m.auroc.cell(),
                m.auarc.cell(),
                m.prr.cell(),
                m.n.to_string(),
                report.correctness_threshold.to_string(),
            ]
        })
        .collect();
    let header = [
        "method",
        "params",
        "AUROC",
        "AUARC",
        "PRR",
        "N",
        "threshold",
    ];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &cells);
    }
    for m in &report.methods {
        for (name, outcome) in [("AUROC", &m.auroc), ("AUARC", &m.auarc), ("PRR", &m.prr)] {
            if let MetricOutcome::Error(reason) = outcome {
                let _ = writeln!(out, "note: {} {name}: {reason}", m.method);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Answer;

    fn record(id: &str, greedy: &str, gold: &str) -> GenerationRecord {
        GenerationRecord {
            id: id.into(),
            question: "q".into(),
            answers: vec![Answer::new(greedy)],
            greedy_answer: Answer::new(greedy),
            gold_answers: if gold.is_empty() {
                vec![]
            } else {
                vec![gold.into()]
            },
            ptrue: None,
            quality: None,
            entailment: None,
            embed_sim: None,
        }
    }

    fn score(id: &str, method: Method, value: f64) -> UncertaintyScore {
        UncertaintyScore {
            record_id: id.into(),
            method,
            params: BTreeMap::new(),
            value,
        }
    }

    #[test]
    fn separating_method_scores_one() {
        let records = vec![
            record("a", "paris", "paris"),
            record("b", "lyon", "paris"),
            record("c", "rome", "rome"),
            record("d", "milan", "rome"),
        ];
        let scores = vec![
            score("a", Method::Snne, 0.1),
            score("b", Method::Snne, 0.9),
            score("c", Method::Snne, 0.2),
            score("d", Method::Snne, 0.8),
            score("a", Method::Dse, 1.0),
            score("b", Method::Dse, 1.0),
            score("c", Method::Dse, 1.0),
            score("d", Method::Dse, 1.0),
        ];
        let report = evaluate(&scores, &records, 0.5).unwrap();
        assert_eq!(report.methods.len(), 2);
        assert_eq!(report.methods[0].auroc, MetricOutcome::Value(1.0));
        assert_eq!(report.methods[0].prr, MetricOutcome::Value(1.0));
        assert_eq!(report.methods[1].auroc, MetricOutcome::Value(0.5));
        let table = render_table(&report);
        assert!(table.lines().next().unwrap().starts_with("method"));
        assert!(table.contains("1.0000"));
    }

    #[test]
    fn unknown_record_is_an_error() {
        let records = vec![record("a", "x", "x")];
        assert!(evaluate(&[score("zz", Method::Snne, 0.0)], &records, 0.5).is_err());
    }

    #[test]
    fn single_class_is_reported_per_method() {
        let records = vec![record("a", "x", "x"), record("b", "y", "y")];
        let scores = vec![score("a", Method::Snne, 0.1), score("b", Method::Snne, 0.3)];
        let report = evaluate(&scores, &records, 0.5).unwrap();
        assert!(matches!(report.methods[0].auroc, MetricOutcome::Error(_)));
        assert_eq!(report.methods[0].auarc, MetricOutcome::Value(1.0));
        assert!(render_table(&report).contains("note: snne AUROC"));
    }

    #[test]
    fn unlabeled_records_are_skipped() {
        let records = vec![record("a", "x", "x"), record("b", "y", "")];
        let scores = vec![score("a", Method::Snne, 0.1), score("b", Method::Snne, 0.3)];
        let report = evaluate(&scores, &records, 0.5).unwrap();
        assert_eq!(report.unlabeled_records, ["b"]);
        assert_eq!(report.methods[0].n, 1);
    }

    #[test]
    fn precomputed_quality_overrides_f1() {
        let mut r = record("a", "x", "y");
        r.quality = Some(0.75);
        let report = evaluate(&[score("a", Method::Snne, 0.0)], &[r], 0.5).unwrap();
        assert_eq!(report.methods[0].labels[0].quality, 0.75);
        assert!(report.methods[0].labels[0].correct);
    }
}
