//! Browser demo over `snne-core`. Each exported function takes plain strings
//! and numbers from the page and returns a JSON document for it to draw.
//!
//! The same functions are callable natively (the `*_report` variants), which
//! is how they are tested.

use serde::Serialize;
use snne_core::estimators::theorems::{dse_construction, se_construction};
use snne_core::estimators::{deg, dse, lexsim, se, snne, sum_eigv, wsnne, SequenceProbabilities};
use snne_core::similarity::{ClusterAssignment, SimilarityMatrix};
use wasm_bindgen::prelude::*;

pub const MAX_ANSWERS: usize = 40;

fn answers(text: &str) -> Result<Vec<String>, String> {
    let list: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if list.is_empty() {
        return Err("enter at least one answer, one per line".into());
    }
    if list.len() > MAX_ANSWERS {
        return Err(format!("at most {MAX_ANSWERS} answers"));
    }
    Ok(list)
}

fn numbers<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| format!("`{s}` is not a valid {what}"))
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct SimilarityReport {
    pub answers: Vec<String>,
    /// ROUGE-L F-measure, row-major.
    pub matrix: Vec<Vec<f64>>,
    pub tau: f64,
    pub snne: f64,
    pub lexsim: f64,
    pub deg: f64,
    pub sum_eigv: f64,
}

pub fn similarity_report(text: &str, tau: f64) -> Result<SimilarityReport, String> {
    let answers = answers(text)?;
    let sim = SimilarityMatrix::rouge_l(&answers);
    Ok(SimilarityReport {
        matrix: sim.values().to_rows(),
        tau,
        snne: snne(&sim, tau).map_err(|e| e.to_string())?,
        lexsim: if answers.len() > 1 {
            lexsim(&sim).map_err(|e| e.to_string())?
        } else {
            0.0
        },
        deg: deg(&sim),
        sum_eigv: sum_eigv(&sim),
        answers,
    })
}

#[derive(Debug, Serialize)]
pub struct TauCurve {
    pub taus: Vec<f64>,
    pub snne: Vec<f64>,
    /// −log n − mean(f)/τ, approached as τ grows.
    pub large_tau: Vec<f64>,
    /// −mean_i max_j f(i,j)/τ, approached as τ shrinks.
    pub small_tau: Vec<f64>,
}

/// SNNE of the ROUGE-L matrix over a log-spaced τ grid from 10^lo to 10^hi.
pub fn tau_curve_report(text: &str, lo: f64, hi: f64, points: usize) -> Result<TauCurve, String> {
    if lo.is_nan() || hi.is_nan() || lo >= hi || !(2..=400).contains(&points) {
        return Err("need lo < hi and 2 to 400 points".into());
    }
    let answers = answers(text)?;
    let sim = SimilarityMatrix::rouge_l(&answers);
    let n = answers.len() as f64;
    let values = sim.values();
    let mean = values.values().iter().sum::<f64>() / (n * n);
    let mean_max = values
        .rows()
        .map(|r| r.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / n;
    let taus: Vec<f64> = (0..points)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (points - 1) as f64))
        .collect();
    let snne = taus
        .iter()
        .map(|&t| snne(&sim, t).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Ok(TauCurve {
        large_tau: taus.iter().map(|t| -n.ln() - mean / t).collect(),
        small_tau: taus.iter().map(|t| -mean_max / t).collect(),
        snne,
        taus,
    })
}

#[derive(Debug, Serialize)]
pub struct TheoremReport {
    pub labels: Vec<usize>,
    pub tau: f64,
    pub snne: f64,
    pub dse: f64,
    pub wsnne: f64,
    pub se: f64,
    /// Normalized answer probabilities used for WSNNE and SE.
    pub weights: Vec<f64>,
}

/// Cluster sizes and optional per-answer mean token log-probs (uniform when
/// empty) → both sides of the SNNE = DSE and WSNNE = SE reductions.
pub fn theorem_report(sizes: &str, log_probs: &str, tau: f64) -> Result<TheoremReport, String> {
    let sizes: Vec<usize> = numbers(sizes, "cluster size")?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err("cluster sizes must be positive integers".into());
    }
    let n: usize = sizes.iter().sum();
    if n > 200 {
        return Err("at most 200 answers in total".into());
    }
    let clusters = ClusterAssignment::from_sizes(&sizes);
    let mut lp: Vec<f64> = numbers(log_probs, "log-probability")?;
    if lp.is_empty() {
        lp = vec![-1.0; n];
    }
    if lp.len() != n {
        return Err(format!("{} log-probs given for {n} answers", lp.len()));
    }
    let probs = SequenceProbabilities::from_normalized(lp).map_err(|e| e.to_string())?;
    let err = |e: snne_core::Error| e.to_string();
    let snne_value = snne(&dse_construction(&clusters, tau).map_err(err)?, tau).map_err(err)?;
    let wsnne_value = wsnne(
        &se_construction(&clusters, &probs, tau).map_err(err)?,
        &probs,
        tau,
    )
    .map_err(err)?;
    Ok(TheoremReport {
        labels: clusters.labels().to_vec(),
        tau,
        snne: snne_value,
        dse: dse(&clusters).map_err(err)?,
        wsnne: wsnne_value,
        se: se(&clusters, &probs).map_err(err)?,
        weights: probs.bar_p().to_vec(),
    })
}

fn to_js<T: Serialize>(result: Result<T, String>) -> Result<String, JsValue> {
    result
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn similarity(answers: &str, tau: f64) -> Result<String, JsValue> {
    to_js(similarity_report(answers, tau))
}

#[wasm_bindgen]
pub fn tau_curve(answers: &str, lo: f64, hi: f64, points: usize) -> Result<String, JsValue> {
    to_js(tau_curve_report(answers, lo, hi, points))
}

#[wasm_bindgen]
pub fn theorems(sizes: &str, log_probs: &str, tau: f64) -> Result<String, JsValue> {
    to_js(theorem_report(sizes, log_probs, tau))
}
