//! Generation records, pairwise-score sidecars and score files.
//!
//! Every file is UTF-8 with one JSON object per line. Pairwise matrices are
//! stored inline as arrays of rows (row index = premise for entailment).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::matrix::{RawMatrix, SquareMatrix};

/// Tolerance for the symmetry and unit-diagonal checks on embedding matrices.
pub const EMBED_TOLERANCE: f64 = 1e-9;

/// One generated answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub text: String,
    /// Natural-log probability of each generated token, all ≤ 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_logprobs: Option<Vec<f64>>,
    /// Marks an intentionally empty (or otherwise degenerate) generation.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl Answer {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            token_logprobs: None,
            degenerate: false,
        }
    }

    pub fn with_logprobs(text: impl Into<String>, logprobs: Vec<f64>) -> Self {
        Self {
            token_logprobs: Some(logprobs),
            ..Self::new(text)
        }
    }

    /// Length used for normalization: the number of recorded token log-probs,
    /// else the whitespace-token count of the text (at least 1).
    pub fn token_count(&self) -> usize {
        match &self.token_logprobs {
            Some(lp) => lp.len(),
            None => self.text.split_whitespace().count().max(1),
        }
    }

    /// Sequence log-probability, the sum of token log-probs.
    pub fn sequence_log_prob(&self) -> Option<f64> {
        self.token_logprobs.as_ref().map(|lp| lp.iter().sum())
    }

    fn validate(&self, id: &str, what: &str) -> Result<()> {
        if self.text.is_empty() && !self.degenerate {
            return Err(Error::invalid(
                id,
                format!("{what} has empty text but is not flagged degenerate"),
            ));
        }
        if let Some(lp) = &self.token_logprobs {
            if lp.is_empty() {
                return Err(Error::invalid(
                    id,
                    format!("{what} has an empty token_logprobs list"),
                ));
            }
            if let Some(bad) = lp.iter().find(|v| !v.is_finite() || **v > 0.0) {
                return Err(Error::invalid(
                    id,
                    format!("{what} has token log-prob {bad}, expected a finite value ≤ 0"),
                ));
            }
        }
        Ok(())
    }
}

/// One question with its sampled answers and everything ingested alongside them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub id: String,
    pub question: String,
    pub answers: Vec<Answer>,
    pub greedy_answer: Answer,
    pub gold_answers: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptrue: Option<f64>,
    /// Precomputed answer quality in [0,1] (summarization/translation tasks).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
    /// Entailment probabilities, row = premise, column = hypothesis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entailment: Option<SquareMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embed_sim: Option<SquareMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    id: String,
    question: String,
    answers: Vec<Answer>,
    greedy_answer: Answer,
    #[serde(default)]
    gold_answers: Vec<String>,
    #[serde(default)]
    ptrue: Option<f64>,
    #[serde(default)]
    quality: Option<f64>,
    #[serde(default)]
    entailment: Option<RawMatrix>,
    #[serde(default)]
    embed_sim: Option<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SidecarLine {
    id: String,
    #[serde(default)]
    entailment: Option<RawMatrix>,
    #[serde(default)]
    embed_sim: Option<RawMatrix>,
}

fn square(id: &str, matrix: &'static str, raw: RawMatrix, n: usize) -> Result<SquareMatrix> {
    let rows = raw.0.len();
    let cols = raw.0.iter().map(Vec::len).find(|&c| c != n).unwrap_or(n);
    if rows != n || cols != n {
        return Err(Error::Shape {
            id: id.to_string(),
            matrix,
            rows,
            cols,
            n,
        });
    }
    Ok(SquareMatrix::from_rows(raw.0).expect("shape checked"))
}

impl GenerationRecord {
    pub fn n(&self) -> usize {
        self.answers.len()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.answers.iter().map(|a| a.text.as_str()).collect()
    }

    pub fn has_logprobs(&self) -> bool {
        self.answers.iter().all(|a| a.token_logprobs.is_some())
    }

    /// Records without gold answers or a precomputed quality cannot be labeled.
    pub fn is_labeled(&self) -> bool {
        self.quality.is_some() || !self.gold_answers.is_empty()
    }

    /// Checks every type invariant; loaders call this on each parsed record.
    pub fn validate(&self) -> Result<()> {
        let id = self.id.as_str();
        let n = self.n();
        if n == 0 {
            return Err(Error::invalid(id, "record has no answers"));
        }
        for (i, a) in self.answers.iter().enumerate() {
            a.validate(id, &format!("answer {i}"))?;
        }
        self.greedy_answer.validate(id, "greedy_answer")?;
        if let Some(p) = self.ptrue {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(id, format!("ptrue {p} outside [0,1]")));
            }
        }
        if let Some(q) = self.quality {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::invalid(id, format!("quality {q} outside [0,1]")));
            }
        }
        if let Some(m) = &self.entailment {
            check_shape(id, "entailment", m, n)?;
            if let Some(v) = m.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::invalid(
                    id,
                    format!("entailment value {v} outside [0,1]"),
                ));
            }
        }
        if let Some(m) = &self.embed_sim {
            check_shape(id, "embed_sim", m, n)?;
            if let Some(v) = m
                .values()
                .iter()
                .find(|v| !v.is_finite() || v.abs() > 1.0 + EMBED_TOLERANCE)
            {
                return Err(Error::invalid(
                    id,
                    format!("embed_sim value {v} outside [-1,1]"),
                ));
            }
            let asym = m.asymmetry();
            if asym > EMBED_TOLERANCE {
                return Err(Error::invalid(
                    id,
                    format!("embed_sim is not symmetric (max deviation {asym:e})"),
                ));
            }
            if let Some(i) = (0..n).find(|&i| (m[(i, i)] - 1.0).abs() > EMBED_TOLERANCE) {
                return Err(Error::invalid(
                    id,
                    format!("embed_sim diagonal entry {i} is {}, expected 1", m[(i, i)]),
                ));
            }
        }
        Ok(())
    }

    fn from_line(line: RecordLine) -> Result<Self> {
        let n = line.answers.len();
        let id = line.id;
        let entailment = line
            .entailment
            .map(|m| square(&id, "entailment", m, n))
            .transpose()?;
        let embed_sim = line
            .embed_sim
            .map(|m| square(&id, "embed_sim", m, n))
            .transpose()?;
        let record = GenerationRecord {
            id,
            question: line.question,
            answers: line.answers,
            greedy_answer: line.greedy_answer,
            gold_answers: line.gold_answers,
            ptrue: line.ptrue,
            quality: line.quality,
            entailment,
            embed_sim,
        };
        record.validate()?;
        Ok(record)
    }
}

fn check_shape(id: &str, matrix: &'static str, m: &SquareMatrix, n: usize) -> Result<()> {
    if m.n() != n {
        return Err(Error::Shape {
            id: id.to_string(),
            matrix,
            rows: m.n(),
            cols: m.n(),
            n,
        });
    }
    Ok(())
}

fn parse_line<T: for<'de> Deserialize<'de>>(line: &str, line_no: usize) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(line);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let field = err.path().to_string();
        Error::Parse {
            line: line_no,
            field: if field == "." {
                "<record>".into()
            } else {
                field
            },
            message: err.into_inner().to_string(),
        }
    })
}

/// Non-blank lines with their 1-based line numbers.
fn numbered_lines(reader: impl BufRead) -> impl Iterator<Item = std::io::Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()))
}

/// Parses line-delimited records from any reader, validating each one.
pub fn read_records(reader: impl Read) -> Result<Vec<GenerationRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for item in numbered_lines(BufReader::new(reader)) {
        let (line_no, line) = item.map_err(|e| Error::io("<input>", e))?;
        let parsed: RecordLine = parse_line(&line, line_no)?;
        let record = GenerationRecord::from_line(parsed)?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::invalid(
                &record.id,
                format!("duplicate record id on line {line_no}"),
            ));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<GenerationRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn write_records(mut writer: impl Write, records: &[GenerationRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_records(records: &[GenerationRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_records(&mut w, records)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Merges a sidecar of pairwise matrices into already-loaded records by id.
/// Returns how many records received at least one matrix.
pub fn merge_sidecar(records: &mut [GenerationRecord], reader: impl Read) -> Result<usize> {
    let index: HashMap<String, usize> = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.clone(), i))
        .collect();
    let mut merged = 0;
    for item in numbered_lines(BufReader::new(reader)) {
        let (line_no, line) = item.map_err(|e| Error::io("<sidecar>", e))?;
        let side: SidecarLine = parse_line(&line, line_no)?;
        let &slot = index.get(&side.id).ok_or_else(|| Error::Parse {
            line: line_no,
            field: "id".into(),
            message: format!("sidecar id `{}` matches no record", side.id),
        })?;
        let record = &mut records[slot];
        let n = record.n();
        if let Some(m) = side.entailment {
            record.entailment = Some(square(&record.id, "entailment", m, n)?);
        }
        if let Some(m) = side.embed_sim {
            record.embed_sim = Some(square(&record.id, "embed_sim", m, n)?);
        }
        record.validate()?;
        merged += 1;
    }
    Ok(merged)
}

pub fn load_sidecar(records: &mut [GenerationRecord], path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    merge_sidecar(records, file)
}

/// One uncertainty value; higher means more uncertain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyScore {
    pub record_id: String,
    pub method: Method,
    pub params: BTreeMap<String, String>,
    pub value: f64,
}

impl UncertaintyScore {
    /// Parameters that identify a method configuration; `diag_*` entries are
    /// per-record diagnostics and excluded.
    pub fn config_key(&self) -> String {
        let mut key = self.method.name().to_string();
        for (k, v) in self.params.iter().filter(|(k, _)| !k.starts_with("diag_")) {
            key.push_str(&format!(" {k}={v}"));
        }
        key
    }
}

/// A score file: an optional resolved-run header followed by scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    pub header: Option<serde_json::Value>,
    pub scores: Vec<UncertaintyScore>,
}

pub fn write_scores(mut writer: impl Write, scores: &[UncertaintyScore]) -> Result<()> {
    for s in scores {
        if !s.value.is_finite() {
            return Err(Error::NonFinite(s.record_id.clone()));
        }
        serde_json::to_writer(&mut writer, s).map_err(|e| Error::io("<output>", e.into()))?;
        writer
            .write_all(b"\n")
            .map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn save_scores(scores: &[UncertaintyScore], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_scores(&mut buf, scores)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderLine {
    run: serde_json::Value,
}

pub fn read_scores(reader: impl Read) -> Result<ScoreFile> {
    let mut header = None;
    let mut scores = Vec::new();
    for item in numbered_lines(BufReader::new(reader)) {
        let (line_no, line) = item.map_err(|e| Error::io("<scores>", e))?;
        if scores.is_empty() && header.is_none() {
            if let Ok(h) = serde_json::from_str::<HeaderLine>(&line) {
                header = Some(h.run);
                continue;
            }
        }
        scores.push(parse_line::<UncertaintyScore>(&line, line_no)?);
    }
    Ok(ScoreFile { header, scores })
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoreFile> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_scores(file)
}
