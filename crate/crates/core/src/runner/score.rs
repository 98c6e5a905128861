use std::cell::OnceCell;
use std::collections::BTreeMap;

use super::{map_records, RunConfig};
use crate::corpus::{write_scores, GenerationRecord, UncertaintyScore};
use crate::error::{Error, Result};
use crate::estimators::graph::{self, Spectrum};
use crate::estimators::{self, Method, SequenceProbabilities};
use crate::similarity::{
    build_matrix, cluster_bidirectional, ClusterAssignment, SimilarityMatrix, SimilarityName,
};

/// Everything a record is missing for the requested methods, one line each.
fn record_problems(record: &GenerationRecord, config: &RunConfig) -> Vec<String> {
    let mut problems = Vec::new();
    for &method in &config.methods {
        let mut need = |ok: bool, what: &str| {
            if !ok {
                problems.push(format!("record `{}`: {method} needs {what}", record.id));
            }
        };
        if method.uses_similarity() {
            need(
                config.similarity.available_for(record),
                &format!("the `{}` similarity matrix", config.similarity),
            );
        }
        if method.is_white_box() {
            need(record.has_logprobs(), "token_logprobs on every answer");
        }
        if method.needs_clusters() {
            need(record.entailment.is_some(), "the entailment matrix");
        }
        match method {
            Method::LexSim => need(record.n() >= 2, "at least 2 answers"),
            Method::PTrue => need(record.ptrue.is_some(), "ptrue"),
            Method::Eccen => match config.eccen_k {
                None => need(
                    record.entailment.is_some(),
                    "the entailment matrix (k = cluster count)",
                ),
                Some(k) => need(k <= record.n(), &format!("at least k = {k} answers")),
            },
            _ => {}
        }
    }
    problems
}

/// Fails with a per-record report if any record cannot be scored by every
/// requested method.
pub fn check_requirements(records: &[GenerationRecord], config: &RunConfig) -> Result<()> {
    config.validate()?;
    let problems: Vec<String> = records
        .iter()
        .flat_map(|r| record_problems(r, config))
        .collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Requirements(problems.join("\n")))
    }
}

/// Lazily computed per-record intermediates shared across methods.
struct RecordContext<'a> {
    record: &'a GenerationRecord,
    config: &'a RunConfig,
    sim: OnceCell<SimilarityMatrix>,
    clusters: OnceCell<ClusterAssignment>,
    probs: OnceCell<SequenceProbabilities>,
    spectrum: OnceCell<Spectrum>,
}

impl<'a> RecordContext<'a> {
    fn new(record: &'a GenerationRecord, config: &'a RunConfig) -> Self {
        Self {
            record,
            config,
            sim: OnceCell::new(),
            clusters: OnceCell::new(),
            probs: OnceCell::new(),
            spectrum: OnceCell::new(),
        }
    }

    fn sim(&self) -> Result<&SimilarityMatrix> {
        if let Some(s) = self.sim.get() {
            return Ok(s);
        }
        let s = build_matrix(self.record, self.config.similarity)?;
        Ok(self.sim.get_or_init(|| s))
    }

    fn clusters(&self) -> Result<&ClusterAssignment> {
        if let Some(c) = self.clusters.get() {
            return Ok(c);
        }
        let entail = build_matrix(self.record, SimilarityName::Entail)?;
        let c = cluster_bidirectional(&entail, self.config.entail_threshold)?;
        Ok(self.clusters.get_or_init(|| c))
    }

    fn probs(&self) -> Result<&SequenceProbabilities> {
        if let Some(p) = self.probs.get() {
            return Ok(p);
        }
        let p = SequenceProbabilities::from_record(self.record)?;
        Ok(self.probs.get_or_init(|| p))
    }

    fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = Spectrum::of(self.sim()?);
        Ok(self.spectrum.get_or_init(|| s))
    }

    fn score(&self, method: Method) -> Result<UncertaintyScore> {
        let cfg = self.config;
        let mut params = BTreeMap::new();
        // graph baselines clip negative similarities, the entropies do not
        let clip = method.uses_similarity() && !matches!(method, Method::Snne | Method::Wsnne);
        let sim_params = |params: &mut BTreeMap<String, String>| {
            params.insert("sim".to_string(), cfg.similarity.to_string());
            if cfg.similarity == SimilarityName::Embed {
                params.insert("embed_clip".to_string(), clip.to_string());
            }
        };
        let threshold_param = |params: &mut BTreeMap<String, String>| {
            params.insert(
                "entail_threshold".to_string(),
                cfg.entail_threshold.to_string(),
            );
        };
        let value = match method {
            Method::Snne => {
                sim_params(&mut params);
                params.insert("tau".into(), cfg.tau.to_string());
                estimators::snne(self.sim()?, cfg.tau)?
            }
            Method::Wsnne => {
                sim_params(&mut params);
                params.insert("tau".into(), cfg.tau.to_string());
                estimators::wsnne(self.sim()?, self.probs()?, cfg.tau)?
            }
            Method::Se => {
                threshold_param(&mut params);
                estimators::se(self.clusters()?, self.probs()?)?
            }
            Method::Dse => {
                threshold_param(&mut params);
                estimators::dse(self.clusters()?)?
            }
            Method::NumSet => {
                threshold_param(&mut params);
                estimators::num_set(self.clusters()?)
            }
            Method::Ne => estimators::naive_entropy(self.probs()?),
            Method::LexSim => {
                params.insert("sim".into(), SimilarityName::RougeL.to_string());
                let rouge = if cfg.similarity == SimilarityName::RougeL {
                    self.sim()?.clone()
                } else {
                    SimilarityMatrix::rouge_l(&self.record.texts())
                };
                estimators::lexsim(&rouge)?
            }
            Method::PTrue => estimators::ptrue_passthrough(self.record)?,
            Method::SumEigv => {
                sim_params(&mut params);
                let spectrum = self.spectrum()?;
                if spectrum.isolated > 0 {
                    params.insert("diag_isolated".into(), spectrum.isolated.to_string());
                }
                graph::sum_eigv_from(spectrum)
            }
            Method::Deg => {
                sim_params(&mut params);
                estimators::deg(self.sim()?)
            }
            Method::Eccen => {
                sim_params(&mut params);
                let k = match cfg.eccen_k {
                    Some(k) => {
                        params.insert("k".into(), k.to_string());
                        k
                    }
                    None => {
                        let m = self.clusters()?.count();
                        params.insert("k".into(), "clusters".into());
                        threshold_param(&mut params);
                        params.insert("diag_k".into(), m.to_string());
                        m
                    }
                };
                graph::eccen_from(self.spectrum()?, k)?
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("{} ({method})", self.record.id)));
        }
        Ok(UncertaintyScore {
            record_id: self.record.id.clone(),
            method,
            params,
            value,
        })
    }
}

/// Every requested method on one record, in requested order.
pub fn score_record(
    record: &GenerationRecord,
    config: &RunConfig,
) -> Result<Vec<UncertaintyScore>> {
    let ctx = RecordContext::new(record, config);
    config.methods.iter().map(|&m| ctx.score(m)).collect()
}

/// One score per (record, method): records in input order, methods in
/// requested order. Requirements are checked up front.
pub fn score_records(
    records: &[GenerationRecord],
    config: &RunConfig,
) -> Result<Vec<UncertaintyScore>> {
    check_requirements(records, config)?;
    let per_record = map_records(records, config.jobs, |r| score_record(r, config));
    let mut scores = Vec::with_capacity(records.len() * config.methods.len());
    for result in per_record {
        scores.extend(result?);
    }
    Ok(scores)
}

/// The full score file: a `{"run": ...}` header line, then one line per score.
pub fn render_score_file(records: &[GenerationRecord], config: &RunConfig) -> Result<Vec<u8>> {
    let scores = score_records(records, config)?;
    let mut out = serde_json::to_vec(&serde_json::json!({ "run": config.header() }))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    out.push(b'\n');
    write_scores(&mut out, &scores)?;
    Ok(out)
}
