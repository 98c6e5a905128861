use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;
use snne_core::estimators::Method;
use snne_core::runner::RunConfig;
use snne_core::similarity::SimilarityName;

/// Settings read from a TOML run file. Every field is optional; flags given
/// on the command line take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sidecars: Vec<PathBuf>,
    pub methods: Option<Vec<Method>>,
    pub similarity: Option<SimilarityName>,
    pub tau: Option<f64>,
    pub entail_threshold: Option<f64>,
    pub eccen_k: Option<usize>,
    pub correctness_threshold: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub ablate: AblateFile,
    #[serde(default)]
    pub verify: VerifyFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblateFile {
    pub taus: Option<Vec<f64>>,
    pub similarities: Option<Vec<SimilarityName>>,
    pub construction: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub cases: Option<usize>,
    pub max_n: Option<usize>,
}

/// Error in the run file itself, reported as an input error.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text)
            .map_err(|e| ConfigError(format!("config {}: {e}", path.display())).into())
    }
}

/// Run-level flags shared by the subcommands, all optional so that unset
/// flags fall through to the config file and then to defaults.
#[derive(Debug, Default, Clone)]
pub struct RunFlags {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub similarity: Option<SimilarityName>,
    pub tau: Option<f64>,
    pub entail_threshold: Option<f64>,
    pub eccen_k: Option<usize>,
    pub correctness_threshold: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

/// Flags over file over defaults.
pub fn resolve(flags: &RunFlags, file: &FileConfig) -> RunConfig {
    let d = RunConfig::default();
    RunConfig {
        input: flags.input.clone().or_else(|| file.input.clone()),
        output: flags.output.clone().or_else(|| file.output.clone()),
        methods: if flags.methods.is_empty() {
            file.methods.clone().unwrap_or(d.methods)
        } else {
            flags.methods.clone()
        },
        similarity: flags.similarity.or(file.similarity).unwrap_or(d.similarity),
        tau: flags.tau.or(file.tau).unwrap_or(d.tau),
        entail_threshold: flags
            .entail_threshold
            .or(file.entail_threshold)
            .unwrap_or(d.entail_threshold),
        eccen_k: flags.eccen_k.or(file.eccen_k),
        correctness_threshold: flags
            .correctness_threshold
            .or(file.correctness_threshold)
            .unwrap_or(d.correctness_threshold),
        seed: flags.seed.or(file.seed).unwrap_or(d.seed),
        jobs: flags.jobs.or(file.jobs).unwrap_or(d.jobs).max(1),
    }
}
