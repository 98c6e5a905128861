mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use snne_core::corpus::{load_records, load_scores, load_sidecar, GenerationRecord};
use snne_core::estimators::Method;
use snne_core::runner::ablate::render_ablation;
use snne_core::runner::evaluate::render_table;
use snne_core::runner::{
    ablate, evaluate, render_score_file, verify, AblationGrid, Fault, RunConfig, VerifyOptions,
};
use snne_core::similarity::SimilarityName;

use config::{resolve, ConfigError, FileConfig, RunFlags};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

/// Uncertainty scores for sampled LLM answers: SNNE, WSNNE and baselines.
#[derive(Parser)]
#[command(name = "snne", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every record with the requested methods.
    Score(ScoreArgs),
    /// Join scores to correctness labels and report AUROC, AUARC and PRR.
    Evaluate(EvaluateArgs),
    /// Sweep τ and the similarity function for SNNE and WSNNE.
    Ablate(AblateArgs),
    /// Randomized checks of the estimator identities.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Seed for randomized checks; recorded in run headers.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; never changes results.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct Corpus {
    /// Generation records, one JSON object per line.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Matrix-only files merged into the records by id.
    #[arg(long = "sidecar")]
    sidecars: Vec<PathBuf>,
    /// Answer quality at or above this counts as correct [default: 0.5].
    #[arg(long, value_name = "P")]
    correctness_threshold: Option<f64>,
    /// Entailment probability needed in both directions to share a cluster [default: 0.5].
    #[arg(long, value_name = "P")]
    entail_threshold: Option<f64>,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    corpus: Corpus,
    /// Comma-separated: snne, wsnne, se, dse, ne, lexsim, ptrue, numset, sumeigv, deg, eccen.
    #[arg(long, short, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,
    /// rouge_l, entail or embed.
    #[arg(long = "sim", value_parser = parse_similarity)]
    similarity: Option<SimilarityName>,
    /// Scale factor τ for snne and wsnne [default: 1].
    #[arg(long)]
    tau: Option<f64>,
    /// Eigenvectors used by eccen; defaults to the cluster count.
    #[arg(long)]
    eccen_k: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    corpus: Corpus,
    /// Score file written by `snne score`.
    #[arg(long, short)]
    scores: PathBuf,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    corpus: Corpus,
    /// Comma-separated τ grid.
    #[arg(long, value_delimiter = ',')]
    taus: Vec<f64>,
    /// Comma-separated similarity grid.
    #[arg(long = "sims", value_delimiter = ',', value_parser = parse_similarity)]
    similarities: Vec<SimilarityName>,
    /// Add a column using the clustering-reduction similarity construction.
    #[arg(long)]
    construction: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Random instances per theorem suite.
    #[arg(long)]
    cases: Option<usize>,
    /// Largest answer-set size drawn.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, hide = true, value_parser = parse_fault)]
    inject_fault: Option<Fault>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: snne_core::Error| e.to_string())
}

fn parse_similarity(s: &str) -> Result<SimilarityName, String> {
    s.parse().map_err(|e: snne_core::Error| e.to_string())
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    s.parse().map_err(|e: snne_core::Error| e.to_string())
}

fn run_flags(common: &Common, corpus: &Corpus) -> RunFlags {
    RunFlags {
        input: corpus.input.clone(),
        output: common.output.clone(),
        entail_threshold: corpus.entail_threshold,
        correctness_threshold: corpus.correctness_threshold,
        seed: common.seed,
        jobs: common.jobs,
        ..RunFlags::default()
    }
}

fn load_corpus(
    config: &RunConfig,
    flags: &Corpus,
    file: &FileConfig,
) -> anyhow::Result<Vec<GenerationRecord>> {
    let Some(input) = &config.input else {
        return Err(ConfigError(
            "no input corpus given (use --input or `input` in the config)".into(),
        )
        .into());
    };
    let mut records = load_records(input)?;
    let sidecars = if flags.sidecars.is_empty() {
        &file.sidecars
    } else {
        &flags.sidecars
    };
    for path in sidecars {
        load_sidecar(&mut records, path)?;
    }
    Ok(records)
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json(output: Option<&Path>, value: &serde_json::Value) -> anyhow::Result<()> {
    if let Some(path) = output {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        emit(Some(path), &bytes)?;
    }
    Ok(())
}

fn score(args: ScoreArgs) -> anyhow::Result<ExitCode> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let flags = RunFlags {
        methods: args.methods,
        similarity: args.similarity,
        tau: args.tau,
        eccen_k: args.eccen_k,
        ..run_flags(&args.common, &args.corpus)
    };
    let config = resolve(&flags, &file);
    config.validate()?;
    let records = load_corpus(&config, &args.corpus, &file)?;
    let bytes = render_score_file(&records, &config)?;
    emit(config.output.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn evaluate_cmd(args: EvaluateArgs) -> anyhow::Result<ExitCode> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let config = resolve(&run_flags(&args.common, &args.corpus), &file);
    config.validate()?;
    let records = load_corpus(&config, &args.corpus, &file)?;
    let scores = load_scores(&args.scores)?;
    let report = evaluate(&scores.scores, &records, config.correctness_threshold)?;
    print!("{}", render_table(&report));
    let run = json!({
        "input": config.input,
        "scores": args.scores,
        "correctness_threshold": config.correctness_threshold,
        "score_run": scores.header,
    });
    emit_json(
        config.output.as_deref(),
        &json!({ "run": run, "report": report }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn ablate_cmd(args: AblateArgs) -> anyhow::Result<ExitCode> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let config = resolve(&run_flags(&args.common, &args.corpus), &file);
    config.validate()?;
    let records = load_corpus(&config, &args.corpus, &file)?;
    let defaults = AblationGrid::default();
    let grid = AblationGrid {
        taus: if args.taus.is_empty() {
            file.ablate.taus.clone().unwrap_or(defaults.taus)
        } else {
            args.taus
        },
        similarities: if args.similarities.is_empty() {
            file.ablate
                .similarities
                .clone()
                .unwrap_or(defaults.similarities)
        } else {
            args.similarities
        },
        include_construction: args.construction || file.ablate.construction.unwrap_or(false),
        entail_threshold: config.entail_threshold,
        correctness_threshold: config.correctness_threshold,
        jobs: config.jobs,
    };
    let report = ablate(&records, &grid)?;
    print!("{}", render_ablation(&report));
    let run = json!({
        "input": config.input,
        "taus": report.taus,
        "columns": report.columns,
        "entail_threshold": grid.entail_threshold,
        "correctness_threshold": grid.correctness_threshold,
    });
    emit_json(
        config.output.as_deref(),
        &json!({ "run": run, "report": report }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let defaults = VerifyOptions::default();
    let options = VerifyOptions {
        seed: args.common.seed.or(file.seed).unwrap_or(defaults.seed),
        cases: args.cases.or(file.verify.cases).unwrap_or(defaults.cases),
        max_n: args.max_n.or(file.verify.max_n).unwrap_or(defaults.max_n),
        fault: args.inject_fault,
    };
    let report = verify(&options)?;
    print!("{}", report.render());
    let output = args.common.output.or(file.output);
    emit_json(
        output.as_deref(),
        &json!({ "run": options, "report": report }),
    )?;
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("invariant violated: {}", report.failed_suites().join(", "));
        Ok(ExitCode::from(EXIT_VIOLATION))
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<snne_core::Error>() {
        return if e.is_input_error() {
            EXIT_INPUT
        } else {
            EXIT_IO
        };
    }
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_INPUT;
    }
    EXIT_IO
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Score(a) => score(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Ablate(a) => ablate_cmd(a),
        Command::Verify(a) => {
            if a.cases == Some(0) || a.max_n == Some(0) {
                bail!(ConfigError("--cases and --max-n must be positive".into()));
            }
            verify_cmd(a)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
