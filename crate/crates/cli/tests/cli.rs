use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn snne(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snne"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn score_emits_header_and_one_line_per_record_and_method() {
    let toy = fixture("toy_corpus.jsonl");
    let out = snne(&[
        "score",
        "--input",
        &toy,
        "--methods",
        "dse,snne",
        "--sim",
        "rouge_l",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("{\"run\":"));
    assert!(lines[1].contains("\"method\":\"dse\""));
    assert!(lines[2].contains("\"method\":\"snne\""));
}

#[test]
fn score_is_deterministic_across_runs_and_threads() {
    let toy = fixture("toy_corpus.jsonl");
    let args = [
        "score",
        "--input",
        &toy,
        "--methods",
        "snne,wsnne,se,sumeigv,eccen",
        "--sim",
        "entail",
    ];
    let a = snne(&args);
    let b = snne(&args);
    let mut parallel = args.to_vec();
    parallel.extend(["--jobs", "4"]);
    let c = snne(&parallel);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn missing_logprobs_is_an_input_error_naming_the_record() {
    let out = snne(&[
        "score",
        "--input",
        &fixture("partial_corpus.jsonl"),
        "--methods",
        "wsnne",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("q03"));
}

#[test]
fn unknown_method_is_a_usage_error() {
    let out = snne(&[
        "score",
        "--input",
        &fixture("toy_corpus.jsonl"),
        "--methods",
        "snne,bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn unreadable_input_is_an_io_error() {
    let out = snne(&["score", "--input", "/nonexistent/corpus.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "input = {:?}\nmethods = [\"snne\", \"ne\"]\ntau = 10.0\nsimilarity = \"embed\"\n",
            fixture("toy_corpus.jsonl")
        ),
    )
    .unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let out = snne(&["score", "--config", &cfg, "--tau", "0.1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let header: serde_json::Value =
        serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(header["run"]["tau"], 0.1);
    assert_eq!(header["run"]["similarity"], "embed");
    assert_eq!(header["run"]["methods"], serde_json::json!(["snne", "ne"]));
    assert_eq!(header["run"]["entail_threshold"], 0.5);

    std::fs::write(dir.path().join("bad.toml"), "tau = \"high\"\n").unwrap();
    let bad = snne(&[
        "score",
        "--config",
        &dir.path().join("bad.toml").to_string_lossy(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn evaluate_prints_table_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let toy = fixture("toy_corpus.jsonl");
    let scores = dir
        .path()
        .join("scores.jsonl")
        .to_string_lossy()
        .into_owned();
    let report = dir
        .path()
        .join("report.json")
        .to_string_lossy()
        .into_owned();
    let out = snne(&["score", "-i", &toy, "-m", "snne,dse,lexsim", "-o", &scores]);
    assert!(out.status.success());
    let out = snne(&["evaluate", "-s", &scores, "-i", &toy, "-o", &report]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = stdout(&out);
    assert!(table.starts_with("method"));
    assert_eq!(table.lines().count(), 4);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["report"]["methods"].as_array().unwrap().len(), 3);
    assert_eq!(json["run"]["score_run"]["methods"][0], "snne");
}

#[test]
fn evaluate_rejects_scores_for_unknown_records() {
    let dir = tempfile::tempdir().unwrap();
    let toy = fixture("toy_corpus.jsonl");
    let scores = dir
        .path()
        .join("scores.jsonl")
        .to_string_lossy()
        .into_owned();
    assert!(snne(&["score", "-i", &toy, "-o", &scores]).status.success());
    let out = snne(&[
        "evaluate",
        "-s",
        &scores,
        "-i",
        &fixture("partial_corpus.jsonl"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("q05"));
}

#[test]
fn ablate_grid_is_order_independent() {
    let toy = fixture("toy_corpus.jsonl");
    let a = snne(&["ablate", "-i", &toy]);
    let b = snne(&[
        "ablate",
        "-i",
        &toy,
        "--taus",
        "100,10,1,0.1",
        "--sims",
        "embed,entail,rouge_l",
    ]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("snne/rouge_l") && text.contains("wsnne/embed"));
    assert!(!text.contains("skipped"));
}

#[test]
fn ablate_marks_missing_data_as_skipped() {
    let out = snne(&["ablate", "-i", &fixture("partial_corpus.jsonl")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("skipped snne/embed"));
}

#[test]
fn verify_passes_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = snne(&[
            "verify",
            "--seed",
            "3",
            "--cases",
            "200",
            "-o",
            &path.to_string_lossy(),
        ]);
        assert!(out.status.success(), "{}", stdout(&out));
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        v["report"]["elapsed_seconds"] = 0.into();
        v
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn injected_fault_fails_with_named_invariant() {
    let out = snne(&[
        "verify",
        "--cases",
        "100",
        "--inject-fault",
        "wsnne_uniform_weights",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("theorem2_wsnne_se"));
    assert!(stdout(&out).contains("FAIL"));
}
