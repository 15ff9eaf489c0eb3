//! Behavior of the `d3` binary itself: exit codes, JSON output shape, and
//! flag handling, checked through real process spawns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use d3_core::corpus::{synthetic_dialogues, to_convai2_text, unroll_dialogues};
use serde_json::Value;

fn d3<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_d3")).args(args).output().unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("terminated by signal")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!("stdout is not one JSON document: {e}\n{}", String::from_utf8_lossy(&output.stdout))
    })
}

fn write_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("corpus.txt");
    std::fs::write(&path, to_convai2_text(&synthetic_dialogues(23, 6))).unwrap();
    path
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn subcommands_chain_into_each_other() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let distilled = dir.path().join("distilled.jsonl");
    let diversified = dir.path().join("diversified.jsonl");
    let composition = dir.path().join("composition.json");

    let out = d3([
        "distill",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        distilled.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "distill: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let n_distilled = doc["distilled_samples"].as_u64().unwrap();
    assert!(n_distilled > 0);
    assert_eq!(lines(&distilled) as u64, n_distilled);

    let out = d3([
        "stats",
        "--in",
        distilled.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["n_samples"].as_u64().unwrap(), n_distilled);
    assert!(doc["n_unique_personas"].as_u64().unwrap() > 0);
    assert!(doc["n_unique_tokens"].as_u64().unwrap() > 0);

    let out = d3([
        "--seed",
        "7",
        "diversify",
        "--in",
        distilled.to_str().unwrap(),
        "--out",
        diversified.to_str().unwrap(),
        "--composition",
        composition.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "diversify: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["distilled_units"].as_u64().unwrap(), n_distilled);
    let n_diversified = doc["diversified_samples"].as_u64().unwrap();
    assert!(n_diversified > 0);
    assert_eq!(lines(&diversified) as u64, n_diversified);
    let comp: Value = serde_json::from_str(&std::fs::read_to_string(&composition).unwrap()).unwrap();
    assert_eq!(comp["total"].as_u64().unwrap(), n_diversified);

    let out = d3([
        "--seed",
        "7",
        "curriculum",
        "--variant",
        "d3",
        "--orig",
        corpus.to_str().unwrap(),
        "--aug",
        diversified.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "curriculum: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["variant"], "d3");
    let phases: Vec<&str> =
        doc["phases"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(phases, ["easy", "hard"]);
    assert!(doc["final_dev_loss"].as_f64().unwrap().is_finite());
    assert!(doc["epochs_run"].as_u64().unwrap() >= 2);

    // A corpus evaluated against itself is maximally overlapping: BLEU one,
    // zero novelty.
    let out = d3([
        "evaluate",
        "--hyp",
        distilled.to_str().unwrap(),
        "--ref",
        distilled.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "evaluate: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let bleu = doc["metrics"]["bleu"].as_f64().unwrap();
    assert!((bleu - 1.0).abs() <= 1e-9, "identity bleu {bleu}");
    for n in 1..=4 {
        assert_eq!(doc["metrics"][format!("novelty_{n}")].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn stats_reports_zeroes_on_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = d3(["stats", "--in", empty.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["n_samples"].as_u64().unwrap(), 0);
    assert_eq!(doc["n_unique_personas"].as_u64().unwrap(), 0);
    assert_eq!(doc["n_unique_tokens"].as_u64().unwrap(), 0);
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let config = dir.path().join("d3.toml");
    std::fs::write(&config, "tau = 0.42\n").unwrap();
    let out = d3([
        "--config",
        config.to_str().unwrap(),
        "distill",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        dir.path().join("out.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["tau"].as_f64().unwrap(), 0.42);

    // A flag override beats the file.
    let out = d3([
        "--config",
        config.to_str().unwrap(),
        "distill",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        dir.path().join("out2.jsonl").to_str().unwrap(),
        "--tau",
        "0.9",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["tau"].as_f64().unwrap(), 0.9);
}

#[test]
fn validation_problems_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let out_file = dir.path().join("out.jsonl");

    // Unreadable input.
    let out = d3(["distill", "--in", "/nonexistent/corpus.txt", "--out", out_file.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());

    // Malformed input row.
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"persona\": [\"i like cats\"]\n").unwrap();
    let out = d3(["stats", "--in", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // Out-of-range config value.
    let config = dir.path().join("d3.toml");
    std::fs::write(&config, "tau = 3.0\n").unwrap();
    let out = d3([
        "--config",
        config.to_str().unwrap(),
        "distill",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);

    // Unknown backend name.
    let out = d3([
        "distill",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
        "--nli",
        "bogus",
    ]);
    assert_eq!(code(&out), 2);

    // Unknown curriculum variant.
    let out = d3([
        "curriculum",
        "--variant",
        "sideways",
        "--orig",
        corpus.to_str().unwrap(),
        "--aug",
        corpus.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);

    // Unknown flag (usage error).
    let out = d3(["distill", "--frobnicate"]);
    assert_eq!(code(&out), 2);

    // A zero-worker pool is meaningless.
    let out = d3([
        "--jobs",
        "0",
        "stats",
        "--in",
        corpus.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn backend_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    // Port 1 refuses connections, so the remote backend fails at runtime:
    // the input was valid, the stage was not.
    let out = d3([
        "distill",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        dir.path().join("out.jsonl").to_str().unwrap(),
        "--nli",
        "remote:127.0.0.1:1",
    ]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn pipeline_ablation_flags_skip_stages() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let samples = unroll_dialogues(&synthetic_dialogues(23, 6)).unwrap();
    let total_personas: usize = samples.iter().map(|s| s.persona.len()).sum();

    let out_dir = dir.path().join("ablate");
    let out = d3([
        "pipeline",
        "--in",
        corpus.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--no-distill",
        "--no-diversify",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = stdout_json(&out);
    let states: Vec<(&str, &str)> = manifest["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["stage"].as_str().unwrap(), s["state"].as_str().unwrap()))
        .collect();
    assert!(states.contains(&("distill", "skipped")));
    assert!(states.contains(&("diversify", "skipped")));

    // Without entailment filtering, every persona sentence survives.
    assert_eq!(lines(&out_dir.join("distilled.jsonl")), total_personas);
    // A skipped diversify stage writes no artifact at all, and the
    // augmented set is exactly the distilled set.
    assert!(!out_dir.join("diversified.jsonl").exists());
    assert!(manifest["files"].get("diversified.jsonl").is_none());
    assert_eq!(
        std::fs::read(out_dir.join("augmented.jsonl")).unwrap(),
        std::fs::read(out_dir.join("distilled.jsonl")).unwrap()
    );
}
