use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use shibboleth_cli::bundle::{verify, Manifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shibboleth"))
}

fn sample() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, json: serde_json::Value) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    p
}

#[test]
fn score_only_run() {
    let out = scratch("score-only");
    let o = run(&["score"], &sample().join("config.json"), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("score/emotion.csv")).unwrap();
    let groups: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        groups,
        ["intersectionality", "privilege", "safespace", "woke", "ALL"]
    );
    for stage in ["topics", "network", "trends"] {
        assert!(
            !out.join(stage).exists(),
            "{stage} output written by a score run"
        );
    }
    let manifest: Manifest =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.stages, ["score"]);
    assert!(verify(&out, &manifest).is_empty());
    assert_eq!(manifest.seed, 2019);
    let manifest_text = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(!manifest_text.contains("2026") && !manifest_text.contains("time"));

    let cached: Vec<_> = fs::read_dir(out.join(".cache")).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let again = run(&["score"], &sample().join("config.json"), &out);
    assert!(again.status.success());
    assert_eq!(fs::read_dir(out.join(".cache")).unwrap().count(), 1);
    assert_eq!(
        csv,
        fs::read_to_string(out.join("score/emotion.csv")).unwrap()
    );
}

#[test]
fn empty_stage_list_is_a_validation_error() {
    let out = scratch("no-stages");
    let o = bin()
        .args(["run", "--stages", ""])
        .arg("--config")
        .arg(sample().join("config.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("stages"), "{}", stderr(&o));
    assert!(
        !out.exists(),
        "nothing may be written on validation failure"
    );
}

#[test]
fn unknown_config_key_is_named() {
    let dir = scratch("unknown-key");
    let cfg = write_config(&dir, serde_json::json!({"network": {"min_wieght": 2}}));
    for cmd in ["explain", "network"] {
        let o = run(&[cmd], &cfg, &dir.join("out"));
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("min_wieght"), "{}", stderr(&o));
    }
    assert!(!dir.join("out").exists());
}

#[test]
fn missing_input_is_a_validation_error() {
    let dir = scratch("missing-input");
    let cfg = write_config(&dir, serde_json::json!({"paths": {"corpus": "nope.jsonl"}}));
    let o = run(&["score"], &cfg, &dir.join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("paths.corpus"), "{}", stderr(&o));
    assert!(!dir.join("out").exists());
}

#[test]
fn stage_failure_names_the_stage() {
    let dir = scratch("stage-failure");
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("broken.dic"), "%\n1\tanger\n%\nrage*\t7\n").unwrap();
    let corpus = sample().join("corpus.jsonl");
    let cfg = write_config(
        &dir,
        serde_json::json!({"paths": {"corpus": corpus, "lexicons": ["broken.dic"]}}),
    );
    let o = run(&["score"], &cfg, &dir.join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stage score"), "{}", stderr(&o));
}

#[test]
fn explain_echoes_defaults_and_overrides() {
    let o = bin().arg("explain").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(
        text.contains("coherence: c_v, window 110, top_n 10"),
        "{text}"
    );
    assert!(text.contains("stopwords: en-v1"));
    assert!(text.contains("snowball-english"));

    let dir = scratch("explain-override");
    let cfg = write_config(&dir, serde_json::json!({"topics": {"delta": 0.02}}));
    let o = bin()
        .arg("explain")
        .arg("--config")
        .arg(&cfg)
        .arg("--seed")
        .arg("9")
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("delta 0.02"), "{text}");
    assert!(text.contains("seed: 9"));
}

#[test]
fn trends_run_writes_plot_data() {
    let out = scratch("trends");
    let o = run(&["trends"], &sample().join("config.json"), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("trends/trends.json")).unwrap()).unwrap();
    assert_eq!(json["onset"]["terms"]["intersectionality"], 1984);
    assert_eq!(json["metadata"]["smoothing"], 3);
    assert_eq!(json["metadata"]["case_insensitive"], true);
    let header = fs::read_to_string(out.join("trends/plot_per_term.csv")).unwrap();
    assert!(header.starts_with("year,intersectionality,safe space,woke\n"));
    assert!(!out.join("corpus").exists(), "trends needs no corpus");
}

#[test]
fn seed_only_moves_the_null_model() {
    let a = scratch("seed-a");
    let b = scratch("seed-b");
    let cfg = sample().join("config.json");
    assert!(run(&["network", "--seed", "1"], &cfg, &a).status.success());
    assert!(run(&["network", "--seed", "2"], &cfg, &b).status.success());
    let read = |d: &Path, f: &str| fs::read(d.join(f)).unwrap();
    assert_eq!(read(&a, "network/edges.csv"), read(&b, "network/edges.csv"));
    assert_ne!(
        read(&a, "network/stats.json"),
        read(&b, "network/stats.json")
    );
}
