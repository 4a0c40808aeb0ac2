//! End-to-end runs of the `sentifuse` binary.

use std::path::Path;
use std::process::{Command, Output};

fn sentifuse(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sentifuse"))
        .args(args)
        .current_dir(dir)
        .env_remove("SENTIFUSE_OUT")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "status {:?}\nstdout {}\nstderr {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

const TRAIN: &[&str] = &["train", "--data", "d.jsonl", "--seed", "7", "--dims", "tiny", "--epochs", "2"];

fn synth(dir: &Path, n: &str) {
    ok(&sentifuse(&["synth", "--n", n, "--seed", "7", "--dims", "tiny", "--out", "d.jsonl"], dir));
}

#[test]
fn synth_then_train_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "120");
    ok(&sentifuse(&[TRAIN, &["--out", "a"]].concat(), d));
    ok(&sentifuse(&[TRAIN, &["--out", "b"]].concat(), d));
    for f in ["model.ckpt", "train_log.tsv", "metrics.kv", "metrics.txt"] {
        assert_eq!(read(d.join("a").join(f)), read(d.join("b").join(f)), "{f}");
    }
    let log = String::from_utf8(read(d.join("a/train_log.tsv"))).unwrap();
    assert_eq!(log.lines().count(), 3);

    let manifest: serde_json::Value = serde_json::from_slice(&read(d.join("a/manifest.json"))).unwrap();
    assert_eq!(manifest["optimizer"]["betas"], serde_json::json!([0.55, 0.999]));
    assert_eq!(manifest["seed"], 7);
    assert!(manifest["data_fingerprint"].as_str().unwrap().len() >= 8);
}

#[test]
fn rerunning_the_manifest_argv_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "60");
    ok(&sentifuse(&[TRAIN, &["--out", "first", "--model", "late"]].concat(), d));
    let manifest: serde_json::Value = serde_json::from_slice(&read(d.join("first/manifest.json"))).unwrap();
    let argv: Vec<String> = manifest["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    std::fs::rename(d.join("first"), d.join("kept")).unwrap();
    let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
    ok(&sentifuse(&refs, d));
    for f in ["model.ckpt", "train_log.tsv", "metrics.kv", "manifest.json"] {
        assert_eq!(read(d.join("kept").join(f)), read(d.join("first").join(f)), "{f}");
    }
}

#[test]
fn out_directory_defaults_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "40");
    let out = Command::new(env!("CARGO_BIN_EXE_sentifuse"))
        .args(TRAIN)
        .current_dir(d)
        .env("SENTIFUSE_OUT", "from_env")
        .output()
        .unwrap();
    ok(&out);
    assert!(d.join("from_env/model.ckpt").is_file());
}

#[test]
fn eval_and_predict_read_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "60");
    ok(&sentifuse(&[TRAIN, &["--out", "run", "--only", "va"]].concat(), d));
    let table = ok(&sentifuse(&["eval", "--checkpoint", "run", "--data", "d.jsonl", "--out", "scores"], d));
    assert!(table.contains("accuracy"));
    for f in ["metrics.txt", "metrics.kv", "eval_manifest.json"] {
        assert!(d.join("scores").join(f).is_file(), "{f}");
    }
    let kv = String::from_utf8(read(d.join("scores/metrics.kv"))).unwrap();
    assert!(kv.lines().any(|l| l.starts_with("macro_f1=")));

    let lines = ok(&sentifuse(&["predict", "--checkpoint", "run/model.ckpt", "--data", "d.jsonl"], d));
    assert_eq!(lines.lines().count(), 60);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let scores: Vec<f64> = v["scores"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!((scores.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        assert_eq!(v["scores"], v["va"]);
        assert!(v.get("ta").is_none());
    }
}

#[test]
fn prep_writes_the_three_splits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "50");
    let summary = ok(&sentifuse(&["prep", "--data", "d.jsonl", "--dims", "tiny", "--out", "prepped"], d));
    assert!(summary.starts_with("read 50"));
    let count = |f: &str| String::from_utf8(read(d.join("prepped").join(f))).unwrap().lines().count();
    let kept = count("train.jsonl") + count("val.jsonl") + count("test.jsonl");
    assert_eq!(kept + count("drops.tsv"), 50);
    assert!(d.join("prepped/manifest.json").is_file());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "20");
    let cases: [&[&str]; 5] = [
        &["train", "--data", "d.jsonl", "--only", "va", "--only", "ta"],
        &["train", "--data", "d.jsonl", "--only", "va", "--ablate", "ta"],
        &["train", "--data", "missing.jsonl", "--dims", "tiny"],
        &["train", "--data", "d.jsonl", "--frobnicate"],
        &["eval", "--checkpoint", "nowhere", "--data", "d.jsonl"],
    ];
    for args in cases {
        let out = sentifuse(args, d);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).trim().is_empty());
    }
    let out = sentifuse(&["train", "--data", "missing.jsonl", "--dims", "tiny"], d);
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn gradcheck_op_softmax_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&sentifuse(&["gradcheck", "--scope", "op", "--op", "softmax", "--seeds", "5"], dir.path()));
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS op softmax")).count(), 5);
    assert!(out.ends_with("all checks passed\n"));
}

#[test]
fn gradcheck_full_scope_passes_on_four_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&sentifuse(&["gradcheck", "--scope", "full", "--coords", "4"], dir.path()));
    for g in ["va", "ta", "vt", "fusion"] {
        assert!(out.lines().any(|l| l.starts_with("PASS") && l.contains(&format!(" group {g} "))), "{out}");
    }
}

#[test]
fn corrupted_gradient_fails_and_names_the_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = sentifuse(
        &["gradcheck", "--scope", "full", "--coords", "3", "--corrupt", "vt.head.bias"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains(" group vt ")), "{text}");
    assert!(text.lines().all(|l| !l.starts_with("FAIL") || l.contains(" group vt ")));
    assert!(text.ends_with("gradient check failed\n"));
}
