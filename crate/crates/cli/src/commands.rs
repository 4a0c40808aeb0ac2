use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use sentifuse_core::artifacts::{
    data_fingerprint, load_model, save_model, RunManifest, CHECKPOINT_FILE, MANIFEST_FILE,
};
use sentifuse_core::data::{
    filter_posts, generate_with, load_dataset, save_dataset, split_dataset, LoadMode, SynthConfig,
};
use sentifuse_core::encoders::EmbeddingProvider;
use sentifuse_core::gradcheck::{analytic_gradients, compare_gradients, CheckOptions};
use sentifuse_core::metrics::MetricsReport;
use sentifuse_core::model::{Batch, Branch, BranchSet, Model, ModelKind};
use sentifuse_core::train::{encode_records, evaluate, train_with, EmbeddingChoice, TrainConfig};
use sentifuse_tensor::gradcheck::MAX_REL_ERR;
use sentifuse_tensor::op_suite::op_cases;

use crate::args::*;

/// Bad flags, combinations or paths; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        return Err(usage(format!("{what} `{}` does not exist", path.display())));
    }
    Ok(())
}

fn argv() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_metrics(dir: &Path, report: &MetricsReport) -> Result<()> {
    write(&dir.join("metrics.txt"), &report.to_table())?;
    write(&dir.join("metrics.kv"), &report.to_kv())
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Prep(a) => prep(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Predict(a) => predict(a),
        Command::Synth(a) => synth(a),
        Command::Gradcheck(a) => gradcheck(a),
    }
}

#[derive(Serialize)]
struct PrepManifest {
    argv: Vec<String>,
    seed: u64,
    input_fingerprint: String,
    read: usize,
    dropped: usize,
    train: usize,
    val: usize,
    test: usize,
}

fn prep(a: PrepArgs) -> Result<ExitCode> {
    require_file(&a.data, "dataset")?;
    let vision_dim = a.common.dims.config().vision_dim;
    let records = load_dataset(&a.data, LoadMode::Training, vision_dim)?;
    let fingerprint = data_fingerprint(&records)?;
    let read = records.len();
    let (kept, dropped) = filter_posts(records);
    let split = split_dataset(kept, a.common.seed)?;

    let out = &a.common.out;
    fs::create_dir_all(out)?;
    save_dataset(out.join("train.jsonl"), &split.train)?;
    save_dataset(out.join("val.jsonl"), &split.val)?;
    save_dataset(out.join("test.jsonl"), &split.test)?;
    let drops: String = dropped.iter().map(|(id, r)| format!("{id}\t{}\n", r.name())).collect();
    write(&out.join("drops.tsv"), &drops)?;
    let manifest = PrepManifest {
        argv: argv(),
        seed: a.common.seed,
        input_fingerprint: fingerprint,
        read,
        dropped: dropped.len(),
        train: split.train.len(),
        val: split.val.len(),
        test: split.test.len(),
    };
    write(&out.join(MANIFEST_FILE), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    println!(
        "read {read}, dropped {}, train {}, val {}, test {}",
        manifest.dropped, manifest.train, manifest.val, manifest.test
    );
    Ok(ExitCode::SUCCESS)
}

fn branches(only: Option<Branch>, ablate: &[Branch]) -> Result<BranchSet> {
    let set = match only {
        Some(b) => BranchSet::only(b),
        None => BranchSet::without(ablate),
    };
    set.validate().map_err(|_| usage("--ablate disables every branch"))?;
    Ok(set)
}

fn embedding_choice(a: &TrainArgs) -> Result<EmbeddingChoice> {
    Ok(match a.embeddings {
        EmbeddingSource::Synthetic => {
            if !a.embedding_files.is_empty() {
                return Err(usage("--embedding-files needs --embeddings file"));
            }
            EmbeddingChoice::Synthetic { seed: a.common.seed }
        }
        EmbeddingSource::File => {
            if a.embedding_files.len() != 3 {
                return Err(usage("--embeddings file needs three --embedding-files"));
            }
            for p in &a.embedding_files {
                require_file(p, "embedding table")?;
            }
            EmbeddingChoice::Files {
                paths: a.embedding_files.clone(),
                seed: a.common.seed,
            }
        }
    })
}

fn train(a: TrainArgs) -> Result<ExitCode> {
    require_file(&a.data, "dataset")?;
    let mut config = TrainConfig::new(a.common.dims.config(), a.common.seed);
    config.kind = a.model;
    config.branches = branches(a.only, &a.ablate)?;
    if a.model != ModelKind::Full && config.branches != BranchSet::all() {
        return Err(usage("--only/--ablate apply to the full model"));
    }
    config.epochs = a.epochs;
    config.batch_size = a.batch_size;
    config.patience = a.patience;
    config.shuffle_tokens = !a.no_shuffle_tokens;
    config.embeddings = embedding_choice(&a)?;
    config.validate().map_err(|e| usage(e.to_string()))?;

    let records = load_dataset(&a.data, LoadMode::Training, config.model.vision_dim)?;
    let fingerprint = data_fingerprint(&records)?;
    let split = split_dataset(records, config.seed)?;
    let out = &a.common.out;
    fs::create_dir_all(out)?;

    let mut log_text = String::from("epoch\tlr\tloss\ttrain_accuracy\tval_accuracy\n");
    let (model, log) = train_with(&split, &config, &mut |e| {
        let val = e.val_accuracy.map_or("-".to_string(), |v| format!("{v:?}"));
        let _ = writeln!(log_text, "{}\t{:?}\t{:?}\t{:?}\t{val}", e.epoch, e.lr, e.loss, e.train_accuracy);
        println!(
            "epoch {:>3}  lr {:.6}  loss {:.4}  train {:.4}  val {}",
            e.epoch,
            e.lr,
            e.loss,
            e.train_accuracy,
            e.val_accuracy.map_or("-".to_string(), |v| format!("{v:.4}"))
        );
    })?;
    write(&out.join("train_log.tsv"), &log_text)?;
    save_model(out.join(CHECKPOINT_FILE), &model)?;

    let mut manifest = RunManifest::new(argv(), &config, &model, log, fingerprint);
    if !split.test.is_empty() {
        let provider = config.embeddings.provider(config.model.text_dim)?;
        let test = encode_records(&split.test, &provider, config.model.vision_dim, config.attribute_threshold, true)?;
        let (_, report) = evaluate(&model, &test)?;
        write_metrics(out, &report)?;
        println!("test accuracy {:.4}  macro f1 {:.4}", report.accuracy, report.macro_f1);
        manifest.metrics = Some(report);
    }
    if let Some(w) = manifest.log.fusion_weights {
        println!("fusion weights va {:.4} ta {:.4} vt {:.4}", w[0], w[1], w[2]);
    }
    manifest.save(out.join(MANIFEST_FILE))?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

/// The model and the provider it was trained with.
fn open_checkpoint(path: &Path) -> Result<(Model, RunManifest, EmbeddingProvider)> {
    let (file, dir): (PathBuf, PathBuf) = if path.is_dir() {
        (path.join(CHECKPOINT_FILE), path.to_path_buf())
    } else {
        (path.to_path_buf(), path.parent().unwrap_or(Path::new(".")).to_path_buf())
    };
    require_file(&file, "checkpoint")?;
    let manifest_path = dir.join(MANIFEST_FILE);
    require_file(&manifest_path, "run manifest")?;
    let model = load_model(&file)?;
    let manifest = RunManifest::load(&manifest_path)?;
    let provider = manifest.train.embeddings.provider(model.config().text_dim)?;
    Ok((model, manifest, provider))
}

/// Written next to eval metrics; a separate name keeps it from replacing
/// the training manifest when `--out` is the run directory.
pub const EVAL_MANIFEST_FILE: &str = "eval_manifest.json";

#[derive(Serialize)]
struct EvalManifest<'a> {
    argv: Vec<String>,
    checkpoint: String,
    data_fingerprint: String,
    metrics: &'a MetricsReport,
}

fn eval(a: EvalArgs) -> Result<ExitCode> {
    require_file(&a.data, "dataset")?;
    let (model, manifest, provider) = open_checkpoint(&a.checkpoint)?;
    let vision_dim = model.config().vision_dim;
    let records = load_dataset(&a.data, LoadMode::Training, vision_dim)?;
    let posts = encode_records(&records, &provider, vision_dim, manifest.train.attribute_threshold, true)?;
    let (_, report) = evaluate(&model, &posts)?;
    fs::create_dir_all(&a.out)?;
    write_metrics(&a.out, &report)?;
    let manifest = EvalManifest {
        argv: argv(),
        checkpoint: a.checkpoint.display().to_string(),
        data_fingerprint: data_fingerprint(&records)?,
        metrics: &report,
    };
    write(&a.out.join(EVAL_MANIFEST_FILE), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    print!("{}", report.to_table());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    id: &'a str,
    label: &'static str,
    scores: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    va: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ta: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vt: Option<[f64; 3]>,
}

fn predict(a: PredictArgs) -> Result<ExitCode> {
    require_file(&a.data, "dataset")?;
    let (model, manifest, provider) = open_checkpoint(&a.checkpoint)?;
    let vision_dim = model.config().vision_dim;
    let records = load_dataset(&a.data, LoadMode::Prediction, vision_dim)?;
    let posts = encode_records(&records, &provider, vision_dim, manifest.train.attribute_threshold, false)?;
    let refs: Vec<_> = posts.iter().collect();
    let preds = model.predict(&refs)?;
    let mut text = String::new();
    for (r, p) in records.iter().zip(&preds) {
        let line = PredictionLine {
            id: &r.id,
            label: sentifuse_core::data::Label::from_index(p.label)
                .expect("three classes")
                .name(),
            scores: p.scores,
            va: p.branch_scores[0],
            ta: p.branch_scores[1],
            vt: p.branch_scores[2],
        };
        text.push_str(&serde_json::to_string(&line)?);
        text.push('\n');
    }
    match &a.out {
        Some(path) => write(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn synth(a: SynthArgs) -> Result<ExitCode> {
    if !(0.0..=1.0).contains(&a.signal) {
        return Err(usage(format!("--signal {} outside [0, 1]", a.signal)));
    }
    let cfg = SynthConfig::new(a.n, a.seed, a.signal).with_vision_dim(a.dims.config().vision_dim);
    let records = generate_with(&cfg);
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    save_dataset(&a.out, &records)?;
    println!("wrote {} records to {}", records.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn gradcheck(a: GradcheckArgs) -> Result<ExitCode> {
    if !(a.eps > 0.0) {
        return Err(usage("--eps must be positive"));
    }
    if a.op.is_some() && a.scope != Scope::Op {
        return Err(usage("--op needs --scope op"));
    }
    let seeds = a.seed..a.seed + a.seeds.max(1);
    let mut all_pass = true;
    match a.scope {
        Scope::Op => {
            let cases: Vec<_> = op_cases()
                .into_iter()
                .filter(|c| a.op.as_deref().is_none_or(|n| c.name == n))
                .collect();
            if cases.is_empty() {
                bail!(usage(format!("unknown op `{}`", a.op.unwrap_or_default())));
            }
            for case in &cases {
                for seed in seeds.clone() {
                    let err = case.check(seed, a.eps)?;
                    let pass = err < MAX_REL_ERR;
                    all_pass &= pass;
                    println!("{} op {} seed {seed} max_rel_err {err:.3e}", verdict(pass), case.name);
                }
            }
        }
        Scope::Branch | Scope::Full => {
            let models: Vec<(String, ModelKind, BranchSet, Option<&str>)> = if a.scope == Scope::Full {
                vec![("full".into(), ModelKind::Full, BranchSet::all(), None)]
            } else {
                let mut m: Vec<_> = Branch::ALL
                    .iter()
                    .map(|&b| (format!("full --only {}", b.name()), ModelKind::Full, BranchSet::only(b), Some(b.name())))
                    .collect();
                for kind in [ModelKind::Early, ModelKind::Late, ModelKind::TextOnly, ModelKind::ImageOnly, ModelKind::AttrOnly] {
                    m.push((kind.name().to_string(), kind, BranchSet::all(), None));
                }
                m
            };
            let config = a.dims.config();
            for seed in seeds {
                let records = generate_with(&SynthConfig::new(a.batch, seed, 0.7).with_vision_dim(config.vision_dim));
                let provider = EmbeddingProvider::synthetic(config.text_dim, seed)?;
                let posts = encode_records(&records, &provider, config.vision_dim, 0.5, true)?;
                let refs: Vec<_> = posts.iter().collect();
                let batch = Batch::new(&refs)?;
                for (label, kind, set, group) in &models {
                    let model = Model::new(config.clone(), *kind, *set, seed)?;
                    let mut analytic = analytic_gradients(&model, &batch)?;
                    if let Some(name) = &a.corrupt {
                        let id = model
                            .store
                            .id_of(name)
                            .ok_or_else(|| usage(format!("no parameter `{name}`")))?;
                        let g = analytic[id.index()].get_or_insert_with(|| vec![0.0; model.store.get(id).numel()]);
                        g[0] += 1.0;
                    }
                    let opts = CheckOptions {
                        eps: a.eps,
                        coords_per_param: a.coords,
                        seed,
                        groups: group.map(|g| vec![g.to_string(), "fusion".to_string()]),
                    };
                    for c in compare_gradients(&model, &batch, &analytic, &opts)? {
                        let pass = c.max_rel_err < MAX_REL_ERR;
                        all_pass &= pass;
                        println!(
                            "{} {label} seed {seed} group {} coords {} kinks {} max_rel_err {:.3e} worst {}",
                            verdict(pass),
                            c.group,
                            c.coords,
                            c.kinks,
                            c.max_rel_err,
                            c.worst
                        );
                    }
                }
            }
        }
    }
    println!("{}", if all_pass { "all checks passed" } else { "gradient check failed" });
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
