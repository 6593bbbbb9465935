use std::path::PathBuf;

use anyhow::{Context as _, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use bevtraj::model::Checkpoint;
use bevtraj::scenegen::{Dataset, SceneSequence};
use bevtraj::train::{baseline_persistence, build_samples, evaluate, Metrics};

use crate::error::usage;
use crate::manifest::{sibling, RunManifest};
use crate::train::{load, split};
use crate::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
    All,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Which part of the checkpoint's split to evaluate.
    #[arg(long, value_enum, default_value = "test")]
    pub split: Split,
    /// Report path; defaults to `<ckpt>.<split>.eval.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub split: Split,
    pub n_samples: usize,
    pub model: Metrics,
    pub baseline: Metrics,
}

pub fn load_checkpoint(path: &std::path::Path) -> Result<Checkpoint> {
    Checkpoint::load(path).with_context(|| format!("loading checkpoint {}", path.display()))
}

/// Fails with a usage error naming the field when checkpoint and dataset disagree.
pub fn check_compatible(ckpt: &Checkpoint, data: &Dataset) -> Result<()> {
    let cfg = ckpt.model_config();
    if cfg.feature_size != data.header.feature_size {
        return Err(usage(format!(
            "feature_size: checkpoint expects {}, dataset has {}",
            cfg.feature_size, data.header.feature_size
        )));
    }
    cfg.check_camera(&data.header.camera)
        .map_err(|e| usage(format!("camera: {e}")))?;
    Ok(())
}

fn select(data: &Dataset, ckpt: &Checkpoint, which: Split) -> Result<Vec<SceneSequence>> {
    if which == Split::All {
        return Ok(data.sequences.clone());
    }
    let (train, val, test) = split(data, &ckpt.train_config)?;
    Ok(match which {
        Split::Train => train,
        Split::Val => val,
        _ => test,
    })
}

pub fn run(ctx: &Context, args: &EvaluateArgs) -> Result<()> {
    let data = load(&args.data)?;
    let ckpt = load_checkpoint(&args.ckpt)?;
    check_compatible(&ckpt, &data)?;
    let split_name = format!("{:?}", args.split).to_lowercase();
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| sibling(&args.ckpt, &format!("{split_name}.eval.json")));
    let manifest = RunManifest::begin(
        "evaluate",
        &report_path,
        serde_json::json!({ "split": args.split, "model": ckpt.model_config() }),
        ckpt.train_config.seed,
        ctx.threads,
        &[&args.data, &args.ckpt],
    )?;
    let seqs = select(&data, &ckpt, args.split)?;
    let samples = build_samples(&seqs, ckpt.model_config())?.samples;
    if samples.is_empty() {
        return Err(usage(format!(
            "--split {split_name}: no samples to evaluate"
        )));
    }
    let report = EvalReport {
        split: args.split,
        n_samples: samples.len(),
        model: evaluate(&ckpt.params, &samples)?,
        baseline: baseline_persistence(&samples)?,
    };
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;
    manifest.finish(std::slice::from_ref(&report_path))?;

    println!("split: {split_name} ({} samples)", report.n_samples);
    println!("{:<12} {:>14}  per-step MSE (m²)", "", "MSE (m²)");
    for (name, m) in [("model", &report.model), ("persistence", &report.baseline)] {
        let steps: Vec<String> = m.mse_per_step.iter().map(|v| format!("{v:.6}")).collect();
        println!("{name:<12} {:>14.6}  {}", m.mse_overall, steps.join(" "));
    }
    println!("model MSE: {}", report.model.mse_overall);
    println!("report: {}", report_path.display());
    Ok(())
}
