use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use clap::Args;
use serde::Serialize;

use bevtraj::model::{count_parameters, ModelConfig};
use bevtraj::scenegen::{load_dataset, Dataset, SceneSequence};
use bevtraj::train::{
    build_samples, hyperparameter_search, pe_table, sequence_graphs, split_dataset, train,
    SearchSpace, TrainConfig,
};

use crate::config::overlay;
use crate::error::usage;
use crate::manifest::{sibling, RunManifest};
use crate::Context;

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Checkpoint path; history and logs are written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for the split, shuffling, initialisation and search.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run a random hyperparameter search with this many trials first.
    #[arg(long)]
    pub search: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Epochs without validation improvement before stopping.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Write every frame's scene graph as JSON lines to this path.
    #[arg(long)]
    pub dump_graphs: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ResolvedTrain<'a> {
    model: &'a ModelConfig,
    train: &'a TrainConfig,
    search: Option<&'a SearchSpace>,
}

pub fn load(path: &Path) -> Result<Dataset> {
    load_dataset(path).with_context(|| format!("loading dataset {}", path.display()))
}

/// Model config from the file, with the feature size taken from the dataset.
pub fn resolve_model(ctx: &Context, data: &Dataset, seed: Option<u64>) -> Result<ModelConfig> {
    let mut model = overlay(&ModelConfig::default(), ctx.file.model.as_ref(), "model")?;
    let explicit_f = ctx
        .file
        .model
        .as_ref()
        .is_some_and(|t| t.contains_key("feature_size"));
    if explicit_f && model.feature_size != data.header.feature_size {
        return Err(usage(format!(
            "model.feature_size is {} but the dataset has feature_size {}",
            model.feature_size, data.header.feature_size
        )));
    }
    model.feature_size = data.header.feature_size;
    if let Some(s) = seed {
        model.seed = s;
    }
    model.validate()?;
    model.check_camera(&data.header.camera)?;
    Ok(model)
}

fn resolve_train(ctx: &Context, args: &TrainArgs) -> Result<TrainConfig> {
    let mut t = overlay(&TrainConfig::default(), ctx.file.train.as_ref(), "train")?;
    if let Some(s) = args.seed {
        t.seed = s;
    }
    if let Some(e) = args.epochs {
        t.max_epochs = e;
    }
    if let Some(lr) = args.lr {
        t.lr = lr;
    }
    if let Some(wd) = args.weight_decay {
        t.weight_decay = wd;
    }
    if let Some(b) = args.batch_size {
        t.batch_size = b;
    }
    if let Some(p) = args.patience {
        t.early_stop_tolerance = p;
    }
    t.validate()?;
    Ok(t)
}

pub fn split(
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(Vec<SceneSequence>, Vec<SceneSequence>, Vec<SceneSequence>)> {
    Ok(split_dataset(&data.sequences, cfg.seed, cfg.split)?)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn dump_graphs(path: &Path, data: &Dataset, model: &ModelConfig) -> Result<()> {
    let pe = pe_table(model)?;
    let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for seq in &data.sequences {
        let graphs = sequence_graphs(seq, model.knn_k, &pe)?;
        for (g, f) in graphs.iter().zip(&seq.frames) {
            serde_json::to_writer(&mut w, &g.record(seq.sequence_id, f.frame_index))?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn run(ctx: &Context, args: &TrainArgs) -> Result<()> {
    let data = load(&args.data)?;
    let mut model = resolve_model(ctx, &data, args.seed)?;
    let mut train_cfg = resolve_train(ctx, args)?;
    let search_space = match args.search {
        Some(0) => return Err(usage("--search budget must be at least 1")),
        Some(n) => {
            let mut s = overlay(&SearchSpace::default(), ctx.file.search.as_ref(), "search")?;
            s.trials = n;
            s.validate()?;
            Some(s)
        }
        None => None,
    };
    let resolved = ResolvedTrain {
        model: &model,
        train: &train_cfg,
        search: search_space.as_ref(),
    };
    let manifest = RunManifest::begin(
        "train",
        &args.out,
        serde_json::to_value(&resolved)?,
        train_cfg.seed,
        ctx.threads,
        &[&args.data],
    )?;
    let mut outputs = vec![];

    if let Some(p) = &args.dump_graphs {
        dump_graphs(p, &data, &model)?;
        outputs.push(p.clone());
    }

    let (train_seqs, val_seqs, test_seqs) = split(&data, &train_cfg)?;
    log::info!(
        "split {} / {} / {} sequences",
        train_seqs.len(),
        val_seqs.len(),
        test_seqs.len()
    );
    let train_set = build_samples(&train_seqs, &model)?;
    let val_set = build_samples(&val_seqs, &model)?;
    if train_set.skipped_sequences + val_set.skipped_sequences > 0 {
        eprintln!(
            "warning: skipped {} sequences shorter than T + H",
            train_set.skipped_sequences + val_set.skipped_sequences
        );
    }

    if let Some(space) = &search_space {
        let result = hyperparameter_search(
            space,
            &model,
            &train_cfg,
            &train_set.samples,
            &val_set.samples,
            train_cfg.seed,
        )?;
        let log_path = sibling(&args.out, "trials.jsonl");
        write_jsonl(&log_path, &result.trials)?;
        outputs.push(log_path);
        println!(
            "search: best trial {} of {} (validation MSE {})",
            result.best_trial,
            result.trials.len(),
            result.trials[result.best_trial].val_mse.unwrap_or(f64::NAN)
        );
        model = result.best_model;
        train_cfg = result.best_train;
    }

    let outcome = train(&model, &train_cfg, &train_set.samples, &val_set.samples)?;
    let best_val = outcome.best_val;
    let best_epoch = outcome.best_epoch;
    let epochs = outcome.history.len();
    let history_path = sibling(&args.out, "history.jsonl");
    write_jsonl(&history_path, &outcome.history)?;
    let ckpt = outcome.into_checkpoint(train_cfg);
    ckpt.save(&args.out)?;
    outputs.insert(0, args.out.clone());
    outputs.push(history_path);
    manifest.finish(&outputs)?;

    println!("epochs: {epochs}");
    println!("best epoch: {best_epoch}");
    println!("validation MSE: {best_val}");
    println!("parameters: {}", count_parameters(&model));
    Ok(())
}
