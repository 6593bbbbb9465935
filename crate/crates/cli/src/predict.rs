use std::path::PathBuf;

use anyhow::{Context as _, Result};
use clap::Args;

use bevtraj::model::{forward, ModelConfig};
use bevtraj::scenegen::GroundPoint;
use bevtraj::train::{make_samples, pe_table, persistence_prediction, sequence_graphs};

use crate::config::overlay;
use crate::error::usage;
use crate::evaluate::{check_compatible, load_checkpoint};
use crate::manifest::RunManifest;
use crate::plot::{render_csv, render_svg, PlotInput};
use crate::train::load;
use crate::Context;

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Checkpoint; not needed with --baseline.
    #[arg(long)]
    pub ckpt: Option<PathBuf>,
    #[arg(long)]
    pub sequence: u32,
    /// Index of the last observed frame in the sequence.
    #[arg(long)]
    pub frame: usize,
    /// Output path (.csv for predict, .svg for plot).
    #[arg(long)]
    pub out: PathBuf,
    /// Use the constant-velocity baseline instead of a checkpoint.
    #[arg(long)]
    pub baseline: bool,
}

pub fn run(ctx: &Context, args: &PredictArgs, svg: bool) -> Result<()> {
    let data = load(&args.data)?;
    let ckpt = match (&args.ckpt, args.baseline) {
        (Some(p), false) => Some(load_checkpoint(p)?),
        (_, true) => None,
        (None, false) => return Err(usage("--ckpt is required unless --baseline is given")),
    };
    let model = match &ckpt {
        Some(c) => {
            check_compatible(c, &data)?;
            *c.model_config()
        }
        None => {
            let mut m = overlay(&ModelConfig::default(), ctx.file.model.as_ref(), "model")?;
            m.feature_size = data.header.feature_size;
            m.validate()?;
            m
        }
    };
    let seq = data
        .find(args.sequence)
        .ok_or_else(|| usage(format!("--sequence {} not in dataset", args.sequence)))?;
    let (t, h) = (model.obs_window, model.horizon);
    let n = seq.frames.len();
    if args.frame + 1 < t || args.frame + h >= n {
        return Err(usage(format!(
            "--frame {} out of range: need {} <= frame <= {} for T = {t}, H = {h} in a {n}-frame sequence",
            args.frame,
            t.saturating_sub(1),
            n.saturating_sub(h + 1)
        )));
    }

    let mut inputs = vec![args.data.as_path()];
    if let (Some(p), false) = (&args.ckpt, args.baseline) {
        inputs.push(p.as_path());
    }
    let command = if svg { "plot" } else { "predict" };
    let manifest = RunManifest::begin(
        command,
        &args.out,
        serde_json::json!({
            "model": model,
            "sequence": args.sequence,
            "frame": args.frame,
            "baseline": args.baseline,
        }),
        model.seed,
        ctx.threads,
        &inputs,
    )?;

    let pe = pe_table(&model)?;
    let graphs = sequence_graphs(seq, model.knn_k, &pe)?;
    let sample = make_samples(seq, &graphs, t, h)
        .into_iter()
        .find(|s| s.end_frame == args.frame)
        .expect("frame range checked above");
    let origin = sample.origin();
    let predicted: Vec<GroundPoint> = match &ckpt {
        Some(c) => forward(&sample.graph_refs(), &c.params, origin)?.points,
        None => persistence_prediction(&sample)
            .into_iter()
            .map(|d| origin + d)
            .collect(),
    };
    let input = PlotInput {
        camera: data.header.camera,
        frame: &seq.frames[args.frame],
        graph: &graphs[args.frame],
        start: origin,
        truth: sample.target_absolute(),
        predicted,
    };

    let csv_path = if svg {
        args.out.with_extension("csv")
    } else {
        args.out.clone()
    };
    let mut outputs = vec![];
    if svg {
        std::fs::write(&args.out, render_svg(&input))
            .with_context(|| format!("writing {}", args.out.display()))?;
        outputs.push(args.out.clone());
    }
    std::fs::write(&csv_path, render_csv(&input))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    outputs.push(csv_path);
    manifest.finish(&outputs)?;
    for p in &outputs {
        println!("wrote {}", p.display());
    }
    Ok(())
}
