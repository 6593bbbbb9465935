use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use bevtraj::scenegen::{generate_dataset, save_dataset, Dataset, DatasetHeader, GenerationSpec};

use crate::config::overlay;
use crate::manifest::RunManifest;
use crate::Context;

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Dataset level preset (1 or 2).
    #[arg(long)]
    pub level: Option<u8>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the preset's sequence count.
    #[arg(long)]
    pub sequences: Option<usize>,
    /// Override the preset's frames per sequence.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Override the preset's per-object feature size.
    #[arg(long)]
    pub feature_size: Option<usize>,
}

pub const DEFAULT_LEVEL: u8 = 1;
pub const DEFAULT_SEED: u64 = 7;

pub fn resolve(ctx: &Context, args: &GenerateArgs) -> Result<GenerationSpec> {
    let table = ctx.file.generate.as_ref();
    let from_file = |key: &str| table.and_then(|t| t.get(key)).and_then(|v| v.as_integer());
    let level = args
        .level
        .or_else(|| from_file("level").map(|v| v as u8))
        .unwrap_or(DEFAULT_LEVEL);
    let seed = args
        .seed
        .or_else(|| from_file("seed").map(|v| v as u64))
        .unwrap_or(DEFAULT_SEED);
    let preset = GenerationSpec::level_preset(level, seed)
        .map_err(|e| crate::error::usage(format!("--level: {e}")))?;
    let mut spec = overlay(&preset, table, "generate")?;
    spec.level = level;
    spec.seed = seed;
    if let Some(n) = args.sequences {
        spec.n_sequences = n;
    }
    if let Some(n) = args.frames {
        spec.frames_per_sequence = n;
    }
    if let Some(f) = args.feature_size {
        spec.feature_size = f;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn run(ctx: &Context, args: &GenerateArgs) -> Result<()> {
    let spec = resolve(ctx, args)?;
    let manifest = RunManifest::begin(
        "generate",
        &args.out,
        serde_json::to_value(&spec)?,
        spec.seed,
        ctx.threads,
        &[],
    )?;
    let sequences = generate_dataset(&spec)?;
    let dataset = Dataset {
        header: DatasetHeader::new(spec.camera, spec.feature_size, spec.dt_s),
        sequences,
    };
    save_dataset(&dataset, &args.out)?;
    let m = manifest.finish(std::slice::from_ref(&args.out))?;
    println!(
        "wrote {} sequences to {} (manifest {})",
        dataset.sequences.len(),
        args.out.display(),
        m.display()
    );
    Ok(())
}
