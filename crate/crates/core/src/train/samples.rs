use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_scene_graph, positional_encoding, PositionalEncodingTable, SceneGraph};
use crate::model::ModelConfig;
use crate::scenegen::{GroundPoint, ScenarioKind, SceneSequence};

/// One sliding window: `T` observed graphs and `H` future ego offsets.
#[derive(Debug, Clone)]
pub struct Sample {
    pub sequence_id: u32,
    /// Index of the last observed frame within its sequence.
    pub end_frame: usize,
    pub scenario: ScenarioKind,
    pub graphs: Vec<Arc<SceneGraph>>,
    /// Ego ground positions over the observed window.
    pub ego_window: Vec<GroundPoint>,
    /// Future ego positions relative to the last observed one.
    pub target: Vec<GroundPoint>,
}

impl Sample {
    /// Ego position at the last observed frame.
    pub fn origin(&self) -> GroundPoint {
        *self.ego_window.last().expect("non-empty window")
    }

    pub fn graph_refs(&self) -> Vec<&SceneGraph> {
        self.graphs.iter().map(Arc::as_ref).collect()
    }

    /// Absolute future positions.
    pub fn target_absolute(&self) -> Vec<GroundPoint> {
        let o = self.origin();
        self.target.iter().map(|d| o + *d).collect()
    }
}

/// Samples built from a set of sequences.
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    /// Sequences too short for one window.
    pub skipped_sequences: usize,
}

pub fn pe_table(cfg: &ModelConfig) -> Result<PositionalEncodingTable> {
    positional_encoding(cfg.node_dim, cfg.pe_max_len)
}

/// Scene graphs for every frame of a sequence.
pub fn sequence_graphs(
    seq: &SceneSequence,
    k: usize,
    pe: &PositionalEncodingTable,
) -> Result<Vec<Arc<SceneGraph>>> {
    seq.frames
        .iter()
        .map(|f| {
            build_scene_graph(f, k, pe).map(Arc::new).map_err(|e| {
                Error::Input(format!(
                    "sequence {} frame {}: {e}",
                    seq.sequence_id, f.frame_index
                ))
            })
        })
        .collect()
}

/// All windows of a sequence; windows with fewer than `T + H` frames are not formed.
pub fn make_samples(
    seq: &SceneSequence,
    graphs: &[Arc<SceneGraph>],
    obs_window: usize,
    horizon: usize,
) -> Vec<Sample> {
    let n = seq.frames.len().min(graphs.len());
    if obs_window == 0 || n < obs_window + horizon {
        return Vec::new();
    }
    (obs_window - 1..n - horizon)
        .map(|end| {
            let origin = seq.ego_truth_m[end];
            Sample {
                sequence_id: seq.sequence_id,
                end_frame: end,
                scenario: seq.meta.scenario_kind,
                graphs: graphs[end + 1 - obs_window..=end].to_vec(),
                ego_window: seq.ego_truth_m[end + 1 - obs_window..=end].to_vec(),
                target: seq.ego_truth_m[end + 1..=end + horizon]
                    .iter()
                    .map(|p| *p - origin)
                    .collect(),
            }
        })
        .collect()
}

/// Builds graphs and windows for every sequence, in input order.
pub fn build_samples(seqs: &[SceneSequence], cfg: &ModelConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let pe = pe_table(cfg)?;
    let per_seq: Vec<Vec<Sample>> = seqs
        .par_iter()
        .map(|seq| {
            if seq.frames.len() < cfg.obs_window + cfg.horizon {
                return Ok(Vec::new());
            }
            let graphs = sequence_graphs(seq, cfg.knn_k, &pe)?;
            Ok(make_samples(seq, &graphs, cfg.obs_window, cfg.horizon))
        })
        .collect::<Result<_>>()?;
    let skipped = per_seq.iter().filter(|s| s.is_empty()).count();
    if skipped > 0 {
        log::warn!("skipped {skipped} sequences shorter than T + H frames");
    }
    Ok(SampleSet {
        samples: per_seq.into_iter().flatten().collect(),
        skipped_sequences: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenegen::{generate_dataset, GenerationSpec};

    fn small() -> (Vec<SceneSequence>, ModelConfig) {
        let mut spec = GenerationSpec::level_preset(1, 5).unwrap();
        spec.n_sequences = 3;
        spec.feature_size = 16;
        let cfg = ModelConfig {
            feature_size: 16,
            ..ModelConfig::default()
        };
        (generate_dataset(&spec).unwrap(), cfg)
    }

    #[test]
    fn window_count_and_targets() {
        let (seqs, cfg) = small();
        let set = build_samples(&seqs, &cfg).unwrap();
        // 16 frames, T=8, H=5: 4 windows per sequence.
        assert_eq!(set.samples.len(), 12);
        assert_eq!(set.skipped_sequences, 0);
        let s = &set.samples[0];
        assert_eq!(s.end_frame, 7);
        assert_eq!(s.graphs.len(), 8);
        assert_eq!(s.target.len(), 5);
        let seq = &seqs[0];
        for j in 0..5 {
            let want = seq.ego_truth_m[8 + j] - seq.ego_truth_m[7];
            assert_eq!(s.target[j], want);
        }
        assert_eq!(s.target_absolute()[4], seq.ego_truth_m[12]);
    }

    #[test]
    fn short_sequences_skipped() {
        let (mut seqs, cfg) = small();
        seqs[1].frames.truncate(12);
        seqs[1].ego_truth_m.truncate(12);
        let set = build_samples(&seqs, &cfg).unwrap();
        assert_eq!(set.skipped_sequences, 1);
        assert_eq!(set.samples.len(), 8);
    }
}
