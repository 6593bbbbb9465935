#![allow(dead_code)]

use bevtraj::model::ModelConfig;
use bevtraj::nncore::Matrix;
use bevtraj::rng::Rng;
use bevtraj::scenegen::{Extent, ObjectClass, PixelPoint, SceneFrame, SceneObject};

pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.range(-scale, scale)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// A frame with the ego at index 0 and `n - 1` other objects at random
/// positions inside an 800 × 600 image.
pub fn random_frame(rng: &mut Rng, n: usize, feature_size: usize, frame_index: u32) -> SceneFrame {
    let objects = (0..n)
        .map(|i| SceneObject {
            object_id: i as u32,
            class_id: if i == 0 {
                ObjectClass::Ego
            } else {
                ObjectClass::ALL[1 + rng.below(4) as usize]
            },
            center: PixelPoint::new(rng.range(0.0, 799.0), rng.range(0.0, 599.0)),
            extent: Extent {
                w: rng.range(5.0, 60.0),
                h: rng.range(5.0, 60.0),
            },
            feature: (0..feature_size).map(|_| rng.range(-1.0, 1.0)).collect(),
        })
        .collect();
    SceneFrame {
        frame_index,
        objects,
        ego_index: 0,
    }
}

/// Small model used by gradient and invariance tests.
pub fn tiny_config(obs_window: usize) -> ModelConfig {
    ModelConfig {
        feature_size: 6,
        node_dim: 4,
        gcn_layers: 2,
        gcn_hidden: 5,
        lstm_layers: 2,
        lstm_hidden: 4,
        obs_window,
        horizon: 5,
        knn_k: 2,
        pe_max_len: 801,
        seed: 11,
    }
}
