//! Synthetic bird's-eye-view scene sequences and their file format.

mod camera;
mod generate;
mod io;

use serde::{Deserialize, Serialize};

pub use camera::{meters_to_pixels, pixels_to_meters, CameraConfig, GroundPoint, PixelPoint};
pub use generate::{
    class_embedding, generate_dataset, ClassMix, GenerationSpec, CLASS_EMBEDDING_DIM, GEOMETRY_DIM,
};
pub use io::{load_dataset, save_dataset, Dataset, DatasetHeader, FORMAT_VERSION};

use crate::error::{Error, Result};

/// Backbone feature sizes the generator offers as presets.
pub const FEATURE_SIZE_PRESETS: [usize; 4] = [512, 768, 1024, 1280];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Ego,
    Vehicle,
    Pedestrian,
    TrafficLight,
    StaticObstacle,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 5] = [
        ObjectClass::Ego,
        ObjectClass::Vehicle,
        ObjectClass::Pedestrian,
        ObjectClass::TrafficLight,
        ObjectClass::StaticObstacle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::Ego => "ego",
            ObjectClass::Vehicle => "vehicle",
            ObjectClass::Pedestrian => "pedestrian",
            ObjectClass::TrafficLight => "traffic_light",
            ObjectClass::StaticObstacle => "static_obstacle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub object_id: u32,
    pub class_id: ObjectClass,
    pub center: PixelPoint,
    pub extent: Extent,
    pub feature: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFrame {
    pub frame_index: u32,
    pub objects: Vec<SceneObject>,
    pub ego_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Straight,
    Turn,
    PedestrianCrossing,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::Straight,
        ScenarioKind::Turn,
        ScenarioKind::PedestrianCrossing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Straight => "straight",
            ScenarioKind::Turn => "turn",
            ScenarioKind::PedestrianCrossing => "pedestrian_crossing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceMeta {
    pub level: u8,
    pub seed: u64,
    pub scenario_kind: ScenarioKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSequence {
    pub sequence_id: u32,
    pub frames: Vec<SceneFrame>,
    pub ego_truth_m: Vec<GroundPoint>,
    pub meta: SequenceMeta,
}

/// A violated invariant: the offending field path and what is wrong with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl SceneObject {
    pub fn check(&self, cam: &CameraConfig, feature_size: usize) -> Result<(), Violation> {
        let c = self.center;
        if !(c.x >= 0.0 && c.x < cam.width()) {
            return Err(Violation::new(
                "center.x",
                format!("{} outside [0, {})", c.x, cam.width()),
            ));
        }
        if !(c.y >= 0.0 && c.y < cam.height()) {
            return Err(Violation::new(
                "center.y",
                format!("{} outside [0, {})", c.y, cam.height()),
            ));
        }
        if !(self.extent.w > 0.0) || !(self.extent.h > 0.0) {
            return Err(Violation::new("extent", "extent must be positive"));
        }
        if self.feature.len() != feature_size {
            return Err(Violation::new(
                "feature",
                format!(
                    "length {} != feature size {}",
                    self.feature.len(),
                    feature_size
                ),
            ));
        }
        if let Some(k) = self.feature.iter().position(|v| !v.is_finite()) {
            return Err(Violation::new(
                format!("feature[{k}]"),
                "non-finite component",
            ));
        }
        Ok(())
    }
}

impl SceneFrame {
    pub fn ego(&self) -> &SceneObject {
        &self.objects[self.ego_index]
    }

    pub fn check(&self, cam: &CameraConfig, feature_size: usize) -> Result<(), Violation> {
        if self.objects.is_empty() {
            return Err(Violation::new("objects", "frame has no objects"));
        }
        let egos: Vec<usize> = self
            .objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.class_id == ObjectClass::Ego)
            .map(|(i, _)| i)
            .collect();
        if egos.len() != 1 {
            return Err(Violation::new(
                "objects",
                format!("expected exactly one ego object, found {}", egos.len()),
            ));
        }
        if self.ego_index != egos[0] {
            return Err(Violation::new(
                "ego_index",
                format!("points at {}, ego is at {}", self.ego_index, egos[0]),
            ));
        }
        for (i, o) in self.objects.iter().enumerate() {
            o.check(cam, feature_size)
                .map_err(|v| Violation::new(format!("objects[{i}].{}", v.field), v.message))?;
        }
        Ok(())
    }
}

impl SceneSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn check(&self, cam: &CameraConfig, feature_size: usize) -> Result<(), Violation> {
        if self.ego_truth_m.len() != self.frames.len() {
            return Err(Violation::new(
                "ego_truth_m",
                format!(
                    "{} entries for {} frames",
                    self.ego_truth_m.len(),
                    self.frames.len()
                ),
            ));
        }
        for (t, f) in self.frames.iter().enumerate() {
            if t > 0 && f.frame_index <= self.frames[t - 1].frame_index {
                return Err(Violation::new(
                    format!("frames[{t}].frame_index"),
                    "frames not strictly ordered",
                ));
            }
            f.check(cam, feature_size)
                .map_err(|v| Violation::new(format!("frames[{t}].{}", v.field), v.message))?;
            let expected = pixels_to_meters(f.ego().center, cam).map_err(|e| {
                Violation::new(format!("frames[{t}].objects.center"), e.to_string())
            })?;
            let truth = self.ego_truth_m[t];
            let tol = 1e-9 * (1.0 + truth.norm());
            if (expected.x - truth.x).abs() > tol || (expected.y - truth.y).abs() > tol {
                return Err(Violation::new(
                    format!("ego_truth_m[{t}]"),
                    "does not match the ego pixel center",
                ));
            }
        }
        Ok(())
    }

    pub fn validate(&self, cam: &CameraConfig, feature_size: usize) -> Result<()> {
        self.check(cam, feature_size).map_err(|v| {
            Error::Input(format!(
                "sequence {}: {}: {}",
                self.sequence_id, v.field, v.message
            ))
        })
    }
}
