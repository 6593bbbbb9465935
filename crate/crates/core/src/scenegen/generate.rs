//! Deterministic scenario generator.
//!
//! Each sequence is simulated in a local ground frame where the ego starts at
//! the origin heading along `+y`. The BEV camera is fixed for the whole
//! sequence, aligned with the ego's initial heading and centred over the
//! bounding box of the ego path, so the ego stays inside the image for every
//! frame. Other road users and roadside objects are placed relative to the
//! ego path and dropped from frames in which they leave the image.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::camera::{meters_to_pixels, pixels_to_meters, CameraConfig, GroundPoint, PixelPoint};
use super::{
    Extent, ObjectClass, ScenarioKind, SceneFrame, SceneObject, SceneSequence, SequenceMeta,
};
use crate::error::{Error, Result};
use crate::rng::Rng;

pub const CLASS_EMBEDDING_DIM: usize = 8;
pub const GEOMETRY_DIM: usize = 4;

const CLASS_EMBEDDING_SEED: u64 = 0x6265_7674_7261_6a31;
const TEXTURE_STREAM_BASE: u64 = 1 << 40;
const SUBSTEPS_PER_FRAME: usize = 64;
const EGO_LENGTH_M: f64 = 4.5;
const EGO_WIDTH_M: f64 = 2.0;
const IMAGE_MARGIN_M: f64 = 1.5;
const TEXTURE_AMPLITUDE: f64 = 0.5;

/// Relative frequencies of background object classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMix {
    pub vehicle: f64,
    pub pedestrian: f64,
    pub traffic_light: f64,
    pub static_obstacle: f64,
}

impl ClassMix {
    fn weights(&self) -> [f64; 4] {
        [
            self.vehicle,
            self.pedestrian,
            self.traffic_light,
            self.static_obstacle,
        ]
    }

    fn class(i: usize) -> ObjectClass {
        [
            ObjectClass::Vehicle,
            ObjectClass::Pedestrian,
            ObjectClass::TrafficLight,
            ObjectClass::StaticObstacle,
        ][i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub n_sequences: usize,
    pub frames_per_sequence: usize,
    pub level: u8,
    pub seed: u64,
    pub dt_s: f64,
    pub class_mix: ClassMix,
    pub feature_size: usize,
    pub camera: CameraConfig,
    /// Upper bound on ego speed in m/s.
    pub v_max: f64,
    /// Observation window the data must support (T).
    pub obs_window: usize,
    /// Prediction horizon the data must support (H).
    pub horizon: usize,
}

impl GenerationSpec {
    /// Level presets: level 1 has 1000 sequences, level 2 has 5000 busier ones.
    pub fn level_preset(level: u8, seed: u64) -> Result<Self> {
        let (n, mix) = match level {
            1 => (
                1000,
                ClassMix {
                    vehicle: 0.45,
                    pedestrian: 0.10,
                    traffic_light: 0.15,
                    static_obstacle: 0.30,
                },
            ),
            2 => (
                5000,
                ClassMix {
                    vehicle: 0.35,
                    pedestrian: 0.30,
                    traffic_light: 0.10,
                    static_obstacle: 0.25,
                },
            ),
            other => return Err(Error::Config(format!("level must be 1 or 2, got {other}"))),
        };
        Ok(Self {
            n_sequences: n,
            frames_per_sequence: 16,
            level,
            seed,
            dt_s: 1.0,
            class_mix: mix,
            feature_size: 64,
            camera: CameraConfig::default(),
            v_max: 1.5,
            obs_window: 8,
            horizon: 5,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        if self.n_sequences == 0 {
            return Err(Error::Config("n_sequences must be at least 1".into()));
        }
        if self.level != 1 && self.level != 2 {
            return Err(Error::Config(format!(
                "level must be 1 or 2, got {}",
                self.level
            )));
        }
        let need = self.obs_window + self.horizon;
        if self.frames_per_sequence < need {
            return Err(Error::Config(format!(
                "frames_per_sequence = {} is below T + H = {} + {} = {}",
                self.frames_per_sequence, self.obs_window, self.horizon, need
            )));
        }
        if !(self.dt_s > 0.0) || !self.dt_s.is_finite() {
            return Err(Error::Config(format!(
                "dt_s must be positive, got {}",
                self.dt_s
            )));
        }
        if !(self.v_max > 0.0) || !self.v_max.is_finite() {
            return Err(Error::Config(format!(
                "v_max must be positive, got {}",
                self.v_max
            )));
        }
        if self.feature_size == 0 {
            return Err(Error::Config("feature_size must be at least 1".into()));
        }
        let w = self.class_mix.weights();
        if w.iter().any(|x| !(*x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config(format!("class mix weights invalid: {w:?}")));
        }
        Ok(())
    }

    fn scenario_weights(&self) -> [f64; 3] {
        match self.level {
            1 => [0.34, 0.33, 0.33],
            _ => [0.20, 0.35, 0.45],
        }
    }

    fn background_range(&self) -> (usize, usize) {
        match self.level {
            1 => (3, 6),
            _ => (7, 12),
        }
    }
}

/// Fixed per-class embedding shared by every dataset.
pub fn class_embedding(class: ObjectClass) -> [f64; CLASS_EMBEDDING_DIM] {
    let mut rng = Rng::with_stream(CLASS_EMBEDDING_SEED, class.index() as u64);
    let mut out = [0.0; CLASS_EMBEDDING_DIM];
    for v in &mut out {
        *v = rng.range(-1.0, 1.0);
    }
    out
}

pub fn generate_dataset(spec: &GenerationSpec) -> Result<Vec<SceneSequence>> {
    spec.validate()?;
    (0..spec.n_sequences)
        .into_par_iter()
        .map(|i| generate_sequence(spec, i as u32))
        .collect()
}

/// Ego speed and yaw-rate profile over continuous time.
#[derive(Debug, Clone, Copy)]
enum Motion {
    Cruise {
        v: f64,
    },
    Turn {
        v: f64,
        start: f64,
        duration: f64,
        yaw_rate: f64,
    },
    Yield {
        v: f64,
        brake_at: f64,
        decel: f64,
        go_at: f64,
        accel: f64,
    },
}

impl Motion {
    fn speed(&self, t: f64) -> f64 {
        match *self {
            Motion::Cruise { v } | Motion::Turn { v, .. } => v,
            Motion::Yield {
                v,
                brake_at,
                decel,
                go_at,
                accel,
            } => {
                if t < brake_at {
                    v
                } else if t < go_at {
                    (v - decel * (t - brake_at)).max(0.0)
                } else {
                    (accel * (t - go_at)).min(v)
                }
            }
        }
    }

    fn yaw_rate(&self, t: f64) -> f64 {
        match *self {
            Motion::Turn {
                start,
                duration,
                yaw_rate,
                ..
            } if t >= start && t < start + duration => yaw_rate,
            _ => 0.0,
        }
    }

    fn scaled(&self, k: f64) -> Motion {
        match *self {
            Motion::Cruise { v } => Motion::Cruise { v: v * k },
            Motion::Turn {
                v,
                start,
                duration,
                yaw_rate,
            } => Motion::Turn {
                v: v * k,
                start,
                duration,
                yaw_rate,
            },
            Motion::Yield {
                v,
                brake_at,
                decel,
                go_at,
                accel,
            } => Motion::Yield {
                v: v * k,
                brake_at,
                decel: decel * k,
                go_at,
                accel,
            },
        }
    }
}

/// Ego pose per frame in the local frame: position and heading (radians from +x).
struct EgoTrack {
    pos: Vec<GroundPoint>,
    heading: Vec<f64>,
}

fn simulate(motion: &Motion, frames: usize, dt: f64) -> EgoTrack {
    let h = dt / SUBSTEPS_PER_FRAME as f64;
    let mut p = GroundPoint::new(0.0, 0.0);
    let mut phi = std::f64::consts::FRAC_PI_2;
    let mut pos = vec![p];
    let mut heading = vec![phi];
    if let Motion::Cruise { v } = *motion {
        // Closed form keeps constant-velocity steps exactly uniform.
        for f in 1..frames {
            pos.push(GroundPoint::new(0.0, v * dt * f as f64));
            heading.push(phi);
        }
        return EgoTrack { pos, heading };
    }
    for f in 1..frames {
        for s in 0..SUBSTEPS_PER_FRAME {
            let t = (f - 1) as f64 * dt + s as f64 * h;
            let v = motion.speed(t + 0.5 * h);
            let w = motion.yaw_rate(t + 0.5 * h);
            if w.abs() > 1e-12 {
                let r = v / w;
                p.x += r * ((phi + w * h).sin() - phi.sin());
                p.y -= r * ((phi + w * h).cos() - phi.cos());
                phi += w * h;
            } else {
                p.x += v * h * phi.cos();
                p.y += v * h * phi.sin();
            }
        }
        pos.push(p);
        heading.push(phi);
    }
    EgoTrack { pos, heading }
}

/// Another scene participant moving with constant velocity (or static).
#[derive(Debug, Clone)]
struct Actor {
    class: ObjectClass,
    start: GroundPoint,
    velocity: GroundPoint,
    size_m: (f64, f64),
    heading: f64,
    appear_at: f64,
    vanish_at: f64,
}

impl Actor {
    fn position(&self, t: f64) -> GroundPoint {
        let dt = (t - self.appear_at).max(0.0);
        GroundPoint::new(
            self.start.x + self.velocity.x * dt,
            self.start.y + self.velocity.y * dt,
        )
    }

    fn alive(&self, t: f64) -> bool {
        t >= self.appear_at && t < self.vanish_at
    }
}

fn box_extent(length: f64, width: f64, heading: f64) -> (f64, f64) {
    let (s, c) = heading.sin_cos();
    (
        length * c.abs() + width * s.abs(),
        length * s.abs() + width * c.abs(),
    )
}

fn generate_sequence(spec: &GenerationSpec, sequence_id: u32) -> Result<SceneSequence> {
    let mut rng = Rng::with_stream(spec.seed, sequence_id as u64);
    let frames = spec.frames_per_sequence;
    let dt = spec.dt_s;
    let total_t = (frames - 1) as f64 * dt;
    let cam = &spec.camera;

    let kind = ScenarioKind::ALL[rng.weighted_index(&spec.scenario_weights())];
    let v0 = rng.range(0.45, 0.95) * spec.v_max;
    let mut ped_plan = None;
    let motion = match kind {
        ScenarioKind::Straight => Motion::Cruise { v: v0 },
        ScenarioKind::Turn => {
            let duration = rng.range(4.0, 8.0).min(total_t);
            let start = rng.range(0.0, (total_t - 0.5 * duration).max(0.0) * 0.7);
            let angle = rng.range(60f64.to_radians(), 100f64.to_radians());
            let side = if rng.coin(0.5) { 1.0 } else { -1.0 };
            Motion::Turn {
                v: v0,
                start,
                duration,
                yaw_rate: side * angle / duration,
            }
        }
        ScenarioKind::PedestrianCrossing => {
            let lo = 3.min(frames - 1);
            let hi = frames.saturating_sub(5).max(lo);
            let event_frame = rng.int_inclusive(lo, hi);
            let decel = rng.range(0.6, 1.2);
            let lateral = rng.range(3.0, 4.5);
            let walk = rng.range(1.0, 1.4);
            let side = if rng.coin(0.5) { 1.0 } else { -1.0 };
            let gap = rng.range(1.0, 2.0);
            let accel = rng.range(0.3, 0.6);
            ped_plan = Some((event_frame, decel, lateral, walk, side, gap, accel));
            Motion::Cruise { v: v0 }
        }
    };

    // Shrink speeds until the whole ego path fits inside the image.
    let half_w = cam.footprint_width_m() / 2.0 - IMAGE_MARGIN_M;
    let half_h = cam.footprint_height_m() / 2.0 - IMAGE_MARGIN_M;
    let mut scale = 1.0;
    let (track, crossing, anchor) = loop {
        let (motion, crossing) = match (motion, ped_plan) {
            (_, Some((event_frame, decel, lateral, walk, side, gap, accel))) => {
                let v = v0 * scale;
                let brake_at = event_frame as f64 * dt;
                let d = decel * scale;
                let stop_dist = v * v / (2.0 * d);
                let crosswalk_y = v * brake_at + stop_dist + gap;
                let clear_at = brake_at + (2.0 * lateral) / walk;
                let stop_at = brake_at + v / d;
                let go_at = clear_at.max(stop_at);
                let m = Motion::Yield {
                    v,
                    brake_at,
                    decel: d,
                    go_at,
                    accel,
                };
                let walker = Actor {
                    class: ObjectClass::Pedestrian,
                    start: GroundPoint::new(side * lateral, crosswalk_y),
                    velocity: GroundPoint::new(-side * walk, 0.0),
                    size_m: (0.6, 0.6),
                    heading: 0.0,
                    appear_at: brake_at,
                    vanish_at: brake_at + (2.0 * lateral + 1.0) / walk,
                };
                (m, Some(walker))
            }
            (m, None) => (m.scaled(scale), None),
        };
        let track = simulate(&motion, frames, dt);
        let (min_x, max_x, min_y, max_y) = track.pos.iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
        );
        let anchor = GroundPoint::new(0.5 * (min_x + max_x), 0.5 * (min_y + max_y));
        if (max_x - min_x) / 2.0 <= half_w && (max_y - min_y) / 2.0 <= half_h {
            break (track, crossing, anchor);
        }
        scale *= 0.85;
        if scale < 1e-3 {
            return Err(Error::Config(
                "ego path cannot fit inside the image; reduce frames_per_sequence".into(),
            ));
        }
    };

    let mut actors: Vec<Actor> = Vec::new();
    if let Some(w) = crossing {
        actors.push(w);
    }
    let (lo, hi) = spec.background_range();
    let n_bg = rng.int_inclusive(lo, hi);
    for k in 0..n_bg {
        let class = match (spec.level, k) {
            (2, 0) => ObjectClass::Vehicle,
            (2, 1) => ObjectClass::Pedestrian,
            _ => ClassMix::class(rng.weighted_index(&spec.class_mix.weights())),
        };
        for _attempt in 0..20 {
            let actor = place_actor(&mut rng, class, &track, total_t, dt);
            let visible = (0..frames).any(|f| {
                let t = f as f64 * dt;
                actor.alive(t) && in_image(actor.position(t) - anchor, cam)
            });
            if visible {
                actors.push(actor);
                break;
            }
        }
    }

    let tex_seed = texture_seed(spec.seed, sequence_id);
    let textures: Vec<Vec<f64>> = (0..=actors.len())
        .map(|id| object_texture(tex_seed, id as u32, spec.feature_size))
        .collect();

    let mut out_frames = Vec::with_capacity(frames);
    let mut truth = Vec::with_capacity(frames);
    let s = cam.meters_per_pixel();
    for f in 0..frames {
        let t = f as f64 * dt;
        let ego_m = track.pos[f] - anchor;
        let ego_px = meters_to_pixels(ego_m, cam);
        let (ew, eh) = box_extent(EGO_LENGTH_M, EGO_WIDTH_M, track.heading[f]);
        let mut objects = vec![make_object(
            0,
            ObjectClass::Ego,
            ego_px,
            Extent {
                w: ew / s,
                h: eh / s,
            },
            &textures[0],
            spec,
        )];
        for (i, a) in actors.iter().enumerate() {
            if !a.alive(t) {
                continue;
            }
            let q = a.position(t) - anchor;
            if !in_image(q, cam) {
                continue;
            }
            let px = meters_to_pixels(q, cam);
            let (w, h) = box_extent(a.size_m.0, a.size_m.1, a.heading);
            objects.push(make_object(
                i as u32 + 1,
                a.class,
                px,
                Extent { w: w / s, h: h / s },
                &textures[i + 1],
                spec,
            ));
        }
        // Ground truth is defined through the stored pixel centre.
        truth.push(pixels_to_meters(ego_px, cam)?);
        out_frames.push(SceneFrame {
            frame_index: f as u32,
            objects,
            ego_index: 0,
        });
    }

    Ok(SceneSequence {
        sequence_id,
        frames: out_frames,
        ego_truth_m: truth,
        meta: SequenceMeta {
            level: spec.level,
            seed: spec.seed,
            scenario_kind: kind,
        },
    })
}

fn in_image(q: GroundPoint, cam: &CameraConfig) -> bool {
    let p = meters_to_pixels(q, cam);
    p.x >= 0.0 && p.x < cam.width() && p.y >= 0.0 && p.y < cam.height()
}

fn place_actor(
    rng: &mut Rng,
    class: ObjectClass,
    track: &EgoTrack,
    total_t: f64,
    dt: f64,
) -> Actor {
    let f = ((rng.uniform() * track.pos.len() as f64) as usize).min(track.pos.len() - 1);
    let base = track.pos[f];
    let phi = track.heading[f];
    let (dir, normal) = (
        GroundPoint::new(phi.cos(), phi.sin()),
        GroundPoint::new(-phi.sin(), phi.cos()),
    );
    let side = if rng.coin(0.5) { 1.0 } else { -1.0 };
    let along = rng.range(-3.0, 3.0);
    let at = |lateral: f64| {
        GroundPoint::new(
            base.x + dir.x * along + normal.x * lateral,
            base.y + dir.y * along + normal.y * lateral,
        )
    };
    let still = GroundPoint::new(0.0, 0.0);
    let forever = total_t + dt;
    match class {
        ObjectClass::Vehicle => {
            if rng.coin(0.5) {
                Actor {
                    class,
                    start: at(side * rng.range(2.8, 4.0)),
                    velocity: still,
                    size_m: (4.5, 2.0),
                    heading: phi,
                    appear_at: 0.0,
                    vanish_at: forever,
                }
            } else {
                let speed = rng.range(0.8, 2.0);
                let sign = if rng.coin(0.5) { 1.0 } else { -1.0 };
                let start = at(-3.2);
                Actor {
                    class,
                    start: GroundPoint::new(
                        start.x - sign * dir.x * speed * total_t * 0.5,
                        start.y - sign * dir.y * speed * total_t * 0.5,
                    ),
                    velocity: GroundPoint::new(sign * dir.x * speed, sign * dir.y * speed),
                    size_m: (4.5, 2.0),
                    heading: phi,
                    appear_at: 0.0,
                    vanish_at: forever,
                }
            }
        }
        ObjectClass::Pedestrian => {
            let speed = rng.range(0.4, 1.2);
            let sign = if rng.coin(0.5) { 1.0 } else { -1.0 };
            Actor {
                class,
                start: at(side * rng.range(4.5, 7.0)),
                velocity: GroundPoint::new(sign * dir.x * speed, sign * dir.y * speed),
                size_m: (0.6, 0.6),
                heading: phi,
                appear_at: 0.0,
                vanish_at: forever,
            }
        }
        ObjectClass::TrafficLight => Actor {
            class,
            start: at(side * rng.range(3.0, 6.0)),
            velocity: still,
            size_m: (0.6, 0.6),
            heading: phi,
            appear_at: 0.0,
            vanish_at: forever,
        },
        ObjectClass::StaticObstacle | ObjectClass::Ego => {
            let size = rng.range(0.6, 1.5);
            Actor {
                class: ObjectClass::StaticObstacle,
                start: at(side * rng.range(2.5, 7.0)),
                velocity: still,
                size_m: (size, size),
                heading: phi,
                appear_at: 0.0,
                vanish_at: forever,
            }
        }
    }
}

fn texture_seed(seed: u64, sequence_id: u32) -> u64 {
    // splitmix64 finalizer over (seed, sequence)
    let mut z = seed ^ (sequence_id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn object_texture(seed: u64, object_id: u32, feature_size: usize) -> Vec<f64> {
    let n = feature_size.saturating_sub(CLASS_EMBEDDING_DIM + GEOMETRY_DIM);
    let mut rng = Rng::with_stream(seed, TEXTURE_STREAM_BASE + object_id as u64);
    (0..n)
        .map(|_| rng.range(-TEXTURE_AMPLITUDE, TEXTURE_AMPLITUDE))
        .collect()
}

fn make_object(
    object_id: u32,
    class: ObjectClass,
    center: PixelPoint,
    extent: Extent,
    texture: &[f64],
    spec: &GenerationSpec,
) -> SceneObject {
    let cam = &spec.camera;
    let mut feature = Vec::with_capacity(CLASS_EMBEDDING_DIM + GEOMETRY_DIM + texture.len());
    feature.extend_from_slice(&class_embedding(class));
    feature.extend_from_slice(&[
        center.x / cam.width(),
        center.y / cam.height(),
        extent.w / cam.width(),
        extent.h / cam.height(),
    ]);
    feature.extend_from_slice(texture);
    feature.truncate(spec.feature_size);
    SceneObject {
        object_id,
        class_id: class,
        center,
        extent,
        feature,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(level: u8, n: usize) -> GenerationSpec {
        let mut s = GenerationSpec::level_preset(level, 7).unwrap();
        s.n_sequences = n;
        s.feature_size = 32;
        s
    }

    #[test]
    fn level_presets() {
        assert_eq!(
            GenerationSpec::level_preset(1, 0).unwrap().n_sequences,
            1000
        );
        assert_eq!(
            GenerationSpec::level_preset(2, 0).unwrap().n_sequences,
            5000
        );
        assert!(GenerationSpec::level_preset(3, 0).is_err());
    }

    #[test]
    fn too_few_frames_is_config_error() {
        let mut s = small(1, 2);
        s.frames_per_sequence = 3;
        let err = generate_dataset(&s).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("T + H"), "{err}");
    }

    #[test]
    fn frames_satisfy_invariants() {
        for level in [1, 2] {
            let s = small(level, 40);
            for seq in generate_dataset(&s).unwrap() {
                assert_eq!(seq.frames.len(), s.frames_per_sequence);
                seq.validate(&s.camera, s.feature_size).unwrap();
            }
        }
    }

    #[test]
    fn deterministic() {
        let s = small(1, 12);
        assert_eq!(generate_dataset(&s).unwrap(), generate_dataset(&s).unwrap());
    }

    #[test]
    fn constant_velocity_steps_are_uniform() {
        let s = small(1, 60);
        let seqs = generate_dataset(&s).unwrap();
        let mut checked = 0;
        for seq in seqs
            .iter()
            .filter(|q| q.meta.scenario_kind == ScenarioKind::Straight)
        {
            let d0 = seq.ego_truth_m[1] - seq.ego_truth_m[0];
            for w in seq.ego_truth_m.windows(2) {
                let d = w[1] - w[0];
                assert!((d.x - d0.x).abs() <= 1e-9 && (d.y - d0.y).abs() <= 1e-9);
            }
            checked += 1;
        }
        assert!(checked > 5);
    }

    #[test]
    fn ego_speed_is_bounded() {
        let s = small(2, 60);
        for seq in generate_dataset(&s).unwrap() {
            for w in seq.ego_truth_m.windows(2) {
                assert!((w[1] - w[0]).norm() <= s.v_max * s.dt_s + 1e-9);
            }
        }
    }

    #[test]
    fn all_scenarios_occur() {
        let seqs = generate_dataset(&small(1, 60)).unwrap();
        for kind in ScenarioKind::ALL {
            assert!(
                seqs.iter().any(|q| q.meta.scenario_kind == kind),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn crossing_pedestrian_appears_mid_sequence() {
        let seqs = generate_dataset(&small(1, 60)).unwrap();
        let seq = seqs
            .iter()
            .find(|q| q.meta.scenario_kind == ScenarioKind::PedestrianCrossing)
            .unwrap();
        let has_walker = |f: &SceneFrame| f.objects.iter().any(|o| o.object_id == 1);
        assert!(!has_walker(&seq.frames[0]));
        assert!(seq.frames.iter().any(has_walker));
    }

    #[test]
    fn features_carry_class_and_geometry() {
        let s = small(1, 3);
        let seq = &generate_dataset(&s).unwrap()[0];
        let ego = seq.frames[0].ego();
        assert_eq!(
            &ego.feature[..CLASS_EMBEDDING_DIM],
            &class_embedding(ObjectClass::Ego)
        );
        assert_eq!(ego.feature[CLASS_EMBEDDING_DIM], ego.center.x / 800.0);
        assert_eq!(ego.feature.len(), 32);

        let mut tiny = small(1, 1);
        tiny.feature_size = 5;
        let seq = &generate_dataset(&tiny).unwrap()[0];
        assert_eq!(seq.frames[0].ego().feature.len(), 5);
    }
}
