//! Line-delimited JSON dataset files.
//!
//! Line 1 is a [`DatasetHeader`]; every following line is one
//! [`SceneSequence`]. Floats are written in shortest round-trip form and
//! parsed with correct rounding, so `load(save(x)) == x` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::camera::CameraConfig;
use super::SceneSequence;
use crate::error::{Error, Result};
use crate::rng::RNG_ALGORITHM;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format_version: u32,
    pub rng: String,
    pub camera: CameraConfig,
    pub feature_size: usize,
    pub dt_s: f64,
}

impl DatasetHeader {
    pub fn new(camera: CameraConfig, feature_size: usize, dt_s: f64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            rng: RNG_ALGORITHM.to_string(),
            camera,
            feature_size,
            dt_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub sequences: Vec<SceneSequence>,
}

impl Dataset {
    pub fn find(&self, sequence_id: u32) -> Option<&SceneSequence> {
        self.sequences.iter().find(|s| s.sequence_id == sequence_id)
    }
}

/// Serializes the dataset to a string in file format.
pub fn to_jsonl(data: &Dataset) -> Result<String> {
    let mut out = String::new();
    let enc = |e: serde_json::Error| Error::Numeric(format!("cannot encode dataset: {e}"));
    out.push_str(&serde_json::to_string(&data.header).map_err(enc)?);
    out.push('\n');
    for s in &data.sequences {
        out.push_str(&serde_json::to_string(s).map_err(enc)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn save_dataset(data: &Dataset, path: &Path) -> Result<()> {
    let text = to_jsonl(data)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut header: Option<DatasetHeader> = None;
    let mut sequences = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        match &header {
            None => header = Some(parse_header(&line, line_no)?),
            Some(h) => {
                if line.trim().is_empty() {
                    continue;
                }
                let seq: SceneSequence = parse_line(&line, line_no)?;
                seq.check(&h.camera, h.feature_size)
                    .map_err(|v| Error::Parse {
                        line: line_no,
                        field: v.field,
                        message: v.message,
                    })?;
                sequences.push(seq);
            }
        }
    }
    let header = match header {
        Some(h) => h,
        // A zero-byte file is the empty dataset.
        None => DatasetHeader::new(CameraConfig::default(), 0, 1.0),
    };
    Ok(Dataset { header, sequences })
}

fn parse_header(line: &str, line_no: usize) -> Result<DatasetHeader> {
    let raw: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        field: "header".into(),
        message: e.to_string(),
    })?;
    match raw
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
    {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::Version {
                found: v as u32,
                expected: FORMAT_VERSION,
            })
        }
        None => {
            return Err(Error::Parse {
                line: line_no,
                field: "format_version".into(),
                message: "missing or not an integer".into(),
            })
        }
    }
    let header: DatasetHeader = parse_line(line, line_no)?;
    header.camera.validate().map_err(|e| Error::Parse {
        line: line_no,
        field: "camera".into(),
        message: e.to_string(),
    })?;
    Ok(header)
}

fn parse_line<T: serde::de::DeserializeOwned>(line: &str, line_no: usize) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(line);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
        line: line_no,
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| Error::Parse {
        line: line_no,
        field: ".".into(),
        message: e.to_string(),
    })?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenegen::{generate_dataset, GenerationSpec};

    fn dataset(n: usize) -> Dataset {
        let mut spec = GenerationSpec::level_preset(1, 3).unwrap();
        spec.n_sequences = n;
        spec.feature_size = 24;
        Dataset {
            header: DatasetHeader::new(spec.camera, spec.feature_size, spec.dt_s),
            sequences: generate_dataset(&spec).unwrap(),
        }
    }

    #[test]
    fn empty_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(load_dataset(&path).unwrap().sequences.is_empty());

        let d = Dataset {
            header: DatasetHeader::new(CameraConfig::default(), 16, 1.0),
            sequences: vec![],
        };
        save_dataset(&d, &path).unwrap();
        assert_eq!(load_dataset(&path).unwrap(), d);
    }

    #[test]
    fn ten_sequences_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let d = dataset(10);
        save_dataset(&d, &path).unwrap();
        assert_eq!(load_dataset(&path).unwrap(), d);
    }

    #[test]
    fn truncated_last_line_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let text = to_jsonl(&dataset(3)).unwrap();
        let cut = &text[..text.len() - 40];
        std::fs::write(&path, cut).unwrap();
        match load_dataset(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_field_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let text = to_jsonl(&dataset(1)).unwrap();
        let broken = text.replacen("\"ego_index\":0", "\"ego_index\":\"zero\"", 1);
        std::fs::write(&path, broken).unwrap();
        match load_dataset(&path) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 2);
                assert!(field.contains("ego_index"), "{field}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invariant_violation_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let mut d = dataset(1);
        d.sequences[0].frames[2].ego_index = 1;
        save_dataset(&d, &path).unwrap();
        match load_dataset(&path) {
            Err(Error::Parse { field, .. }) => assert!(field.contains("frames[2]"), "{field}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let text = to_jsonl(&dataset(1)).unwrap().replacen(
            "\"format_version\":1",
            "\"format_version\":9",
            1,
        );
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(Error::Version {
                found: 9,
                expected: 1
            })
        ));
    }
}
