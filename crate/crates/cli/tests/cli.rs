use std::path::Path;
use std::process::{Command, Output};

use bevtraj::model::{count_parameters, Checkpoint};
use bevtraj::scenegen::{load_dataset, ScenarioKind};
use bevtraj::train::{baseline_persistence, build_samples, split_dataset};

fn bevtraj(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bevtraj"))
        .args(["--log", "warn"])
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run bevtraj")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = bevtraj(args, dir);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], dir: &Path, code: i32) -> String {
    let out = bevtraj(args, dir);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stderr).unwrap()
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn small_dataset(dir: &Path) {
    ok(
        &[
            "generate",
            "--sequences",
            "20",
            "--seed",
            "5",
            "--out",
            "data.jsonl",
        ],
        dir,
    );
}

#[test]
fn generate_preset_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "generate",
            "--level",
            "1",
            "--seed",
            "7",
            "--out",
            "a.jsonl",
            "--feature-size",
            "8",
        ],
        d,
    );
    assert_eq!(
        load_dataset(&d.join("a.jsonl")).unwrap().sequences.len(),
        1000
    );
    ok(
        &[
            "generate",
            "--level",
            "1",
            "--seed",
            "7",
            "--out",
            "b.jsonl",
            "--feature-size",
            "8",
        ],
        d,
    );
    let ma = manifest(&d.join("a.jsonl.manifest.json"));
    let mb = manifest(&d.join("b.jsonl.manifest.json"));
    assert_eq!(ma["outputs"][0]["sha256"], mb["outputs"][0]["sha256"]);
    assert_eq!(ma["status"], "ok");
    assert_eq!(ma["config"]["n_sequences"], 1000);
}

#[test]
fn generate_rejects_short_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let err = fails(
        &["generate", "--frames", "3", "--out", "x.jsonl"],
        dir.path(),
        2,
    );
    assert!(err.contains("T + H"), "{err}");
}

#[test]
fn generate_rejects_bad_level() {
    let dir = tempfile::tempdir().unwrap();
    let err = fails(
        &["generate", "--level", "3", "--out", "x.jsonl"],
        dir.path(),
        2,
    );
    assert!(err.contains("--level"), "{err}");
}

#[test]
fn missing_dataset_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    fails(
        &["train", "--data", "nope.jsonl", "--out", "m.json"],
        dir.path(),
        3,
    );
}

#[test]
fn config_file_overrides_defaults_and_flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("run.toml"),
        "[generate]\nn_sequences = 11\nfeature_size = 12\nseed = 9\n",
    )
    .unwrap();
    ok(&["--config", "run.toml", "generate", "--out", "a.jsonl"], d);
    let a = load_dataset(&d.join("a.jsonl")).unwrap();
    assert_eq!((a.sequences.len(), a.header.feature_size), (11, 12));
    assert_eq!(a.sequences[0].meta.seed, 9);
    ok(
        &[
            "--config",
            "run.toml",
            "generate",
            "--out",
            "b.jsonl",
            "--sequences",
            "10",
        ],
        d,
    );
    assert_eq!(
        load_dataset(&d.join("b.jsonl")).unwrap().sequences.len(),
        10
    );

    std::fs::write(d.join("bad.toml"), "[model]\nhidden = 3\n").unwrap();
    let err = fails(
        &[
            "--config", "bad.toml", "train", "--data", "a.jsonl", "--out", "m.json",
        ],
        d,
        2,
    );
    assert!(err.contains("model.hidden"), "{err}");
}

#[test]
fn train_evaluate_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_dataset(d);
    let out = ok(
        &[
            "--threads",
            "2",
            "train",
            "--data",
            "data.jsonl",
            "--out",
            "m.json",
            "--epochs",
            "2",
            "--dump-graphs",
            "g.jsonl",
        ],
        d,
    );
    let ckpt = Checkpoint::load(&d.join("m.json")).unwrap();
    let params: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("parameters:"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert_eq!(params, count_parameters(ckpt.model_config()));
    let val = out
        .lines()
        .find_map(|l| l.strip_prefix("validation MSE:"))
        .unwrap()
        .trim()
        .to_string();
    assert!(ckpt.history.len() <= 2);
    assert!(
        std::fs::read_to_string(d.join("g.jsonl"))
            .unwrap()
            .lines()
            .count()
            >= 20 * 16
    );
    let m = manifest(&d.join("m.json.manifest.json"));
    assert_eq!(m["inputs"][0]["path"], "data.jsonl");
    assert!(m["outputs"].as_array().unwrap().len() >= 3);

    let eval = ok(
        &[
            "evaluate",
            "--data",
            "data.jsonl",
            "--ckpt",
            "m.json",
            "--split",
            "val",
        ],
        d,
    );
    assert_eq!(
        eval.lines()
            .find_map(|l| l.strip_prefix("model MSE:"))
            .unwrap()
            .trim(),
        val
    );

    ok(&["evaluate", "--data", "data.jsonl", "--ckpt", "m.json"], d);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("m.json.test.eval.json")).unwrap())
            .unwrap();
    assert_eq!(report["model"]["mse_per_step"].as_array().unwrap().len(), 5);
    let data = load_dataset(&d.join("data.jsonl")).unwrap();
    let (_, _, test) = split_dataset(
        &data.sequences,
        ckpt.train_config.seed,
        ckpt.train_config.split,
    )
    .unwrap();
    let samples = build_samples(&test, ckpt.model_config()).unwrap().samples;
    let base = baseline_persistence(&samples).unwrap();
    assert_eq!(report["baseline"], serde_json::to_value(&base).unwrap());

    let seq = data.sequences[0].sequence_id.to_string();
    ok(
        &[
            "plot",
            "--data",
            "data.jsonl",
            "--ckpt",
            "m.json",
            "--sequence",
            &seq,
            "--frame",
            "9",
            "--out",
            "p.svg",
        ],
        d,
    );
    let svg = std::fs::read_to_string(d.join("p.svg")).unwrap();
    assert!(svg.contains(r#"id="start""#) && svg.contains(r#"fill="blue""#));
    assert!(svg.contains(r#"<polyline id="prediction""#) && svg.contains(r#"stroke="red""#));
    assert!(svg.contains(r#"<polyline id="truth""#) && svg.contains(r#"stroke="blue""#));
    assert!(svg.contains("<line "));
    let csv = std::fs::read_to_string(d.join("p.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);

    ok(
        &[
            "predict",
            "--data",
            "data.jsonl",
            "--ckpt",
            "m.json",
            "--sequence",
            &seq,
            "--frame",
            "7",
            "--out",
            "q.csv",
        ],
        d,
    );
    assert_eq!(
        std::fs::read_to_string(d.join("q.csv"))
            .unwrap()
            .lines()
            .count(),
        7
    );

    let err = fails(
        &[
            "plot",
            "--data",
            "data.jsonl",
            "--ckpt",
            "m.json",
            "--sequence",
            &seq,
            "--frame",
            "11",
            "--out",
            "x.svg",
        ],
        d,
        2,
    );
    assert!(err.contains("--frame"), "{err}");
    let err = fails(
        &[
            "plot",
            "--data",
            "data.jsonl",
            "--ckpt",
            "m.json",
            "--sequence",
            "9999",
            "--frame",
            "9",
            "--out",
            "x.svg",
        ],
        d,
        2,
    );
    assert!(err.contains("--sequence"), "{err}");

    ok(
        &[
            "generate",
            "--sequences",
            "12",
            "--feature-size",
            "9",
            "--out",
            "other.jsonl",
        ],
        d,
    );
    let err = fails(
        &["evaluate", "--data", "other.jsonl", "--ckpt", "m.json"],
        d,
        2,
    );
    assert!(err.contains("feature_size"), "{err}");
}

#[test]
fn search_writes_one_record_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_dataset(d);
    std::fs::write(
        d.join("s.toml"),
        "[search]\nepochs_per_trial = 1\ngcn_hidden = [4]\nlstm_hidden = [4]\n",
    )
    .unwrap();
    ok(
        &[
            "--config",
            "s.toml",
            "train",
            "--data",
            "data.jsonl",
            "--out",
            "m.json",
            "--search",
            "3",
            "--epochs",
            "1",
        ],
        d,
    );
    let log = std::fs::read_to_string(d.join("m.json.trials.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 3);
    for line in log.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(rec["val_mse"].is_number());
        assert!(rec["train"]["lr"].is_number());
    }
}

#[test]
fn baseline_plot_overlays_truth_on_constant_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_dataset(d);
    let data = load_dataset(&d.join("data.jsonl")).unwrap();
    let seq = data
        .sequences
        .iter()
        .find(|s| s.meta.scenario_kind == ScenarioKind::Straight)
        .expect("a straight sequence");
    let id = seq.sequence_id.to_string();
    ok(
        &[
            "plot",
            "--data",
            "data.jsonl",
            "--baseline",
            "--sequence",
            &id,
            "--frame",
            "8",
            "--out",
            "b.svg",
        ],
        d,
    );
    let csv = std::fs::read_to_string(d.join("b.csv")).unwrap();
    let mut max_dev: f64 = 0.0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        max_dev = max_dev.max((v[0] - v[2]).abs()).max((v[1] - v[3]).abs());
    }
    assert_eq!(max_dev, 0.0, "{csv}");
}
