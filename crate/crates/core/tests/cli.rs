mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use backscatter_sybil::detector::LrModel;
use backscatter_sybil::eval::LabeledDataset;
use common::tiny_config;

fn run(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_backscatter-sybil"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_dataset_train_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let config = root.join("experiment.toml");
    fs::write(&config, toml::to_string(&tiny_config()).unwrap()).unwrap();

    let traces = root.join("traces");
    run(&["--seed", "3", "--out", s(&traces), "simulate", "--scenarios", "2"]);
    let scenario = traces.join("scenario_000");
    let labels: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(scenario.join("labels.json")).unwrap()).unwrap();
    let first = labels["identities"][0]["file"].as_str().unwrap();
    let csv = fs::read_to_string(scenario.join(first)).unwrap();
    assert_eq!(csv.lines().next(), Some("t_s,sample,tag_index"));
    assert!(labels["labels"].as_object().unwrap().len() >= 4);

    let data = root.join("data");
    run(&[
        "--config", s(&config), "--out", s(&data), "dataset", "--input",
        s(&scenario), s(&traces.join("scenario_001")),
    ]);
    let ds = LabeledDataset::read_csv(fs::File::open(data.join("dataset.csv")).unwrap()).unwrap();
    assert!(ds.positives() > 0);

    let dataset_csv = data.join("dataset.csv");
    run(&["--out", s(&data), "train", "--input", s(&dataset_csv)]);
    let model_text = fs::read_to_string(data.join("model.json")).unwrap();
    let raw: serde_json::Value = serde_json::from_str(&model_text).unwrap();
    assert_eq!(raw["L"], 10);
    assert!(raw["weights"].is_array() && raw["bias"].is_number());
    LrModel::from_json(&model_text).unwrap();

    let model = data.join("model.json");
    run(&["--out", s(&data), "evaluate", "--input", s(&dataset_csv), "--model", s(&model)]);
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data.join("metrics.json")).unwrap()).unwrap();
    for key in ["tpr", "fpr", "accuracy", "auroc", "n_fake", "n_legit"] {
        assert!(metrics.get(key).is_some(), "{key}");
    }
    let roc = fs::read_to_string(data.join("roc.csv")).unwrap();
    assert_eq!(roc.lines().count(), 1 + 202);
    assert!(data.join("verdicts.json").exists());
}

#[test]
fn scenario_config_file_drives_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config().corpus.scenario(0, 77).unwrap();
    let path = dir.path().join("scenario.toml");
    fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    let out = dir.path().join("out");
    run(&["--config", s(&path), "--seed", "77", "--out", s(&out), "simulate"]);
    let back = fs::read_to_string(out.join("scenario_000/scenario.toml")).unwrap();
    assert_eq!(back, cfg.to_toml_string().unwrap());
}

#[test]
fn bad_input_fails_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_backscatter-sybil"))
        .args(["train", "--input", "/nonexistent/dataset.csv"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
