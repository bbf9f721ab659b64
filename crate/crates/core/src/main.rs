use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};

use backscatter_sybil::detector::LrModel;
use backscatter_sybil::eval::dataset::{dataset_from_signatures, hex};
use backscatter_sybil::eval::experiments::{
    ablation_csv, metrics_csv, sweep_csv, extract_corpus,
};
use backscatter_sybil::eval::{
    ablation_normalization, compare_distance_metrics, cross_validate, judge_windows,
    sweep_profile_size, train_on, ExperimentConfig, LabeledDataset, MetricsReport,
    ScenarioSignatures,
};
use backscatter_sybil::io::{read_scenario_traces, write_scenario_traces, LABELS_FILE};
use backscatter_sybil::sim::{simulate_scenario, ScenarioConfig};
use backscatter_sybil::Result;

/// Backscatter-tag Sybil detection: simulator, detector and experiments.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// TOML config: a scenario for `simulate`, an experiment config otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Folds for cross-validation.
    #[arg(long, global = true, default_value_t = 10)]
    k_folds: usize,
    /// Similarity threshold for flagging a pair.
    #[arg(long, global = true, default_value_t = 0.5)]
    sigma: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate scenarios and write per-identity trace files.
    Simulate {
        /// Scenarios to draw from the default corpus when no config is given.
        #[arg(long, default_value_t = 1)]
        scenarios: usize,
    },
    /// Build a labeled distance dataset from trace directories or a fresh corpus.
    Dataset {
        /// Trace directories written by `simulate`; a corpus is simulated when absent.
        #[arg(long, num_args = 1..)]
        input: Vec<PathBuf>,
    },
    /// Fit the similarity model on a dataset.
    Train {
        #[arg(long)]
        input: PathBuf,
    },
    /// Score a dataset with a model, or cross-validate when no model is given.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// AUROC over tag counts and profile lengths.
    Sweep,
    /// Normalized versus raw signatures, with and without power scaling.
    AblateNorm,
    /// Detection rates per row distance metric.
    CompareMetrics,
}

fn experiment_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.k_folds = cli.k_folds;
    cfg.sigma = cli.sigma;
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    LabeledDataset::read_csv(BufReader::new(File::open(path)?))
}

fn simulate(cli: &Cli, scenarios: usize) -> Result<()> {
    let configs = match &cli.config {
        Some(path) => {
            let mut cfg = ScenarioConfig::load(path)?;
            cfg.seed = cli.seed;
            vec![cfg]
        }
        None => {
            let corpus = ExperimentConfig::default().corpus;
            corpus.generate(cli.seed)?.into_iter().take(scenarios).collect()
        }
    };
    for (i, cfg) in configs.iter().enumerate() {
        let dir = cli.out.join(format!("scenario_{i:03}"));
        let traces = simulate_scenario(cfg, cfg.seed)?;
        write_scenario_traces(&dir, &traces)?;
        write_text(&dir.join("scenario.toml"), &cfg.to_toml_string()?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DatasetSummary {
    samples: usize,
    positives: usize,
    positive_fraction: f64,
    profile_len: usize,
    scenario_seeds: Vec<u64>,
    config_hash: String,
    content_hash: String,
}

fn dataset(cli: &Cli, input: &[PathBuf]) -> Result<()> {
    let cfg = experiment_config(cli)?;
    let opts = cfg.dataset_options();
    let ds = if input.is_empty() {
        extract_corpus(&cfg.corpus, cli.seed, cfg.smoothing_window)?.dataset(&opts)?
    } else {
        let mut hasher = Sha256::new();
        let mut corpus = Vec::with_capacity(input.len());
        for dir in input {
            hasher.update(fs::read(dir.join(LABELS_FILE))?);
            let traces = read_scenario_traces(dir)?;
            corpus.push(ScenarioSignatures::from_traces(&traces, cfg.smoothing_window));
        }
        dataset_from_signatures(&corpus, &opts, hex(&hasher.finalize()))?
    };
    fs::create_dir_all(&cli.out)?;
    let path = cli.out.join("dataset.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    ds.write_csv(&mut w)?;
    w.flush()?;
    info!("wrote {}", path.display());
    write_json(
        &cli.out.join("dataset.json"),
        &DatasetSummary {
            samples: ds.len(),
            positives: ds.positives(),
            positive_fraction: ds.positive_fraction(),
            profile_len: ds.profile_len,
            scenario_seeds: ds.scenario_seeds.clone(),
            config_hash: ds.config_hash.clone(),
            content_hash: ds.content_hash(),
        },
    )
}

fn train(cli: &Cli, input: &Path) -> Result<()> {
    let cfg = experiment_config(cli)?;
    let model = train_on(&read_dataset(input)?, &cfg.training)?;
    fs::create_dir_all(&cli.out)?;
    write_text(&cli.out.join("model.json"), &(model.to_json()? + "\n"))
}

fn write_report(out: &Path, report: &MetricsReport) -> Result<()> {
    write_text(&out.join("metrics.json"), &(report.to_json()? + "\n"))?;
    write_text(&out.join("roc.csv"), &report.roc_csv())
}

fn evaluate(cli: &Cli, input: &Path, model: Option<&Path>) -> Result<()> {
    let cfg = experiment_config(cli)?;
    let ds = read_dataset(input)?;
    fs::create_dir_all(&cli.out)?;
    match model {
        Some(path) => {
            let model = LrModel::from_json(&fs::read_to_string(path)?)?;
            let (verdicts, records) = judge_windows(&model, &ds, cli.sigma)?;
            write_report(&cli.out, &MetricsReport::from_records(&records)?)?;
            write_json(&cli.out.join("verdicts.json"), &verdicts)
        }
        None => {
            let cv = cross_validate(&ds, cli.k_folds, cli.seed, cli.sigma, &cfg.training)?;
            write_report(&cli.out, &cv.report)?;
            write_json(&cli.out.join("fold_models.json"), &cv.fold_models)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate { scenarios } => simulate(cli, *scenarios),
        Command::Dataset { input } => dataset(cli, input),
        Command::Train { input } => train(cli, input),
        Command::Evaluate { input, model } => evaluate(cli, input, model.as_deref()),
        Command::Sweep => {
            let cells = sweep_profile_size(&experiment_config(cli)?, cli.seed)?;
            fs::create_dir_all(&cli.out)?;
            write_text(&cli.out.join("sweep.csv"), &sweep_csv(&cells))
        }
        Command::AblateNorm => {
            let rows = ablation_normalization(&experiment_config(cli)?, cli.seed)?;
            fs::create_dir_all(&cli.out)?;
            write_text(&cli.out.join("ablation.csv"), &ablation_csv(&rows))
        }
        Command::CompareMetrics => {
            let rows = compare_distance_metrics(&experiment_config(cli)?, cli.seed)?;
            fs::create_dir_all(&cli.out)?;
            write_text(&cli.out.join("metrics.csv"), &metrics_csv(&rows))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
