//! Dataset construction, cross-validation and experiment drivers.

pub mod dataset;
pub mod evaluate;
pub mod experiments;
pub mod kfold;
pub mod metrics;

pub use dataset::{
    generate_dataset, DatasetOptions, DatasetSample, LabeledDataset, ScenarioSignatures,
};
pub use evaluate::{
    cross_validate, cross_validate_transfer, evaluate, judge_windows, robot_records, train_on, CvOutcome, WindowVerdict,
};
pub use experiments::{
    ablation_normalization, compare_distance_metrics, sweep_profile_size, ExperimentConfig,
};
pub use kfold::{kfold_split, Fold};
pub use metrics::{mann_whitney_auc, MetricsReport, RobotRecord};
