//! Similarity estimation and Sybil verdicts.

pub mod logistic;
pub mod verdict;

pub use logistic::{
    compute_class_weights, log_likelihood_gradient, predict_similarity, sigmoid, train_mwle,
    weighted_log_likelihood, weighted_samples, LrModel, TrainingConfig, TrainingSample,
};
pub use verdict::{detect_sybil, similarity_matrix, SimilarityMatrix, Verdict, DEFAULT_SIGMA};
