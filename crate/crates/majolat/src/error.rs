//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty probability vector")]
    EmptyVector,

    #[error("negative entry at index {index}: {value}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("probability mass is {total}, expected 1")]
    MassNotOne { total: f64 },

    #[error("weight total is {total}, expected 2")]
    MassNotTwo { total: f64 },

    #[error("target dimension {target} below current dimension {current}")]
    TargetTooSmall { target: usize, current: usize },

    #[error("degenerate transfer at index {index}: paired entries are equal")]
    DegenerateTransfer { index: usize },

    #[error("alpha = {alpha} out of range (need {need})")]
    AlphaOutOfRange { alpha: f64, need: &'static str },

    #[error("dimension {dim} too small: {need}")]
    DimensionTooSmall { dim: usize, need: &'static str },

    #[error("gave up after {tries} sampling attempts")]
    ExhaustedTries { tries: usize },

    #[error("grid of {count} distributions exceeds cap {cap}")]
    GridTooLarge { count: usize, cap: usize },

    #[error("unknown functional {0:?}")]
    UnknownFunctional(String),

    #[error("unknown inequality id {0:?}")]
    UnknownInequality(String),

    #[error("count must be at least 1")]
    EmptyBatch,

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
