//! Precision and recall for distributions.
//!
//! The [`measures`] module computes the exact curve between two discrete
//! distributions. [`estimator`] approximates it from samples with a linear
//! classifier ensemble, and [`clustering`] provides the k-means histogram
//! baseline. [`roc`] and [`synthetic`] cover the ROC and mode-collapse views
//! and the benchmark generators; [`io`] holds the file formats.

pub mod cli;
pub mod clustering;
pub mod curve;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod estimator;
pub mod io;
pub mod measures;
pub mod roc;
pub mod synthetic;

pub use curve::{default_lambda_grid, LambdaGrid, PrCurve, PrPoint, DEFAULT_RESOLUTION};
pub use data::{LabeledTrainSet, PairedDataset, SampleSet};
pub use ensemble::{EnsembleModel, TrainingConfig};
pub use error::{Error, Result};
pub use estimator::{estimate_pr_curve, estimate_prd, Estimate, ScoredTestSet};
pub use measures::{exact_pr_curve, prd_membership, DiscreteDistribution};
