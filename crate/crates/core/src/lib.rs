//! Synthetic speech detection from clip-level acoustic statistics.
//!
//! The crate is organised along the processing pipeline:
//!
//! * [`audio`] decodes WAV files, resamples and frames signals.
//! * [`features`] turns a clip into a fixed 48-entry [`FeatureVector`].
//! * [`dataset`] ingests labelled manifests into a [`FeatureTable`], cleans,
//!   summarises and splits it.
//! * [`gbdt`] trains and applies second-order gradient-boosted trees.
//! * [`selection`] runs gain-driven recursive feature elimination.
//! * [`metrics`] produces confusion scores, ROC curves and AUC.
//! * [`config`] holds the run configuration shared by the command-line stages.
//! * [`synth`] renders the synthetic real/fake voice corpus used for testing.

pub mod audio;
pub mod config;
pub mod dataset;
mod error;
pub mod features;
pub mod gbdt;
pub mod metrics;
pub mod selection;
pub mod synth;
mod util;

pub use audio::{AudioClip, FrameMatrix, Window};
pub use dataset::{FeatureTable, Label, Manifest, SplitResult};
pub use error::{Error, Result};
pub use features::{FeatureConfig, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use gbdt::{GbdtModel, Hyperparams, Preset};
pub use metrics::{ConfusionMatrix, EvalReport, RocCurve};
pub use selection::SelectionResult;
pub use util::format_real;
