//! Toolkit for modelling undergraduate attrition from STEM fields using
//! registrar-style transcript data.
//!
//! The crate is organized around the stages of the analysis pipeline:
//!
//! - [`registrar`] — core data model (students, transcripts, majors, degrees),
//!   cohort selection and graduation labelling.
//! - [`synth`] — seeded generator of registrar-shaped datasets with planted
//!   ground truth, so everything downstream is testable at desk scale.
//! - [`features`] — first-year feature engineering: grade normalization,
//!   score imputation, ZIP-derived features, and the dense feature matrix.
//! - [`learners`] — attrition classifiers (logistic regression, random
//!   forests, gradient-boosted trees, ada-boosted logistic regression),
//!   train/test splitting, cross-validated tuning, and evaluation metrics.
//! - [`affinity`] — the hidden-state STEM-affinity model: per-quarter
//!   posterior P(STEM) via forward-backward smoothing, transition fitting,
//!   switch detection, and trajectory aggregation.
//! - [`report`] — machine-readable tables, plot-ready point files, and
//!   static SVG renderings.
//! - [`pipeline`] — declarative run configuration and the subcommand
//!   orchestration used by the `attrition-lab` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod affinity;
pub mod error;
pub mod features;
pub mod io;
pub mod learners;
pub mod pipeline;
pub mod registrar;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
