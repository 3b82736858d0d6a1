//! Rotational test-time augmentation for classical image classifiers.
//!
//! Each evaluation image is expanded into a group of eight variants (the
//! original, three anticlockwise rotations and the mirror image of all
//! four). A classifier trained on un-augmented features predicts every
//! variant, and the eight predictions are merged by hard (majority) or soft
//! (mean probability) voting.
//!
//! Modules follow the pipeline: [`imaging`] builds the groups,
//! [`descriptors`] turns images into feature vectors, [`classifiers`] fits
//! and queries models, [`voting`] merges group predictions, [`datasets`]
//! handles corpora and sampling, and [`bench`] runs the full experiment grid.

pub mod bench;
pub mod classifiers;
pub mod datasets;
pub mod descriptors;
pub mod error;
pub mod imaging;
pub mod rng;
pub mod voting;

pub use error::{Error, Result};
