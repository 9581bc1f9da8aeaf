//! Incremental domain-embedding DGA detector.
//!
//! DNS query logs become per-client time-window documents; a streaming
//! skip-gram model with reservoir-sampled negatives learns a vector per
//! domain token; an online logistic regression scores tokens as benign
//! or DGA. Batches of new logs extend the model in a single pass
//! without revisiting old data.
//!
//! The numeric core is generic over the stored scalar ([`Scalar`]):
//! `f32` is the production width used by the model file, `f64` backs
//! high-precision oracle tests. The aliases below pin the default.

pub mod classify;
pub mod datagen;
pub mod embed;
pub mod error;
pub mod eval;
pub mod negsample;
pub mod persist;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod scalar;
pub mod vocab;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Production embedding model (single-precision rows).
pub type EmbeddingModel = embed::EmbeddingModel<f32>;
/// Production tail classifier.
pub type LogRegModel = classify::LogRegModel<f32>;
/// A token's embedding at production precision.
pub type DomainVector = embed::DomainVector<f32>;
