//! Training-free subset selection for dataset distillation.
//!
//! Given per-item feature embeddings grouped by class, the crate selects a
//! small representative subset per class (the per-class budget, `vpc`) and
//! evaluates the distilled subset against baselines with a repeatable
//! nearest-centroid harness.
//!
//! The numerical core ([`linalg`], [`birch`], [`objectives`], [`eval`]) is
//! generic over [`Scalar`], implemented for `f32` and `f64`. The aliases at
//! the crate root fix the scalar for the common cases; the CLI computes in
//! `f64` on top of `f32` embedding files.

pub mod birch;
pub mod cli;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod io;
pub mod kmeans;
pub mod linalg;
pub mod objectives;
pub mod rng;
pub mod scalar;
pub mod selection;

pub use error::{Error, FormatError, Result};
pub use rng::{derive_stream, RngStream};
pub use scalar::Scalar;

pub type Vector64 = linalg::Vector<f64>;
pub type Vector32 = linalg::Vector<f32>;
pub type PcaModel64 = linalg::PcaModel<f64>;
pub type PcaModel32 = linalg::PcaModel<f32>;
pub type ClusteringFeature64 = birch::ClusteringFeature<f64>;
pub type CfTree64 = birch::CfTree<f64>;
pub type EmbeddingSet64 = dataset::EmbeddingSet<f64>;
pub type EmbeddingSet32 = dataset::EmbeddingSet<f32>;
pub type KernelParams64 = objectives::KernelParams<f64>;
pub type CentroidModel64 = eval::CentroidModel<f64>;
