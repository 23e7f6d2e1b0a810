//! Semantic-part importance analysis for sparsified sketches.
//!
//! Given vector sketches, human-traced part contours and an epitome (the
//! subset of strokes a sparsified representation keeps), this crate scores
//! how strongly each named part survives in the epitomes of a category and
//! renders the result as tables and word clouds.
//!
//! Module map:
//! - [`model`]: domain types and their invariants
//! - [`dataset`]: on-disk text formats and loading
//! - [`geometry`]: rasterization, containment, boundary matching
//! - [`ordering`]: stroke orderings and prefix epitomes
//! - [`importance`]: per-sketch and per-category scoring
//! - [`render`]: word-cloud layout, SVG and tables
//! - [`pipeline`]: the `analyze` run
//! - [`service`]: HTTP API for the annotation tool
//! - [`synth`]: deterministic synthetic datasets

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod importance;
pub mod model;
pub mod ordering;
pub mod pipeline;
pub mod render;
pub mod service;
pub mod synth;

pub use error::{Error, Result};
