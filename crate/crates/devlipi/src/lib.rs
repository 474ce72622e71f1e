//! Devanagari document image recognition and IAST romanization.
//!
//! The crate turns a scanned Devanagari page into roman (IAST) text through a
//! staged pipeline:
//!
//! 1. [`raster`] — image buffers, histogramming, global binarization,
//!    projection profiles, rotation, connected components, thinning, PNM I/O.
//! 2. [`morphology`] — binary dilate/erode/close with square and oriented-line
//!    structuring elements.
//! 3. [`skew`] — full-range (−180°..180°) skew estimation: morphological
//!    bounding of the candidate angle range followed by a short projection
//!    sweep, plus upside-down (flip) detection.
//! 4. [`segmentation`] — lines (including overlapping lines), words, header
//!    line removal, character boxes, descender/conjunct/shadow splitting.
//! 5. [`features`] — zone pixel counts, transition and projection series,
//!    their statistical moments, and skeleton endpoint features.
//! 6. [`recognition`] — two-phase nearest-neighbour classification against a
//!    glyph template library with rule-based disambiguation.
//! 7. [`translit`] — Devanagari label → IAST mapping and document rendering.
//! 8. [`pipeline`] — end-to-end orchestration, evaluation metrics, the
//!    synthetic page generator and the skew benchmark.
//!
//! Each capability has a runnable demo under `examples/`; start with
//! `end_to_end`:
//!
//! ```bash
//! cargo run --release -p devlipi --example end_to_end
//! ```

pub mod error;
pub mod features;
pub mod morphology;
pub mod pipeline;
pub mod raster;
pub mod recognition;
pub mod segmentation;
pub mod skew;
pub mod translit;

pub use error::Error;
pub use raster::{BinaryImage, BoundingBox, ComponentMap, Connectivity, GrayImage, Histogram};

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
