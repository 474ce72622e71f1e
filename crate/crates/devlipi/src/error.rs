//! Crate error type.

use thiserror::Error;

/// Errors surfaced by the recognition pipeline and its stages.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation that requires foreground pixels was given a blank image.
    #[error("image has no foreground pixels")]
    EmptyImage,

    /// A glyph box was empty after cropping.
    #[error("glyph has no foreground pixels")]
    EmptyGlyph,

    /// A modifier box was empty.
    #[error("modifier has no foreground pixels")]
    EmptyModifier,

    /// No text line could be segmented where one was required.
    #[error("no text line found")]
    EmptyLine,

    /// The structuring-element angle sweep exhausted 180° without
    /// satisfying the bounding stop condition.
    #[error("skew range bounding exhausted the angle sweep")]
    RangeNotFound,

    /// A glyph's dimensions do not match the zone layout canvas.
    #[error("glyph is {got_h}x{got_w} but zone layout expects {want_h}x{want_w}")]
    LayoutMismatch {
        want_h: usize,
        want_w: usize,
        got_h: usize,
        got_w: usize,
    },

    /// Statistics were requested over an empty box list.
    #[error("no character boxes to compute statistics over")]
    NoBoxes,

    /// A conjunct segmentation region contained no foreground columns.
    #[error("segmentation region contains no foreground")]
    EmptyRegion,

    /// Shadow separation found a single connected component: the box is a
    /// true conjunct and the caller should fall back to the waist cut.
    #[error("box is a single component, not shadow characters")]
    SingleComponent,

    /// Classification was attempted against an empty template library.
    #[error("template library is empty")]
    EmptyLibrary,

    /// No modifier rule matched; the caller renders an underscore.
    #[error("modifier not recognized by any rule")]
    UnrecognizedModifier,

    /// A recognized label has no transliteration entry.
    #[error("no transliteration entry for label {0:?}")]
    UnknownLabel(String),

    /// A template label was empty or malformed.
    #[error("bad template label: {0}")]
    BadLabel(String),

    /// Library glyphs disagree about normalization dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Ground-truth and prediction manifests cover different pages.
    #[error("manifests are not aligned: {0}")]
    MisalignedManifests(String),

    /// Malformed input file (PNM, layout, table, manifest or config).
    #[error("parse error in {what}: {detail}")]
    Parse { what: String, detail: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            detail: detail.into(),
        }
    }
}
