//! Glyph feature extraction: zone pixel counts over a 13-region layout,
//! horizontal/vertical transition and projection series, their statistical
//! moments, and skeleton endpoint features for modifier classification.

use std::fmt::Write as _;
use std::path::Path;

use crate::raster::{
    cc_label, crop_to_content, h_projection, skeletonize, v_projection, BinaryImage, Connectivity,
};
use crate::segmentation::CharBox;
use crate::{Error, Result};

/// Inclusive rectangular region of a zone layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZoneRect {
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
}

impl ZoneRect {
    fn area(&self) -> usize {
        (self.bottom - self.top + 1) * (self.right - self.left + 1)
    }

    fn contains(&self, r: usize, c: usize) -> bool {
        r >= self.top && r <= self.bottom && c >= self.left && c <= self.right
    }
}

pub const ZONE_COUNT: usize = 13;

/// Thirteen rectangular regions tiling a normalized glyph canvas exactly:
/// three across the top strip, a 4x2 grid over the core, two across the
/// descender strip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneLayout {
    canvas_h: usize,
    canvas_w: usize,
    zones: Vec<ZoneRect>,
}

impl ZoneLayout {
    /// The default layout on a 32x32 canvas.
    pub fn standard() -> Self {
        let mut zones = Vec::with_capacity(ZONE_COUNT);
        for &(left, right) in &[(0usize, 10usize), (11, 21), (22, 31)] {
            zones.push(ZoneRect {
                top: 0,
                bottom: 7,
                left,
                right,
            });
        }
        for &(top, bottom) in &[(8usize, 15usize), (16, 23)] {
            for &(left, right) in &[(0usize, 7usize), (8, 15), (16, 23), (24, 31)] {
                zones.push(ZoneRect {
                    top,
                    bottom,
                    left,
                    right,
                });
            }
        }
        for &(left, right) in &[(0usize, 15usize), (16, 31)] {
            zones.push(ZoneRect {
                top: 24,
                bottom: 31,
                left,
                right,
            });
        }
        Self::new(32, 32, zones).expect("standard layout tiles the canvas")
    }

    /// Validates that exactly [`ZONE_COUNT`] pairwise-disjoint regions tile
    /// the canvas.
    pub fn new(canvas_h: usize, canvas_w: usize, zones: Vec<ZoneRect>) -> Result<Self> {
        if zones.len() != ZONE_COUNT {
            return Err(Error::parse(
                "zone layout",
                format!("expected {ZONE_COUNT} zones, got {}", zones.len()),
            ));
        }
        let mut covered = vec![false; canvas_h * canvas_w];
        let mut area = 0usize;
        for z in &zones {
            if z.top > z.bottom || z.left > z.right || z.bottom >= canvas_h || z.right >= canvas_w
            {
                return Err(Error::parse("zone layout", "zone outside canvas"));
            }
            area += z.area();
            for r in z.top..=z.bottom {
                for c in z.left..=z.right {
                    if covered[r * canvas_w + c] {
                        return Err(Error::parse("zone layout", "zones overlap"));
                    }
                    covered[r * canvas_w + c] = true;
                }
            }
        }
        if area != canvas_h * canvas_w {
            return Err(Error::parse("zone layout", "zones do not tile the canvas"));
        }
        Ok(Self {
            canvas_h,
            canvas_w,
            zones,
        })
    }

    pub fn canvas(&self) -> (usize, usize) {
        (self.canvas_h, self.canvas_w)
    }

    pub fn zones(&self) -> &[ZoneRect] {
        &self.zones
    }

    /// Serializes to the layout text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "canvas {} {}", self.canvas_h, self.canvas_w);
        for z in &self.zones {
            let _ = writeln!(out, "zone {} {} {} {}", z.top, z.bottom, z.left, z.right);
        }
        out
    }

    /// Parses the layout text format: a `canvas H W` line followed by one
    /// `zone top bottom left right` line per region (inclusive bounds);
    /// `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut canvas = None;
        let mut zones = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("canvas") => {
                    let h = parse_field(parts.next(), "canvas height")?;
                    let w = parse_field(parts.next(), "canvas width")?;
                    canvas = Some((h, w));
                }
                Some("zone") => {
                    let top = parse_field(parts.next(), "zone top")?;
                    let bottom = parse_field(parts.next(), "zone bottom")?;
                    let left = parse_field(parts.next(), "zone left")?;
                    let right = parse_field(parts.next(), "zone right")?;
                    zones.push(ZoneRect {
                        top,
                        bottom,
                        left,
                        right,
                    });
                }
                Some(other) => {
                    return Err(Error::parse(
                        "zone layout",
                        format!("unknown directive {other:?}"),
                    ))
                }
                None => {}
            }
        }
        let (h, w) = canvas.ok_or_else(|| Error::parse("zone layout", "missing canvas line"))?;
        Self::new(h, w, zones)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_field(field: Option<&str>, what: &str) -> Result<usize> {
    field
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse("zone layout", format!("bad or missing {what}")))
}

/// Thirteen zone foreground counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionVector(pub [u32; ZONE_COUNT]);

impl RegionVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Sixteen series moments: `[HT, VT, HP, VP]` each contributing
/// `(mean, variance, skew, kurtosis)` in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector(pub [f64; 16]);

/// Directional neighbour sums at one skeleton endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndpointNeighbors {
    pub row: usize,
    pub col: usize,
    pub left: u8,
    pub right: u8,
    pub top: u8,
    pub bottom: u8,
}

/// Skeleton endpoint features of a modifier plus its raw component count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointFeatures {
    /// Endpoints in raster order of the skeleton.
    pub endpoints: Vec<EndpointNeighbors>,
    /// 8-connected component count of the unskeletonized modifier.
    pub cc_count: usize,
}

impl EndpointFeatures {
    pub fn endpoint_count(&self) -> usize {
        self.endpoints.len()
    }
}

/// Content-crops a glyph and rescales it to `side x side` with
/// nearest-neighbour sampling, so counts stay comparable across sizes.
pub fn normalize_glyph(b: &CharBox, side: usize) -> Result<BinaryImage> {
    normalize_image(&b.image, side)
}

/// [`normalize_glyph`] on a bare image.
pub fn normalize_image(img: &BinaryImage, side: usize) -> Result<BinaryImage> {
    let cropped = crop_to_content(img).map_err(|_| Error::EmptyGlyph)?;
    let (h, w) = (cropped.height(), cropped.width());
    let mut out = BinaryImage::zeros(side, side);
    for r in 0..side {
        let sr = ((r as f64 + 0.5) * h as f64 / side as f64) as usize;
        for c in 0..side {
            let sc = ((c as f64 + 0.5) * w as f64 / side as f64) as usize;
            out.set(r, c, cropped.get(sr.min(h - 1), sc.min(w - 1)));
        }
    }
    Ok(out)
}

/// Foreground count per layout zone.
pub fn zone_counts(glyph: &BinaryImage, layout: &ZoneLayout) -> Result<RegionVector> {
    if (glyph.height(), glyph.width()) != layout.canvas() {
        return Err(Error::LayoutMismatch {
            want_h: layout.canvas_h,
            want_w: layout.canvas_w,
            got_h: glyph.height(),
            got_w: glyph.width(),
        });
    }
    let mut counts = [0u32; ZONE_COUNT];
    for (r, c) in glyph.foreground() {
        for (i, z) in layout.zones.iter().enumerate() {
            if z.contains(r, c) {
                counts[i] += 1;
                break;
            }
        }
    }
    Ok(RegionVector(counts))
}

/// Foreground-to-background transition counts along rows (`HT`) and columns
/// (`VT`). A `1` in the last position of a row or column has no successor
/// and is not counted.
pub fn transition_counts(glyph: &BinaryImage) -> (Vec<u32>, Vec<u32>) {
    let (h, w) = (glyph.height(), glyph.width());
    let mut ht = vec![0u32; h];
    let mut vt = vec![0u32; w];
    for r in 0..h {
        let row = glyph.row(r);
        for c in 0..w.saturating_sub(1) {
            if row[c] == 1 && row[c + 1] == 0 {
                ht[r] += 1;
            }
        }
    }
    for c in 0..w {
        for r in 0..h.saturating_sub(1) {
            if glyph.get(r, c) == 1 && glyph.get(r + 1, c) == 0 {
                vt[c] += 1;
            }
        }
    }
    (ht, vt)
}

/// Row and column foreground counts of the glyph.
pub fn glyph_projections(glyph: &BinaryImage) -> (Vec<u32>, Vec<u32>) {
    (h_projection(glyph), v_projection(glyph))
}

/// Population mean, variance, skew and excess kurtosis of a count series.
/// Degenerate series (zero variance) have zero skew and kurtosis.
pub fn series_moments(series: &[u32]) -> (f64, f64, f64, f64) {
    assert!(!series.is_empty(), "series must be non-empty");
    let n = series.len() as f64;
    let mean = series.iter().map(|&x| x as f64).sum::<f64>() / n;
    let variance = series
        .iter()
        .map(|&x| (x as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    if variance == 0.0 {
        return (mean, 0.0, 0.0, 0.0);
    }
    let sigma = variance.sqrt();
    let skew = series
        .iter()
        .map(|&x| ((x as f64 - mean) / sigma).powi(3))
        .sum::<f64>()
        / n;
    let kurtosis = series
        .iter()
        .map(|&x| ((x as f64 - mean) / sigma).powi(4))
        .sum::<f64>()
        / n
        - 3.0;
    (mean, variance, skew, kurtosis)
}

/// The sixteen-moment vector of a glyph, ordered `[HT, VT, HP, VP]` by
/// `(mean, variance, skew, kurtosis)`.
pub fn moment_vector(glyph: &BinaryImage) -> MomentVector {
    let (ht, vt) = transition_counts(glyph);
    let (hp, vp) = glyph_projections(glyph);
    let mut out = [0.0f64; 16];
    for (i, series) in [&ht, &vt, &hp, &vp].into_iter().enumerate() {
        let (mean, var, skew, kurt) = series_moments(series);
        out[i * 4] = mean;
        out[i * 4 + 1] = var;
        out[i * 4 + 2] = skew;
        out[i * 4 + 3] = kurt;
    }
    MomentVector(out)
}

/// Skeletonizes a modifier and reports its endpoints (skeleton pixels with a
/// single 8-neighbour) with their directional neighbour sums, plus the
/// component count of the unskeletonized modifier.
pub fn endpoint_features(modifier: &BinaryImage) -> Result<EndpointFeatures> {
    if modifier.count_foreground() == 0 {
        return Err(Error::EmptyModifier);
    }
    let cc_count = cc_label(modifier, Connectivity::Eight).len();
    let skel = skeletonize(modifier);
    let mut endpoints = Vec::new();
    for (r, c) in skel.foreground() {
        let (ri, ci) = (r as isize, c as isize);
        let mut np = 0u8;
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                np += skel.get_checked(ri + dr, ci + dc);
            }
        }
        np -= 1; // the centre pixel itself
        if np != 1 {
            continue;
        }
        let column = |dc: isize| -> u8 { (-1..=1).map(|dr| skel.get_checked(ri + dr, ci + dc)).sum() };
        let row = |dr: isize| -> u8 { (-1..=1).map(|dc| skel.get_checked(ri + dr, ci + dc)).sum() };
        endpoints.push(EndpointNeighbors {
            row: r,
            col: c,
            left: column(-1),
            right: column(1),
            top: row(-1),
            bottom: row(1),
        });
    }
    Ok(EndpointFeatures {
        endpoints,
        cc_count,
    })
}
