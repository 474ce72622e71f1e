//! Page decomposition: lines (plain and overlapping), words, header-line
//! removal, character boxes, and the descender / conjunct / shadow splits.
//!
//! All splitting operations conserve pixels: the union of the output
//! foreground equals the input foreground, except [`strip_header`] which
//! removes exactly the header rows.

use crate::morphology::{close, StructuringElement};
use crate::raster::{cc_label, h_projection, v_projection, BinaryImage, Connectivity};
use crate::{Error, Result};

/// Tunables for the segmentation stage.
#[derive(Debug, Clone)]
pub struct SegConfig {
    /// Components smaller than this are detached modifiers, removed before
    /// line analysis and re-attached afterwards.
    pub min_component_px: usize,
    /// A row belongs to a header band when its projection reaches this
    /// fraction of the peak.
    pub header_band_factor: f64,
    /// Vertical proportion of the core strip below the header line.
    pub core_ratio: f64,
    /// Vertical proportion of the descender strip below the header line.
    pub descender_ratio: f64,
    /// Boxes taller than `(1 + height_margin) * avg height` are candidates
    /// for descender splitting.
    pub height_margin: f64,
    /// Half-width of the descender waist-search region, as a fraction of the
    /// anchor row index.
    pub descender_region_margin: f64,
    /// Half-width of the conjunct cut-search regions, as a fraction of the
    /// average width.
    pub conjunct_region_margin: f64,
    /// Side of the square element used to repair gaps before shadow
    /// separation.
    pub shadow_se_side: usize,
}

impl Default for SegConfig {
    fn default() -> Self {
        Self {
            min_component_px: 10,
            header_band_factor: 0.9,
            core_ratio: 0.67,
            descender_ratio: 0.33,
            height_margin: 0.15,
            descender_region_margin: 0.10,
            conjunct_region_margin: 0.20,
            shadow_se_side: 3,
        }
    }
}

/// One extracted text line: its pixels on a full-page-width canvas plus the
/// source row span.
#[derive(Debug, Clone)]
pub struct LineImage {
    pub image: BinaryImage,
    pub top: usize,
    pub bottom: usize,
}

/// A word subimage with its located header band and header-free body.
#[derive(Debug, Clone)]
pub struct WordImage {
    pub image: BinaryImage,
    /// Inclusive header row span within `image`, if a header was found.
    pub header: Option<(usize, usize)>,
    /// `image` with the header rows zeroed.
    pub body: BinaryImage,
    /// Top-left of `image` in page coordinates.
    pub origin: (usize, usize),
}

/// Vertical strip a character box belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strip {
    Ascender,
    Core,
    Descender,
}

impl Strip {
    pub fn as_str(self) -> &'static str {
        match self {
            Strip::Ascender => "ascender",
            Strip::Core => "core",
            Strip::Descender => "descender",
        }
    }
}

/// Classification flags attached to a character box.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CharFlags {
    pub needs_descender_split: bool,
    pub composite_2: bool,
    pub composite_3: bool,
    pub shadow_suspect: bool,
    /// Set when a composite could not be split (empty cut region).
    pub unresolved: bool,
}

/// A segmented character subimage with its geometry metadata.
#[derive(Debug, Clone)]
pub struct CharBox {
    pub image: BinaryImage,
    pub strip: Strip,
    pub flags: CharFlags,
    /// Top-left of `image` in page coordinates.
    pub origin: (usize, usize),
}

impl CharBox {
    pub fn new(image: BinaryImage, strip: Strip, origin: (usize, usize)) -> Self {
        Self {
            image,
            strip,
            flags: CharFlags::default(),
            origin,
        }
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    /// Crops to the content bounding box, shifting the origin to match.
    fn cropped(self) -> Option<Self> {
        let bbox = crate::raster::content_bbox(&self.image)?;
        let origin = (self.origin.0 + bbox.top, self.origin.1 + bbox.left);
        Some(Self {
            image: self.image.crop(bbox),
            strip: self.strip,
            flags: self.flags,
            origin,
        })
    }
}

/// Page-level size statistics over core boxes, plus the derived thresholds
/// used by the descender and conjunct splits.
#[derive(Debug, Clone)]
pub struct PageStats {
    pub avg_height: f64,
    pub avg_width: f64,
    /// Boxes strictly taller than this carry a joined lower modifier.
    pub thresh_height: f64,
    /// Width range flagging two-character composites.
    pub conjunct2_range: (f64, f64),
    /// Widths strictly above this flag three-character composites.
    pub conjunct3_min: f64,
    /// Fraction of a flagged box's height where the core strip ends.
    pub anchor_ratio: f64,
    descender_region_margin: f64,
    conjunct_region_margin: f64,
}

/// Splits a deskewed page into lines at blank rows: maximal runs of rows
/// with nonzero horizontal projection, top to bottom.
pub fn segment_lines(page: &BinaryImage) -> Vec<LineImage> {
    let hp = h_projection(page);
    runs(&hp)
        .into_iter()
        .map(|(top, bottom)| {
            let mut image = BinaryImage::zeros(bottom - top + 1, page.width());
            for r in top..=bottom {
                image.row_mut(r - top).copy_from_slice(page.row(r));
            }
            LineImage { image, top, bottom }
        })
        .collect()
}

/// Maximal runs of indices with positive values, as inclusive spans.
fn runs(series: &[u32]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &v) in series.iter().enumerate() {
        match (v > 0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, series.len() - 1));
    }
    out
}

/// Zeroes every 8-connected component with fewer than `min_card` pixels
/// (detached modifiers).
pub fn drop_small_components(page: &BinaryImage, min_card: usize) -> BinaryImage {
    let map = cc_label(page, Connectivity::Eight);
    let mut out = page.clone();
    for comp in map.components() {
        if comp.cardinality() < min_card {
            for &(r, c) in &comp.pixels {
                out.set(r, c, 0);
            }
        }
    }
    out
}

/// Fills the header-band rows (projection within `band_factor` of the peak)
/// across the full image width, fusing each line's words into one component.
pub fn bridge_lines(cleaned: &BinaryImage, band_factor: f64) -> BinaryImage {
    let hp = h_projection(cleaned);
    let hp_max = *hp.iter().max().unwrap_or(&0);
    let mut out = cleaned.clone();
    if hp_max == 0 {
        return out;
    }
    let cutoff = band_factor * hp_max as f64;
    for (r, &v) in hp.iter().enumerate() {
        if v as f64 >= cutoff {
            out.row_mut(r).fill(1);
        }
    }
    out
}

/// Extracts individual lines from a band whose horizontal projection has no
/// zero row between visually distinct lines.
///
/// Detached small components are removed first, the remaining words are
/// fused per line through full-width header bars, and each bar-bearing
/// component is recovered by keeping only its pre-bridge pixels. The pass
/// repeats on whatever is left, so lines of unequal length are also found.
/// Small components are then re-attached to the vertically nearest line.
/// The outputs partition the input foreground exactly.
pub fn split_overlapping_lines(page: &BinaryImage, cfg: &SegConfig) -> Vec<LineImage> {
    let map = cc_label(page, Connectivity::Eight);
    let mut remaining = page.clone();
    let mut smalls = Vec::new();
    for comp in map.components() {
        if comp.cardinality() < cfg.min_component_px {
            smalls.push(comp.clone());
            for &(r, c) in &comp.pixels {
                remaining.set(r, c, 0);
            }
        }
    }

    let mut lines: Vec<Vec<(usize, usize)>> = Vec::new();
    loop {
        let hp = h_projection(&remaining);
        let hp_max = *hp.iter().max().unwrap();
        if hp_max == 0 {
            break;
        }
        let cutoff = cfg.header_band_factor * hp_max as f64;
        let bar_rows: Vec<usize> = (0..remaining.height())
            .filter(|&r| hp[r] as f64 >= cutoff)
            .collect();
        let mut bridged = remaining.clone();
        for &r in &bar_rows {
            bridged.row_mut(r).fill(1);
        }
        let comps = cc_label(&bridged, Connectivity::Eight);
        let mut extracted_any = false;
        for comp in comps.components() {
            let touches_bar = comp
                .pixels
                .iter()
                .any(|&(r, _)| bar_rows.binary_search(&r).is_ok());
            if !touches_bar {
                continue;
            }
            // Keep only pixels that existed before bridging.
            let pixels: Vec<(usize, usize)> = comp
                .pixels
                .iter()
                .copied()
                .filter(|&(r, c)| remaining.get(r, c) == 1)
                .collect();
            if pixels.is_empty() {
                continue;
            }
            for &(r, c) in &pixels {
                remaining.set(r, c, 0);
            }
            lines.push(pixels);
            extracted_any = true;
        }
        if !extracted_any {
            // Bars fell on artificial rows only; promote what is left as one
            // line to guarantee progress.
            let rest: Vec<(usize, usize)> = remaining.foreground().collect();
            for &(r, c) in &rest {
                remaining.set(r, c, 0);
            }
            lines.push(rest);
        }
    }

    // Re-attach the detached small components to the line whose row span
    // contains them, or the vertically nearest one.
    for comp in smalls {
        if lines.is_empty() {
            lines.push(comp.pixels);
            continue;
        }
        let mid = (comp.bbox.top + comp.bbox.bottom) as f64 / 2.0;
        let best = (0..lines.len())
            .min_by(|&a, &b| {
                let da = span_distance(&lines[a], mid);
                let db = span_distance(&lines[b], mid);
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        lines[best].extend(comp.pixels);
    }

    let mut out: Vec<LineImage> = lines
        .into_iter()
        .filter(|px| !px.is_empty())
        .map(|px| {
            let top = px.iter().map(|&(r, _)| r).min().unwrap();
            let bottom = px.iter().map(|&(r, _)| r).max().unwrap();
            let mut image = BinaryImage::zeros(bottom - top + 1, page.width());
            for &(r, c) in &px {
                image.set(r - top, c, 1);
            }
            LineImage { image, top, bottom }
        })
        .collect();
    out.sort_by_key(|l| (l.top, l.bottom));
    out
}

fn span_distance(pixels: &[(usize, usize)], row: f64) -> f64 {
    let top = pixels.iter().map(|&(r, _)| r).min().unwrap() as f64;
    let bottom = pixels.iter().map(|&(r, _)| r).max().unwrap() as f64;
    if row >= top && row <= bottom {
        0.0
    } else if row < top {
        top - row
    } else {
        row - bottom
    }
}

/// Splits a line into words at blank columns, left to right.
pub fn segment_words(line: &LineImage, cfg: &SegConfig) -> Vec<WordImage> {
    let vp = v_projection(&line.image);
    runs(&vp)
        .into_iter()
        .filter_map(|(left, right)| {
            // Tight crop: trim blank rows of this column span.
            let mut top = None;
            let mut bottom = 0;
            for r in 0..line.image.height() {
                if line.image.row(r)[left..=right].iter().any(|&p| p == 1) {
                    top.get_or_insert(r);
                    bottom = r;
                }
            }
            let top = top?;
            let mut image = BinaryImage::zeros(bottom - top + 1, right - left + 1);
            for r in top..=bottom {
                image
                    .row_mut(r - top)
                    .copy_from_slice(&line.image.row(r)[left..=right]);
            }
            let mut word = strip_header(&image, cfg.header_band_factor);
            word.origin = (line.top + top, left);
            Some(word)
        })
        .collect()
}

/// Locates the header line: the maximal contiguous row band around the
/// projection argmax whose values stay within `band_factor` of the peak.
/// When that band covers every row (no dominant row), only the argmax row
/// is taken. The body is the word with the header rows zeroed.
pub fn strip_header(word: &BinaryImage, band_factor: f64) -> WordImage {
    let hp = h_projection(word);
    let hp_max = *hp.iter().max().unwrap();
    if hp_max == 0 {
        return WordImage {
            image: word.clone(),
            header: None,
            body: word.clone(),
            origin: (0, 0),
        };
    }
    let peak = hp.iter().position(|&v| v == hp_max).unwrap();
    let cutoff = band_factor * hp_max as f64;
    let mut start = peak;
    while start > 0 && hp[start - 1] as f64 >= cutoff {
        start -= 1;
    }
    let mut end = peak;
    while end + 1 < hp.len() && hp[end + 1] as f64 >= cutoff {
        end += 1;
    }
    if start == 0 && end == hp.len() - 1 {
        start = peak;
        end = peak;
    }
    let mut body = word.clone();
    for r in start..=end {
        body.row_mut(r).fill(0);
    }
    WordImage {
        image: word.clone(),
        header: Some((start, end)),
        body,
        origin: (0, 0),
    }
}

/// Splits a header-stripped word into character boxes: blank body columns
/// delimit boxes; blank rows inside a box separate the ascender strip from
/// the core. Strips are classified by position relative to the header band.
pub fn split_characters(word: &WordImage) -> Vec<CharBox> {
    let header_top = word.header.map(|(s, _)| s).unwrap_or(0);
    let vp = v_projection(&word.body);
    let mut out = Vec::new();
    for (left, right) in runs(&vp) {
        let hp: Vec<u32> = (0..word.body.height())
            .map(|r| {
                word.body.row(r)[left..=right]
                    .iter()
                    .map(|&p| p as u32)
                    .sum()
            })
            .collect();
        let mut seen_core = false;
        for (top, bottom) in runs(&hp) {
            let mut image = BinaryImage::zeros(bottom - top + 1, right - left + 1);
            for r in top..=bottom {
                image
                    .row_mut(r - top)
                    .copy_from_slice(&word.body.row(r)[left..=right]);
            }
            let strip = if bottom < header_top {
                Strip::Ascender
            } else if !seen_core {
                seen_core = true;
                Strip::Core
            } else {
                Strip::Descender
            };
            let origin = (word.origin.0 + top, word.origin.1 + left);
            if let Some(cropped) = CharBox::new(image, strip, origin).cropped() {
                out.push(cropped);
            }
        }
    }
    out
}

/// Means and thresholds over the core boxes.
pub fn compute_stats(boxes: &[CharBox], cfg: &SegConfig) -> Result<PageStats> {
    let core: Vec<&CharBox> = boxes.iter().filter(|b| b.strip == Strip::Core).collect();
    if core.is_empty() {
        return Err(Error::NoBoxes);
    }
    let n = core.len() as f64;
    let avg_height = core.iter().map(|b| b.height() as f64).sum::<f64>() / n;
    let avg_width = core.iter().map(|b| b.width() as f64).sum::<f64>() / n;
    Ok(PageStats {
        avg_height,
        avg_width,
        thresh_height: (1.0 + cfg.height_margin) * avg_height,
        conjunct2_range: (2.0 * avg_width, 3.0 * avg_width),
        conjunct3_min: 3.0 * avg_width,
        anchor_ratio: cfg.core_ratio / (cfg.core_ratio + cfg.descender_ratio),
        descender_region_margin: cfg.descender_region_margin,
        conjunct_region_margin: cfg.conjunct_region_margin,
    })
}

/// Separates a joined lower modifier from a core character.
///
/// A blank row below the core strip splits directly (the gap case).
/// Otherwise the cut row is the one of minimum ink width inside the search
/// region around the core/descender boundary, ties to the lowest index. The
/// modifier keeps the rows from the cut downwards.
pub fn split_descender(b: &CharBox, stats: &PageStats) -> (CharBox, Option<CharBox>) {
    let h = b.image.height();
    let anchor = ((stats.anchor_ratio * h as f64).round() as usize).clamp(1, h - 1);
    let hp = h_projection(&b.image);

    // Gap case: a blank row in the lower half, closest to the anchor.
    let gap = (h / 2..h)
        .filter(|&r| hp[r] == 0)
        .min_by_key(|&r| (r as isize - anchor as isize).unsigned_abs());
    let seg_row = match gap {
        Some(r) => r,
        None => {
            let margin = ((stats.descender_region_margin * anchor as f64).round() as usize).max(1);
            let lo = anchor.saturating_sub(margin).max(1);
            let hi = (anchor + margin).min(h - 1);
            // Ink width per row; a row with no ink is a free cut.
            let mut best = (i64::MAX, lo);
            for r in lo..=hi {
                let row = b.image.row(r);
                let width = match (
                    row.iter().position(|&p| p == 1),
                    row.iter().rposition(|&p| p == 1),
                ) {
                    (Some(first), Some(last)) => last as i64 - first as i64,
                    _ => -1,
                };
                if width < best.0 {
                    best = (width, r);
                }
            }
            best.1
        }
    };

    let core = CharBox {
        image: crop_rows(&b.image, 0, seg_row),
        strip: Strip::Core,
        flags: CharFlags::default(),
        origin: b.origin,
    }
    .cropped();
    let modifier = CharBox {
        image: crop_rows(&b.image, seg_row, h),
        strip: Strip::Descender,
        flags: CharFlags::default(),
        origin: (b.origin.0 + seg_row, b.origin.1),
    }
    .cropped();
    (core.expect("core half cannot be empty"), modifier)
}

fn crop_rows(img: &BinaryImage, start: usize, end: usize) -> BinaryImage {
    let mut out = BinaryImage::zeros((end - start).max(1), img.width());
    for r in start..end {
        out.row_mut(r - start).copy_from_slice(img.row(r));
    }
    out
}

/// Flags composite candidates by width: two characters when the width falls
/// within twice-to-thrice the average, three characters beyond that.
pub fn flag_composites(mut b: CharBox, stats: &PageStats) -> CharBox {
    if b.strip != Strip::Core {
        return b;
    }
    let w = b.width() as f64;
    if w >= stats.conjunct2_range.0 && w <= stats.conjunct2_range.1 {
        b.flags.composite_2 = true;
        b.flags.shadow_suspect = true;
    } else if w > stats.conjunct3_min {
        b.flags.composite_3 = true;
        b.flags.shadow_suspect = true;
    }
    b
}

/// Cuts a fused conjunct at the column of minimum ink height inside each
/// search region (one region for two-character composites, two for three),
/// ties to the lowest index. Returns the parts left to right.
pub fn split_conjunct(b: &CharBox, stats: &PageStats) -> Result<Vec<CharBox>> {
    let w = b.image.width();
    let mut cuts = Vec::new();
    let regions: &[f64] = if b.flags.composite_3 {
        &[1.0, 2.0]
    } else {
        &[1.0]
    };
    for &mult in regions {
        let center = mult * stats.avg_width;
        let margin = (stats.conjunct_region_margin * stats.avg_width).max(1.0);
        let lo = ((center - margin).round() as isize).clamp(1, w as isize - 1) as usize;
        let hi = ((center + margin).round() as isize).clamp(1, w as isize - 1) as usize;
        if lo > hi {
            return Err(Error::EmptyRegion);
        }
        let mut any_ink = false;
        let mut best = (i64::MAX, lo);
        for c in lo..=hi {
            let mut first = None;
            let mut last = None;
            for r in 0..b.image.height() {
                if b.image.get(r, c) == 1 {
                    first.get_or_insert(r);
                    last = Some(r);
                }
            }
            let height = match (first, last) {
                (Some(f), Some(l)) => {
                    any_ink = true;
                    l as i64 - f as i64
                }
                _ => -1,
            };
            if height < best.0 {
                best = (height, c);
            }
        }
        if !any_ink {
            return Err(Error::EmptyRegion);
        }
        cuts.push(best.1);
    }
    cuts.sort_unstable();
    cuts.dedup();

    let mut bounds = vec![0usize];
    bounds.extend(&cuts);
    bounds.push(w);
    let mut parts = Vec::new();
    for pair in bounds.windows(2) {
        let (left, right) = (pair[0], pair[1]);
        if left >= right {
            continue;
        }
        let mut image = BinaryImage::zeros(b.image.height(), right - left);
        for r in 0..b.image.height() {
            image
                .row_mut(r)
                .copy_from_slice(&b.image.row(r)[left..right]);
        }
        let part = CharBox {
            image,
            strip: Strip::Core,
            flags: CharFlags::default(),
            origin: (b.origin.0, b.origin.1 + left),
        };
        if let Some(p) = part.cropped() {
            parts.push(p);
        }
    }
    Ok(parts)
}

/// Separates shadow characters (overlapping boxes, disjoint pixels) without
/// clipping: small gaps are repaired by closing, each resulting component's
/// support then selects its own pixels from the unclosed input.
pub fn split_shadow(b: &CharBox, se_side: usize) -> Result<Vec<CharBox>> {
    let se = StructuringElement::square(se_side);
    let mut closed = close(&b.image, &se);
    // Closing clamps at the canvas; keep every original pixel in play.
    for (r, c) in b.image.foreground() {
        closed.set(r, c, 1);
    }
    let map = cc_label(&closed, Connectivity::Eight);
    if map.len() < 2 {
        return Err(Error::SingleComponent);
    }
    let mut parts = Vec::new();
    for comp in map.components() {
        let mut image = BinaryImage::zeros(b.image.height(), b.image.width());
        let mut any = false;
        for &(r, c) in &comp.pixels {
            if b.image.get(r, c) == 1 {
                image.set(r, c, 1);
                any = true;
            }
        }
        if !any {
            continue;
        }
        let part = CharBox {
            image,
            strip: Strip::Core,
            flags: CharFlags::default(),
            origin: b.origin,
        };
        parts.push(part.cropped().unwrap());
    }
    parts.sort_by_key(|p| (p.origin.1, p.origin.0));
    Ok(parts)
}

#[cfg(test)]
mod tests;
