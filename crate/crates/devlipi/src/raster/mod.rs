//! Core image types and the pixel-level operations the pipeline is built on:
//! histogramming, global inverted binarization, projection profiles, rotation,
//! connected-component labeling, content cropping and thinning.
//!
//! Conventions used throughout the crate:
//! - images are row-major with the origin at the top-left pixel;
//! - binary foreground is `1` (text ink after inversion), background `0`;
//! - angles are in degrees, positive = anticlockwise on screen.

mod pnm;

pub use pnm::{read_pbm, read_pgm, write_pbm, write_pgm};

use crate::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Builds an image from row-major intensities. Panics if the buffer
    /// length does not equal `height * width` or either dimension is zero.
    pub fn from_pixels(height: usize, width: usize, pixels: Vec<u8>) -> Self {
        assert!(height >= 1 && width >= 1, "image must be at least 1x1");
        assert_eq!(pixels.len(), height * width, "pixel buffer length mismatch");
        Self {
            height,
            width,
            pixels,
        }
    }

    pub fn filled(height: usize, width: usize, value: u8) -> Self {
        Self::from_pixels(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// Binary raster with foreground `1`, background `0`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn zeros(height: usize, width: usize) -> Self {
        assert!(height >= 1 && width >= 1, "image must be at least 1x1");
        Self {
            height,
            width,
            pixels: vec![0; height * width],
        }
    }

    pub fn ones(height: usize, width: usize) -> Self {
        assert!(height >= 1 && width >= 1, "image must be at least 1x1");
        Self {
            height,
            width,
            pixels: vec![1; height * width],
        }
    }

    /// Builds an image from row-major `{0,1}` values. Panics on length
    /// mismatch or a value outside `{0,1}`.
    pub fn from_pixels(height: usize, width: usize, pixels: Vec<u8>) -> Self {
        assert!(height >= 1 && width >= 1, "image must be at least 1x1");
        assert_eq!(pixels.len(), height * width, "pixel buffer length mismatch");
        assert!(pixels.iter().all(|&p| p <= 1), "binary pixels must be 0 or 1");
        Self {
            height,
            width,
            pixels,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Bounds-checked read; out-of-canvas reads as background.
    #[inline]
    pub fn get_checked(&self, row: isize, col: isize) -> u8 {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            0
        } else {
            self.pixels[row as usize * self.width + col as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        debug_assert!(value <= 1);
        self.pixels[row * self.width + col] = value;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub(crate) fn row_mut(&mut self, row: usize) -> &mut [u8] {
        &mut self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub fn count_foreground(&self) -> usize {
        self.pixels.iter().map(|&p| p as usize).sum()
    }

    /// Iterates over foreground pixel coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == 1)
            .map(move |(i, _)| (i / self.width, i % self.width))
    }

    /// Copies the subimage spanned by `bbox` (inclusive bounds).
    pub fn crop(&self, bbox: BoundingBox) -> BinaryImage {
        let h = bbox.bottom - bbox.top + 1;
        let w = bbox.right - bbox.left + 1;
        let mut out = BinaryImage::zeros(h, w);
        for r in 0..h {
            let src = &self.row(bbox.top + r)[bbox.left..=bbox.right];
            out.row_mut(r).copy_from_slice(src);
        }
        out
    }

    /// Foreground centroid `(row, col)` as reals, if any foreground exists.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let mut n = 0usize;
        let (mut sr, mut sc) = (0.0f64, 0.0f64);
        for (r, c) in self.foreground() {
            n += 1;
            sr += r as f64;
            sc += c as f64;
        }
        if n == 0 {
            None
        } else {
            Some((sr / n as f64, sc / n as f64))
        }
    }
}

/// 256-bin intensity histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
}

impl Histogram {
    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Counts pixels per intensity value.
pub fn histogram(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    Histogram { counts }
}

/// Difference between the dark-half peak count and the bright-half peak
/// count: `max H(i), i in [0,127]` minus `max H(i), i in [128,255]`.
/// May be negative for bright-dominant pages.
pub fn mode_gap(h: &Histogram) -> i64 {
    let dark = *h.counts[..128].iter().max().unwrap() as i64;
    let bright = *h.counts[128..].iter().max().unwrap() as i64;
    dark - bright
}

/// Default threshold rule: midpoint between the dominant dark mode
/// (argmax over bins 0–127) and the dominant bright mode (argmax over
/// bins 128–255). Ties resolve to the lowest bin.
pub fn suggest_threshold(h: &Histogram) -> u8 {
    let dark = argmax(&h.counts[..128]);
    let bright = 128 + argmax(&h.counts[128..]);
    ((dark + bright) / 2) as u8
}

fn argmax(slice: &[u64]) -> usize {
    let mut best = 0usize;
    for (i, &v) in slice.iter().enumerate() {
        if v > slice[best] {
            best = i;
        }
    }
    best
}

/// Global inverted thresholding: dark ink becomes foreground `1`.
/// `out(m,n) = 1` iff `img(m,n) <= t`.
pub fn binarize_invert(img: &GrayImage, t: u8) -> BinaryImage {
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| if p <= t { 1 } else { 0 })
        .collect();
    BinaryImage::from_pixels(img.height(), img.width(), pixels)
}

/// Per-row foreground counts (length = height).
pub fn h_projection(img: &BinaryImage) -> Vec<u32> {
    (0..img.height())
        .map(|r| img.row(r).iter().map(|&p| p as u32).sum())
        .collect()
}

/// Per-column foreground counts (length = width).
pub fn v_projection(img: &BinaryImage) -> Vec<u32> {
    let mut out = vec![0u32; img.width()];
    for r in 0..img.height() {
        for (c, &p) in img.row(r).iter().enumerate() {
            out[c] += p as u32;
        }
    }
    out
}

/// Pixel connectivity for component labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
            Connectivity::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

/// Inclusive bounding box in pixel indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
}

impl BoundingBox {
    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }

    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }

    fn include(&mut self, row: usize, col: usize) {
        self.top = self.top.min(row);
        self.bottom = self.bottom.max(row);
        self.left = self.left.min(col);
        self.right = self.right.max(col);
    }
}

/// One labeled component: pixel list in discovery order plus geometry.
#[derive(Debug, Clone)]
pub struct Component {
    pub id: u32,
    pub pixels: Vec<(usize, usize)>,
    pub bbox: BoundingBox,
}

impl Component {
    pub fn cardinality(&self) -> usize {
        self.pixels.len()
    }
}

/// Per-pixel labels (0 = background) plus per-component pixel lists.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    height: usize,
    width: usize,
    labels: Vec<u32>,
    components: Vec<Component>,
}

impl ComponentMap {
    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

/// Labels maximal connected components of the foreground. Labels are dense
/// from 1 in raster-scan discovery order; pixel lists follow BFS order from
/// the discovery pixel.
pub fn cc_label(img: &BinaryImage, connectivity: Connectivity) -> ComponentMap {
    let (h, w) = (img.height(), img.width());
    let mut labels = vec![0u32; h * w];
    let mut components = Vec::new();
    let offsets = connectivity.offsets();
    let mut queue = std::collections::VecDeque::new();

    for start in 0..h * w {
        if img.pixels()[start] == 0 || labels[start] != 0 {
            continue;
        }
        let id = components.len() as u32 + 1;
        let (sr, sc) = (start / w, start % w);
        let mut comp = Component {
            id,
            pixels: Vec::new(),
            bbox: BoundingBox {
                top: sr,
                bottom: sr,
                left: sc,
                right: sc,
            },
        };
        labels[start] = id;
        queue.push_back((sr, sc));
        while let Some((r, c)) = queue.pop_front() {
            comp.bbox.include(r, c);
            comp.pixels.push((r, c));
            for &(dr, dc) in offsets {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr as usize >= h || nc as usize >= w {
                    continue;
                }
                let idx = nr as usize * w + nc as usize;
                if img.pixels()[idx] == 1 && labels[idx] == 0 {
                    labels[idx] = id;
                    queue.push_back((nr as usize, nc as usize));
                }
            }
        }
        components.push(comp);
    }

    ComponentMap {
        height: h,
        width: w,
        labels,
        components,
    }
}

/// Number of 8-connected components (each contributes one bounding box).
pub fn bbox_count(img: &BinaryImage) -> usize {
    cc_label(img, Connectivity::Eight).len()
}

/// Bounding box of all foreground pixels, if any.
pub fn content_bbox(img: &BinaryImage) -> Option<BoundingBox> {
    let mut bbox: Option<BoundingBox> = None;
    for (r, c) in img.foreground() {
        match bbox.as_mut() {
            None => {
                bbox = Some(BoundingBox {
                    top: r,
                    bottom: r,
                    left: c,
                    right: c,
                })
            }
            Some(b) => b.include(r, c),
        }
    }
    bbox
}

/// Minimal bounding-box subimage containing all foreground.
pub fn crop_to_content(img: &BinaryImage) -> Result<BinaryImage> {
    let bbox = content_bbox(img).ok_or(Error::EmptyImage)?;
    Ok(img.crop(bbox))
}

/// Rotates about the image centre by `angle` degrees (positive =
/// anticlockwise on screen). The canvas grows to hold every source pixel;
/// sampling is nearest-neighbour so the output stays binary. Exact index
/// permutations are used for multiples of 90°.
pub fn rotate(img: &BinaryImage, angle: f64) -> BinaryImage {
    let norm = normalize_angle(angle);
    if norm == 0.0 {
        return img.clone();
    }
    if norm == 90.0 || norm == -90.0 || norm == 180.0 || norm == -180.0 {
        return rotate_right_angle(img, norm);
    }

    let (h, w) = (img.height() as f64, img.width() as f64);
    let rad = norm.to_radians();
    let (sin, cos) = rad.sin_cos();
    let out_w = (w * cos.abs() + h * sin.abs()).ceil() as usize;
    let out_h = (w * sin.abs() + h * cos.abs()).ceil() as usize;
    let mut out = BinaryImage::zeros(out_h.max(1), out_w.max(1));

    let cx = (img.width() as f64 - 1.0) / 2.0;
    let cy = (img.height() as f64 - 1.0) / 2.0;
    let ocx = (out.width() as f64 - 1.0) / 2.0;
    let ocy = (out.height() as f64 - 1.0) / 2.0;

    // Inverse mapping: screen-anticlockwise rotation with row axis down.
    for r in 0..out.height() {
        let v = r as f64 - ocy;
        for c in 0..out.width() {
            let u = c as f64 - ocx;
            let su = u * cos - v * sin;
            let sv = u * sin + v * cos;
            let sc = (su + cx).round();
            let sr = (sv + cy).round();
            if sr >= 0.0 && sc >= 0.0 && (sr as usize) < img.height() && (sc as usize) < img.width()
            {
                if img.get(sr as usize, sc as usize) == 1 {
                    out.set(r, c, 1);
                }
            }
        }
    }
    out
}

fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle % 360.0;
    if a > 180.0 {
        a -= 360.0;
    } else if a < -180.0 {
        a += 360.0;
    }
    a
}

fn rotate_right_angle(img: &BinaryImage, angle: f64) -> BinaryImage {
    let (h, w) = (img.height(), img.width());
    match angle {
        // Anticlockwise quarter turn: out(r, c) = in(c, W-1-r).
        90.0 => {
            let mut out = BinaryImage::zeros(w, h);
            for r in 0..w {
                for c in 0..h {
                    out.set(r, c, img.get(c, w - 1 - r));
                }
            }
            out
        }
        -90.0 => {
            let mut out = BinaryImage::zeros(w, h);
            for r in 0..w {
                for c in 0..h {
                    out.set(r, c, img.get(h - 1 - c, r));
                }
            }
            out
        }
        _ => {
            let mut out = BinaryImage::zeros(h, w);
            for r in 0..h {
                for c in 0..w {
                    out.set(r, c, img.get(h - 1 - r, w - 1 - c));
                }
            }
            out
        }
    }
}

/// Forward map of a point under [`rotate`]'s geometry: returns the position
/// of source point `(row, col)` in the output canvas of `rotate(img, angle)`.
pub fn rotate_point(
    img_h: usize,
    img_w: usize,
    row: f64,
    col: f64,
    angle: f64,
) -> (f64, f64) {
    let norm = normalize_angle(angle);
    let rad = norm.to_radians();
    let (sin, cos) = rad.sin_cos();
    let (h, w) = (img_h as f64, img_w as f64);
    let (out_w, out_h) = if norm == 0.0 {
        (img_w, img_h)
    } else if norm == 90.0 || norm == -90.0 {
        (img_h, img_w)
    } else if norm == 180.0 || norm == -180.0 {
        (img_w, img_h)
    } else {
        (
            (w * cos.abs() + h * sin.abs()).ceil() as usize,
            (w * sin.abs() + h * cos.abs()).ceil() as usize,
        )
    };
    let cx = (w - 1.0) / 2.0;
    let cy = (h - 1.0) / 2.0;
    let ocx = (out_w as f64 - 1.0) / 2.0;
    let ocy = (out_h as f64 - 1.0) / 2.0;
    let u = col - cx;
    let v = row - cy;
    // Forward of the inverse map used by `rotate`.
    let ou = u * cos + v * sin;
    let ov = -u * sin + v * cos;
    (ov + ocy, ou + ocx)
}

/// Thins foreground strokes to unit width while preserving 8-connectivity.
///
/// Sequential border-directional thinning: a pixel is deleted only if it is
/// 8-simple (removal does not change local topology) and not a stroke
/// endpoint, so the component count of the input is preserved.
pub fn skeletonize(img: &BinaryImage) -> BinaryImage {
    let mut out = img.clone();
    let dirs: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
    loop {
        let mut changed = false;
        for &(dr, dc) in &dirs {
            for r in 0..out.height() {
                for c in 0..out.width() {
                    if out.get(r, c) == 0 {
                        continue;
                    }
                    // Border pixel in the current direction.
                    if out.get_checked(r as isize + dr, c as isize + dc) != 0 {
                        continue;
                    }
                    let n = neighborhood(&out, r, c);
                    let count: u8 = n.iter().sum();
                    if count <= 1 {
                        continue; // endpoint or isolated pixel
                    }
                    if is_simple(&n) {
                        out.set(r, c, 0);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return out;
        }
    }
}

/// 8-neighbourhood in clockwise order starting north:
/// `[N, NE, E, SE, S, SW, W, NW]`.
fn neighborhood(img: &BinaryImage, r: usize, c: usize) -> [u8; 8] {
    let (r, c) = (r as isize, c as isize);
    [
        img.get_checked(r - 1, c),
        img.get_checked(r - 1, c + 1),
        img.get_checked(r, c + 1),
        img.get_checked(r + 1, c + 1),
        img.get_checked(r + 1, c),
        img.get_checked(r + 1, c - 1),
        img.get_checked(r, c - 1),
        img.get_checked(r - 1, c - 1),
    ]
}

/// Ring offsets matching [`neighborhood`] order.
const RING: [(isize, isize); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

/// A pixel is 8-simple iff exactly one 8-connected foreground component of
/// its neighbourhood touches it and exactly one 4-connected background
/// component of its neighbourhood touches it 4-adjacently. Deleting a
/// simple pixel cannot change the component structure of the image.
fn is_simple(n: &[u8; 8]) -> bool {
    ring_components(n, 1, true, false) == 1 && ring_components(n, 0, false, true) == 1
}

/// Counts connected components of `value` pixels within the 3x3 ring.
/// Adjacency between ring cells uses their absolute offsets (8- or
/// 4-connectivity); with `require_4adjacent` only components containing a
/// 4-neighbour of the centre (even ring index) are counted.
fn ring_components(n: &[u8; 8], value: u8, eight: bool, require_4adjacent: bool) -> u32 {
    let mut seen = [false; 8];
    let mut count = 0;
    for start in 0..8 {
        if n[start] != value || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut touches_center_4 = start % 2 == 0;
        while let Some(i) = stack.pop() {
            for j in 0..8 {
                if seen[j] || n[j] != value {
                    continue;
                }
                let dr = (RING[i].0 - RING[j].0).abs();
                let dc = (RING[i].1 - RING[j].1).abs();
                let adjacent = if eight {
                    dr <= 1 && dc <= 1
                } else {
                    dr + dc == 1
                };
                if adjacent {
                    seen[j] = true;
                    touches_center_4 |= j % 2 == 0;
                    stack.push(j);
                }
            }
        }
        if !require_4adjacent || touches_center_4 {
            count += 1;
        }
    }
    count
}
