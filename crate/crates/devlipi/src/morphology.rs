//! Binary morphology: structuring elements and dilate/erode/close.
//!
//! Dilation output: `{ p + s : p in foreground, s in mask }` clipped to the
//! canvas. Erosion output: `{ p : for all s in mask, p + s is foreground }`
//! with out-of-canvas treated as background, so content touching the border
//! can erode away; properties such as closing extensivity therefore hold for
//! content at least one structuring-element radius away from the border.

use crate::raster::BinaryImage;

/// Mask of `(drow, dcol)` offsets around a centre anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(isize, isize)>,
}

impl StructuringElement {
    /// Square of `side x side` pixels anchored at the centre.
    /// For even sides the extra row/column goes to the positive side.
    pub fn square(side: usize) -> Self {
        assert!(side >= 1, "structuring element must be non-empty");
        let lo = -((side as isize - 1) / 2);
        let hi = side as isize / 2;
        let mut offsets = Vec::with_capacity(side * side);
        for dr in lo..=hi {
            for dc in lo..=hi {
                offsets.push((dr, dc));
            }
        }
        Self { offsets }
    }

    /// Bresenham digitization of a centred segment spanning `length` pixels
    /// of Euclidean length at `angle` degrees (positive = anticlockwise on
    /// screen), symmetric about the anchor.
    pub fn line(length: usize, angle: f64) -> Self {
        assert!(length >= 1, "structuring element must be non-empty");
        let rad = angle.to_radians();
        let half = (length as f64 - 1.0) / 2.0;
        // Screen coordinates: columns grow right, rows grow down, so an
        // anticlockwise angle has a negative row slope.
        let (ec, er) = (half * rad.cos(), -half * rad.sin());
        let mut offsets = bresenham(
            (-er).round() as isize,
            (-ec).round() as isize,
            er.round() as isize,
            ec.round() as isize,
        );
        offsets.sort();
        offsets.dedup();
        Self { offsets }
    }

    /// Builds a mask from explicit offsets (deduplicated, order normalized).
    pub fn from_offsets(mut offsets: Vec<(isize, isize)>) -> Self {
        assert!(!offsets.is_empty(), "structuring element must be non-empty");
        offsets.sort();
        offsets.dedup();
        Self { offsets }
    }

    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    /// Mask reflected through the anchor.
    pub fn reflected(&self) -> Self {
        Self::from_offsets(self.offsets.iter().map(|&(r, c)| (-r, -c)).collect())
    }

    pub fn contains_anchor(&self) -> bool {
        self.offsets.binary_search(&(0, 0)).is_ok()
    }
}

fn bresenham(r0: isize, c0: isize, r1: isize, c1: isize) -> Vec<(isize, isize)> {
    let mut points = Vec::new();
    let (dr, dc) = ((r1 - r0).abs(), (c1 - c0).abs());
    let (sr, sc) = ((r1 - r0).signum(), (c1 - c0).signum());
    let (mut r, mut c) = (r0, c0);
    let mut err = dc - dr;
    loop {
        points.push((r, c));
        if r == r1 && c == c1 {
            break;
        }
        let e2 = 2 * err;
        if e2 > -dr {
            err -= dr;
            c += sc;
        }
        if e2 < dc {
            err += dc;
            r += sr;
        }
    }
    points
}

/// Minkowski dilation clipped to the canvas.
pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (h, w) = (img.height() as isize, img.width() as isize);
    let mut out = BinaryImage::zeros(img.height(), img.width());
    for &(dr, dc) in se.offsets() {
        // out[r + dr][c + dc] |= img[r][c] over the valid row/column window,
        // done with contiguous row slices so the inner loop vectorizes.
        let r_lo = (-dr).max(0);
        let r_hi = (h - dr).min(h);
        let c_lo = (-dc).max(0);
        let c_hi = (w - dc).min(w);
        if r_lo >= r_hi || c_lo >= c_hi {
            continue;
        }
        for r in r_lo..r_hi {
            let src = &img.row(r as usize)[c_lo as usize..c_hi as usize];
            let dst_row = out.row_mut((r + dr) as usize);
            let dst = &mut dst_row[(c_lo + dc) as usize..(c_hi + dc) as usize];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d |= s;
            }
        }
    }
    out
}

/// Morphological erosion; out-of-canvas counts as background.
pub fn erode(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (h, w) = (img.height() as isize, img.width() as isize);
    let mut out = BinaryImage::ones(img.height(), img.width());
    for &(dr, dc) in se.offsets() {
        // out[r][c] &= img[r + dr][c + dc]; positions whose probe falls off
        // the canvas are cleared.
        for r in 0..h {
            let pr = r + dr;
            let dst_row = out.row_mut(r as usize);
            if pr < 0 || pr >= h {
                dst_row.fill(0);
                continue;
            }
            let c_lo = (-dc).max(0) as usize;
            let c_hi = (w - dc).min(w).max(0) as usize;
            dst_row[..c_lo].fill(0);
            dst_row[c_hi..].fill(0);
            if c_lo >= c_hi {
                continue;
            }
            let src_full = img.row(pr as usize);
            let src = &src_full[(c_lo as isize + dc) as usize..(c_hi as isize + dc) as usize];
            let dst = &mut dst_row[c_lo..c_hi];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d &= s;
            }
        }
    }
    out
}

/// Closing: dilation followed by erosion with the same element.
pub fn close(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    erode(&dilate(img, se), se)
}
