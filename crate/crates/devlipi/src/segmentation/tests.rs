use super::*;
use crate::raster::tests::random_binary;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn abs_pixels(b: &CharBox) -> Vec<(usize, usize)> {
    let mut px: Vec<(usize, usize)> = b
        .image
        .foreground()
        .map(|(r, c)| (r + b.origin.0, c + b.origin.1))
        .collect();
    px.sort_unstable();
    px
}

fn fill(img: &mut BinaryImage, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) {
    for r in rows {
        for c in cols.clone() {
            img.set(r, c, 1);
        }
    }
}

/// Two genuinely overlapping lines: the first line's descender and the
/// second line's ascender share rows (no blank row between the lines) while
/// staying pixel-disjoint and clear of each other's headers.
fn overlapping_lines_fixture() -> (BinaryImage, Vec<(usize, usize)>) {
    let mut page = BinaryImage::zeros(40, 64);
    // Line 1: header rows 0..3, three glyph blocks, descender to row 17
    // (clear of line 2's header so the lines stay pixel-disjoint).
    fill(&mut page, 0..3, 4..60);
    for &c0 in &[6usize, 20, 34] {
        fill(&mut page, 3..14, c0..c0 + 10);
    }
    fill(&mut page, 14..18, 8..12);
    // Line 2: ascender rows 14..20 touching its header rows 20..23.
    fill(&mut page, 14..20, 46..50);
    fill(&mut page, 20..23, 4..60);
    for &c0 in &[6usize, 20, 34] {
        fill(&mut page, 23..35, c0..c0 + 10);
    }
    (page, vec![(0, 17), (14, 34)])
}

fn three_overlapping_lines_fixture() -> BinaryImage {
    let mut page = BinaryImage::zeros(62, 64);
    for k in 0..3usize {
        let top = k * 21;
        fill(&mut page, top..top + 3, 4..60);
        for &c0 in &[6usize, 20, 34] {
            fill(&mut page, top + 3..top + 14, c0..c0 + 10);
        }
        if k < 2 {
            // Descender ending short of the next line's header.
            fill(&mut page, top + 14..top + 18, 8..12);
            // Next line's ascender rising to touch its own header.
            fill(&mut page, top + 14..top + 21, 46..50);
        }
    }
    page
}

#[test]
fn segment_lines_finds_separated_bands() {
    let mut page = BinaryImage::zeros(30, 20);
    fill(&mut page, 2..8, 3..17);
    fill(&mut page, 14..22, 3..17);
    let lines = segment_lines(&page);
    assert_eq!(lines.len(), 2);
    assert_eq!((lines[0].top, lines[0].bottom), (2, 7));
    assert_eq!((lines[1].top, lines[1].bottom), (14, 21));
}

#[test]
fn segment_lines_blank_page_is_empty() {
    assert!(segment_lines(&BinaryImage::zeros(10, 10)).is_empty());
}

#[test]
fn segment_lines_spans_match_construction() {
    let mut page = BinaryImage::zeros(100, 40);
    let spans = [(5usize, 12usize), (20, 31), (40, 44), (60, 83)];
    for &(a, b) in &spans {
        fill(&mut page, a..b + 1, 2..38);
    }
    let lines = segment_lines(&page);
    assert_eq!(lines.len(), 4);
    for (line, &(a, b)) in lines.iter().zip(&spans) {
        assert_eq!((line.top, line.bottom), (a, b));
    }
}

#[test]
fn drop_small_removes_dot_keeps_boundary() {
    let mut page = BinaryImage::zeros(20, 20);
    fill(&mut page, 2..4, 2..4); // 4 px, dropped
    fill(&mut page, 10..12, 10..15); // 10 px, kept (strict <)
    let out = drop_small_components(&page, 10);
    assert_eq!(out.count_foreground(), 10);
    assert_eq!(out.get(2, 2), 0);
    assert_eq!(out.get(10, 10), 1);
}

#[test]
fn drop_small_matches_filter_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let page = random_binary(&mut rng, 48, 48, 0.2);
    let out = drop_small_components(&page, 10);
    let map = cc_label(&page, Connectivity::Eight);
    let mut oracle = BinaryImage::zeros(48, 48);
    for comp in map.components() {
        if comp.cardinality() >= 10 {
            for &(r, c) in &comp.pixels {
                oracle.set(r, c, 1);
            }
        }
    }
    assert_eq!(out, oracle);
}

#[test]
fn bridge_fuses_each_line_into_one_component() {
    let (page, _) = overlapping_lines_fixture();
    let cleaned = drop_small_components(&page, 10);
    let bridged = bridge_lines(&cleaned, 0.9);
    assert_eq!(cc_label(&bridged, Connectivity::Eight).len(), 2);

    let three = three_overlapping_lines_fixture();
    let bridged3 = bridge_lines(&drop_small_components(&three, 10), 0.9);
    assert_eq!(cc_label(&bridged3, Connectivity::Eight).len(), 3);
}

#[test]
fn bridge_single_word_stays_one_component() {
    let mut word = BinaryImage::zeros(20, 30);
    fill(&mut word, 0..3, 2..28);
    fill(&mut word, 3..15, 4..12);
    fill(&mut word, 3..15, 16..26);
    let bridged = bridge_lines(&word, 0.9);
    assert_eq!(cc_label(&bridged, Connectivity::Eight).len(), 1);
}

#[test]
fn split_overlapping_recovers_intact_lines() {
    let (page, spans) = overlapping_lines_fixture();
    let lines = split_overlapping_lines(&page, &SegConfig::default());
    assert_eq!(lines.len(), 2);
    for (line, &(top, bottom)) in lines.iter().zip(&spans) {
        assert_eq!((line.top, line.bottom), (top, bottom));
    }
    // The descender belongs to line 1, the ascender to line 2.
    assert_eq!(lines[0].image.get(16 - lines[0].top, 9), 1);
    assert_eq!(lines[1].image.get(19 - lines[1].top, 47), 1);
}

#[test]
fn split_overlapping_partitions_foreground_exactly() {
    let page = three_overlapping_lines_fixture();
    let lines = split_overlapping_lines(&page, &SegConfig::default());
    assert_eq!(lines.len(), 3);
    let mut all: Vec<(usize, usize)> = Vec::new();
    for line in &lines {
        for (r, c) in line.image.foreground() {
            all.push((r + line.top, c));
        }
    }
    all.sort_unstable();
    let before_dedup = all.len();
    all.dedup();
    assert_eq!(all.len(), before_dedup, "lines share pixels");
    let mut expected: Vec<(usize, usize)> = page.foreground().collect();
    expected.sort_unstable();
    assert_eq!(all, expected, "union of lines is not the page foreground");
}

#[test]
fn split_overlapping_agrees_with_plain_segmentation() {
    let mut page = BinaryImage::zeros(50, 64);
    fill(&mut page, 2..5, 4..60);
    fill(&mut page, 5..16, 6..16);
    fill(&mut page, 5..16, 30..44);
    fill(&mut page, 30..33, 4..60);
    fill(&mut page, 33..44, 6..16);
    let plain = segment_lines(&page);
    let split = split_overlapping_lines(&page, &SegConfig::default());
    assert_eq!(plain.len(), split.len());
    for (a, b) in plain.iter().zip(&split) {
        assert_eq!((a.top, a.bottom), (b.top, b.bottom));
        assert_eq!(a.image, b.image);
    }
}

#[test]
fn reattaches_small_detached_modifiers() {
    let (mut page, _) = overlapping_lines_fixture();
    // A 4-px dot above line 1's first glyph (detached anusvara-like mark,
    // clear of the header bar rows).
    page.set(4, 62, 1);
    page.set(4, 63, 1);
    page.set(5, 62, 1);
    page.set(5, 63, 1);
    let lines = split_overlapping_lines(&page, &SegConfig::default());
    assert_eq!(lines.len(), 2);
    let total: usize = lines.iter().map(|l| l.image.count_foreground()).sum();
    assert_eq!(total, page.count_foreground());
    assert_eq!(lines[0].image.get(4 - lines[0].top, 62), 1);
}

#[test]
fn segment_words_splits_at_blank_columns() {
    let mut line = BinaryImage::zeros(16, 40);
    fill(&mut line, 0..3, 2..16);
    fill(&mut line, 3..12, 4..14);
    fill(&mut line, 0..3, 22..38);
    fill(&mut line, 3..12, 24..36);
    let line = LineImage {
        image: line,
        top: 10,
        bottom: 25,
    };
    let words = segment_words(&line, &SegConfig::default());
    assert_eq!(words.len(), 2);
    assert_eq!(words[0].origin, (10, 2));
    assert_eq!(words[1].origin, (10, 22));

    let mut single = BinaryImage::zeros(10, 10);
    fill(&mut single, 2..8, 1..9);
    let line = LineImage {
        image: single,
        top: 0,
        bottom: 9,
    };
    assert_eq!(segment_words(&line, &SegConfig::default()).len(), 1);
}

#[test]
fn strip_header_removes_top_bar() {
    let mut word = BinaryImage::zeros(20, 30);
    fill(&mut word, 1..4, 0..30); // solid bar
    fill(&mut word, 4..18, 3..10);
    fill(&mut word, 4..18, 14..24);
    let out = strip_header(&word, 0.9);
    assert_eq!(out.header, Some((1, 3)));
    for r in 1..4 {
        assert!(out.body.row(r).iter().all(|&p| p == 0));
    }
    // Nothing else was removed.
    let removed: usize = (1..4).map(|r| word.row(r).iter().map(|&p| p as usize).sum::<usize>()).sum();
    assert_eq!(
        out.body.count_foreground(),
        word.count_foreground() - removed
    );
}

#[test]
fn strip_header_degenerate_band_takes_single_row() {
    // Flat projection: a solid blob has no dominant row.
    let mut word = BinaryImage::zeros(6, 8);
    fill(&mut word, 0..6, 1..7);
    let out = strip_header(&word, 0.9);
    assert_eq!(out.header, Some((0, 0)));
    assert_eq!(
        out.body.count_foreground(),
        word.count_foreground() - 6
    );
}

#[test]
fn strip_header_band_matches_construction() {
    let mut word = BinaryImage::zeros(24, 33);
    fill(&mut word, 5..8, 0..33);
    fill(&mut word, 8..20, 2..10);
    fill(&mut word, 8..22, 13..20);
    fill(&mut word, 8..19, 24..31);
    let out = strip_header(&word, 0.9);
    assert_eq!(out.header, Some((5, 7)));
}

#[test]
fn split_characters_boxes_and_strips() {
    // Word: header bar, two core glyphs below it, one ascender above it.
    let mut word = BinaryImage::zeros(26, 34);
    fill(&mut word, 6..9, 0..34); // header rows 6..9
    fill(&mut word, 9..22, 2..12); // core glyph 1
    fill(&mut word, 9..22, 18..30); // core glyph 2
    fill(&mut word, 0..6, 20..24); // ascender attached above header
    let stripped = strip_header(&word, 0.9);
    assert_eq!(stripped.header, Some((6, 8)));
    let boxes = split_characters(&stripped);
    assert_eq!(boxes.len(), 3);
    assert_eq!(boxes[0].strip, Strip::Core);
    assert_eq!(boxes[1].strip, Strip::Ascender);
    assert_eq!(boxes[2].strip, Strip::Core);
    assert_eq!(boxes[0].origin, (9, 2));
    assert_eq!(boxes[1].origin, (0, 20));
}

#[test]
fn split_characters_counts_generated_glyphs() {
    let mut word = BinaryImage::zeros(20, 62);
    fill(&mut word, 2..5, 0..62);
    for k in 0..5usize {
        let c0 = 2 + k * 12;
        fill(&mut word, 5..16, c0..c0 + 8);
    }
    let stripped = strip_header(&word, 0.9);
    let boxes = split_characters(&stripped);
    assert_eq!(boxes.len(), 5);
    assert!(boxes.iter().all(|b| b.strip == Strip::Core));
    // Left-to-right ordering.
    for pair in boxes.windows(2) {
        assert!(pair[0].origin.1 < pair[1].origin.1);
    }
}

fn core_box(h: usize, w: usize) -> CharBox {
    CharBox::new(BinaryImage::ones(h, w), Strip::Core, (0, 0))
}

#[test]
fn stats_width_thresholds() {
    let boxes = vec![core_box(24, 12), core_box(24, 12)];
    let stats = compute_stats(&boxes, &SegConfig::default()).unwrap();
    assert_eq!(stats.avg_width, 12.0);
    assert_eq!(stats.conjunct2_range, (24.0, 36.0));
    assert_eq!(stats.conjunct3_min, 36.0);
}

#[test]
fn stats_identical_boxes_give_their_dims() {
    let boxes = vec![core_box(18, 9); 5];
    let stats = compute_stats(&boxes, &SegConfig::default()).unwrap();
    assert_eq!(stats.avg_height, 18.0);
    assert_eq!(stats.avg_width, 9.0);
}

#[test]
fn stats_match_summation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let dims: Vec<(usize, usize)> = (0..17)
        .map(|_| (rng.gen_range(10..40), rng.gen_range(5..30)))
        .collect();
    let boxes: Vec<CharBox> = dims.iter().map(|&(h, w)| core_box(h, w)).collect();
    let stats = compute_stats(&boxes, &SegConfig::default()).unwrap();
    let sh: usize = dims.iter().map(|d| d.0).sum();
    let sw: usize = dims.iter().map(|d| d.1).sum();
    assert!((stats.avg_height - sh as f64 / 17.0).abs() < 1e-12);
    assert!((stats.avg_width - sw as f64 / 17.0).abs() < 1e-12);
}

#[test]
fn stats_empty_is_error() {
    assert!(matches!(
        compute_stats(&[], &SegConfig::default()),
        Err(Error::NoBoxes)
    ));
}

fn default_stats() -> PageStats {
    compute_stats(&[core_box(20, 12)], &SegConfig::default()).unwrap()
}

#[test]
fn descender_gap_case_splits_at_blank_row() {
    let mut img = BinaryImage::zeros(30, 14);
    fill(&mut img, 0..18, 2..12); // core
    fill(&mut img, 21..30, 4..10); // detached matra, gap rows 18..21
    let b = CharBox::new(img.clone(), Strip::Core, (5, 7));
    let (core, modifier) = split_descender(&b, &default_stats());
    let modifier = modifier.unwrap();
    assert_eq!(core.image.height(), 18);
    assert!(modifier.origin.0 >= 5 + 18);
    // Pixel conservation.
    let mut all = abs_pixels(&core);
    all.extend(abs_pixels(&modifier));
    all.sort_unstable();
    assert_eq!(all, abs_pixels(&b));
}

#[test]
fn descender_waist_cut_matches_scan_oracle() {
    // Joined modifier: widths taper to a unique waist near the anchor.
    let h = 30usize;
    let mut img = BinaryImage::zeros(h, 24);
    for r in 0..h {
        let (lo, hi) = match r {
            18 => (6, 18),
            19 => (8, 16),
            20 => (9, 15),
            21 => (11, 13),
            22 => (9, 15),
            _ => (2, 22),
        };
        fill(&mut img, r..r + 1, lo..hi);
    }
    let stats = default_stats();
    let b = CharBox::new(img.clone(), Strip::Core, (0, 0));
    let (core, modifier) = split_descender(&b, &stats);

    // Exhaustive oracle over the search region.
    let anchor = ((stats.anchor_ratio * h as f64).round() as usize).clamp(1, h - 1);
    let margin = ((0.10 * anchor as f64).round() as usize).max(1);
    let mut best = (i64::MAX, 0usize);
    for r in anchor - margin..=anchor + margin {
        let row = img.row(r);
        let first = row.iter().position(|&p| p == 1).unwrap() as i64;
        let last = row.iter().rposition(|&p| p == 1).unwrap() as i64;
        if last - first < best.0 {
            best = (last - first, r);
        }
    }
    assert_eq!(best.1, 21, "fixture waist must sit in the region");
    assert_eq!(core.image.height(), best.1);
    let modifier = modifier.unwrap();
    let mut all = abs_pixels(&core);
    all.extend(abs_pixels(&modifier));
    all.sort_unstable();
    assert_eq!(all, abs_pixels(&b));
}

#[test]
fn composite_flags_follow_width_rules() {
    let stats = default_stats(); // avg width 12
    let b26 = flag_composites(core_box(20, 26), &stats);
    assert!(b26.flags.composite_2 && !b26.flags.composite_3);
    let b40 = flag_composites(core_box(20, 40), &stats);
    assert!(b40.flags.composite_3 && !b40.flags.composite_2);
    let b12 = flag_composites(core_box(20, 12), &stats);
    assert!(!b12.flags.composite_2 && !b12.flags.composite_3);
    // Boundary: exactly twice and exactly thrice the average.
    assert!(flag_composites(core_box(20, 24), &stats).flags.composite_2);
    assert!(flag_composites(core_box(20, 36), &stats).flags.composite_2);

    // Monotone: every width in [26, 36] is also flagged.
    for w in 26..=36 {
        let b = flag_composites(core_box(20, w), &stats);
        assert!(b.flags.composite_2, "width {w} lost the flag");
    }
}

#[test]
fn conjunct_cut_at_bridge_column() {
    let stats = default_stats(); // avg width 12, region cols 10..=14
    let mut img = BinaryImage::zeros(20, 26);
    fill(&mut img, 0..20, 0..11); // left block
    fill(&mut img, 0..20, 14..26); // right block
    fill(&mut img, 9..10, 11..14); // 1-px bridge through col 12
    let mut b = CharBox::new(img.clone(), Strip::Core, (3, 40));
    b.flags.composite_2 = true;
    let parts = split_conjunct(&b, &stats).unwrap();
    assert_eq!(parts.len(), 2);
    // The cut lands on the min-height column inside the region: cols 11..=13
    // hold only the bridge (height 0); lowest index wins, so col 11.
    assert_eq!(parts[1].origin.1, 40 + 11);
    let mut all = abs_pixels(&parts[0]);
    all.extend(abs_pixels(&parts[1]));
    all.sort_unstable();
    assert_eq!(all, abs_pixels(&b));
}

#[test]
fn conjunct_symmetric_halves_cut_at_midline() {
    let stats = default_stats();
    // Width 25, mirror-symmetric heights with the unique minimum at col 12.
    let mut img = BinaryImage::zeros(20, 25);
    for c in 0..25usize {
        let d = (c as i64 - 12).unsigned_abs() as usize;
        let half = (2 + d).min(10);
        fill(&mut img, 10 - half..10 + half, c..c + 1);
    }
    let mut b = CharBox::new(img, Strip::Core, (0, 0));
    b.flags.composite_2 = true;
    let parts = split_conjunct(&b, &stats).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[1].origin.1, 12);
}

#[test]
fn conjunct_three_way_split() {
    let stats = default_stats(); // regions near 12 and 24
    let mut img = BinaryImage::zeros(20, 38);
    fill(&mut img, 0..20, 0..11);
    fill(&mut img, 0..20, 14..23);
    fill(&mut img, 0..20, 26..38);
    fill(&mut img, 9..10, 11..14);
    fill(&mut img, 9..10, 23..26);
    let mut b = CharBox::new(img.clone(), Strip::Core, (0, 0));
    b.flags.composite_3 = true;
    let parts = split_conjunct(&b, &stats).unwrap();
    assert_eq!(parts.len(), 3);
    let mut all = Vec::new();
    for p in &parts {
        all.extend(abs_pixels(p));
    }
    all.sort_unstable();
    assert_eq!(all, abs_pixels(&b));
}

#[test]
fn conjunct_cut_matches_exhaustive_oracle() {
    let stats = default_stats();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..20 {
        // Random blobby composite spanning the full width.
        let mut img = BinaryImage::zeros(22, 26);
        for c in 0..26usize {
            let top = rng.gen_range(0..8);
            let bottom = rng.gen_range(14..22);
            fill(&mut img, top..bottom, c..c + 1);
        }
        let mut b = CharBox::new(img.clone(), Strip::Core, (0, 0));
        b.flags.composite_2 = true;
        let parts = split_conjunct(&b, &stats).unwrap();

        let mut best = (i64::MAX, 0usize);
        for c in 10..=14usize {
            let mut first = None;
            let mut last = None;
            for r in 0..22 {
                if img.get(r, c) == 1 {
                    first.get_or_insert(r);
                    last = Some(r);
                }
            }
            let height = last.unwrap() as i64 - first.unwrap() as i64;
            if height < best.0 {
                best = (height, c);
            }
        }
        assert_eq!(parts[1].origin.1, best.1);
    }
}

fn shadow_fixture() -> (BinaryImage, Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut img = BinaryImage::zeros(24, 22);
    // Character A: vertical bar with a foot, drawn in two pieces separated
    // by a 2-px internal gap that closing must repair.
    fill(&mut img, 0..15, 2..6);
    fill(&mut img, 17..21, 2..19); // foot, gap rows 15..17
    // Character B: block nested inside A's bounding box, pixel-disjoint.
    fill(&mut img, 0..13, 10..14);
    let mut a_px = Vec::new();
    let mut b_px = Vec::new();
    for (r, c) in img.foreground() {
        if (2..6).contains(&c) || r >= 17 {
            a_px.push((r, c));
        } else {
            b_px.push((r, c));
        }
    }
    (img, a_px, b_px)
}

#[test]
fn shadow_split_keeps_constituents_intact() {
    let (img, mut a_px, mut b_px) = shadow_fixture();
    let b = CharBox::new(img.clone(), Strip::Core, (0, 0));
    let parts = split_shadow(&b, 3).unwrap();
    assert_eq!(parts.len(), 2);
    a_px.sort_unstable();
    b_px.sort_unstable();
    let got_a = abs_pixels(&parts[0]);
    let got_b = abs_pixels(&parts[1]);
    // Exact set equality with the construction, no clipped pixels.
    assert_eq!(got_a, a_px);
    assert_eq!(got_b, b_px);
    // Each constituent closes into a single component.
    for p in &parts {
        let closed = close(&p.image, &StructuringElement::square(3));
        let mut union = closed.clone();
        for (r, c) in p.image.foreground() {
            union.set(r, c, 1);
        }
        assert_eq!(cc_label(&union, Connectivity::Eight).len(), 1);
    }
}

#[test]
fn shadow_split_on_fused_box_is_single_component() {
    let mut img = BinaryImage::zeros(20, 26);
    fill(&mut img, 0..20, 0..26);
    let b = CharBox::new(img, Strip::Core, (0, 0));
    assert!(matches!(split_shadow(&b, 3), Err(Error::SingleComponent)));
}

#[test]
fn shadow_outputs_partition_input() {
    let (img, _, _) = shadow_fixture();
    let b = CharBox::new(img.clone(), Strip::Core, (4, 9));
    let parts = split_shadow(&b, 3).unwrap();
    let mut all = Vec::new();
    for p in &parts {
        all.extend(abs_pixels(p));
    }
    all.sort_unstable();
    let before = all.len();
    all.dedup();
    assert_eq!(all.len(), before);
    assert_eq!(all, abs_pixels(&b));
}
