use super::*;
use crate::raster::rotate;

fn fill(img: &mut BinaryImage, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) {
    for r in rows {
        for c in cols.clone() {
            img.set(r, c, 1);
        }
    }
}

/// Upright multi-line page: header bar plus word blocks per line. The
/// inter-line gap must exceed the closing element so lines stay separate
/// blobs.
fn text_page(lines: usize) -> BinaryImage {
    let line_height = 40usize;
    let width = 240usize;
    let mut page = BinaryImage::zeros(lines * line_height + 20, width);
    for i in 0..lines {
        let top = 10 + i * line_height;
        fill(&mut page, top..top + 3, 10..width - 10);
        for &(c0, c1) in &[(14usize, 60usize), (70, 130), (140, 200), (206, 226)] {
            fill(&mut page, top + 3..top + 16, c0..c1);
        }
    }
    page
}

#[test]
fn probe_reports_tilt_direction() {
    let page = text_page(3);
    let cfg = SkewConfig::default();
    let se = StructuringElement::square(cfg.se_square_side);

    let tilted = rotate(&page, 10.0);
    let closed = crop_to_content(&close(&tilted, &se)).unwrap();
    assert_eq!(
        probe_direction(&closed, cfg.probe_angle),
        SkewDirection::Anticlockwise
    );

    let tilted = rotate(&page, -10.0);
    let closed = crop_to_content(&close(&tilted, &se)).unwrap();
    assert_eq!(
        probe_direction(&closed, cfg.probe_angle),
        SkewDirection::Clockwise
    );
}

#[test]
fn bound_range_parallel_start_takes_low_of_one() {
    // Two lines tilted by exactly alpha: the first line element orientation
    // is parallel to the text, so the count starts above one.
    let cfg = SkewConfig::default();
    let page = text_page(2);
    let tilted = rotate(&page, cfg.alpha);
    let closed = crop_to_content(&close(
        &tilted,
        &StructuringElement::square(cfg.se_square_side),
    ))
    .unwrap();
    let (lo, hi) = bound_range(&closed, SkewDirection::Anticlockwise, &cfg).unwrap();
    assert_eq!(lo, 1.0);
    assert!(hi > cfg.alpha && hi <= 180.0);
}

#[test]
fn bound_range_brackets_a_large_tilt() {
    let cfg = SkewConfig::default();
    let page = text_page(3);
    let tilted = rotate(&page, 46.0);
    let closed = crop_to_content(&close(
        &tilted,
        &StructuringElement::square(cfg.se_square_side),
    ))
    .unwrap();
    let (lo, hi) = bound_range(&closed, SkewDirection::Anticlockwise, &cfg).unwrap();
    assert!(lo < 46.0 && 46.0 < hi, "bracket [{lo}, {hi}] misses 46");
}

#[test]
fn single_line_page_falls_back_to_fixed_window() {
    let mut page = BinaryImage::zeros(60, 240);
    fill(&mut page, 20..23, 10..230);
    for &(c0, c1) in &[(14usize, 80usize), (90, 150), (160, 226)] {
        fill(&mut page, 23..36, c0..c1);
    }
    let tilted = rotate(&page, 7.0);
    let est = estimate_skew(&tilted, &SkewConfig::default()).unwrap();
    assert!(est.range_degenerate);
    assert_eq!(est.range, (-15.0, 15.0));
    assert!(angle_error(est.theta_skew, 7.0) <= 2.0, "got {}", est.theta_skew);
}

#[test]
fn horizontal_page_estimates_zero() {
    let page = text_page(3);
    let est = estimate_skew(&page, &SkewConfig::default()).unwrap();
    assert!(
        est.theta_skew.abs() <= 1.0,
        "horizontal page estimated at {}",
        est.theta_skew
    );
}

#[test]
fn recovers_tilts_across_the_full_circle() {
    let cfg = SkewConfig::default();
    let page = text_page(3);
    for &angle in &[-170.0f64, -46.0, -12.0, 9.0, 33.0, 88.0, 151.0] {
        let tilted = rotate(&page, angle);
        let (_, est) = deskew(&tilted, &cfg).unwrap();
        let err = angle_error(est.effective_theta(), angle);
        assert!(
            err <= 2.0,
            "tilt {angle}: recovered {} (err {err:.2})",
            est.effective_theta()
        );
    }
}

#[test]
fn second_pass_is_a_fixed_point() {
    let cfg = SkewConfig::default();
    let tilted = rotate(&text_page(3), 33.0);
    let (corrected, _) = deskew(&tilted, &cfg).unwrap();
    let est2 = estimate_skew(&corrected, &cfg).unwrap();
    assert!(
        est2.theta_skew.abs() <= cfg.range_step,
        "second pass drifted to {}",
        est2.theta_skew
    );
}

#[test]
fn bounded_search_needs_few_rotations() {
    let cfg = SkewConfig::default();
    let tilted = rotate(&text_page(3), -46.0);
    let est = estimate_skew(&tilted, &cfg).unwrap();
    // Probes plus one bounded sweep; far below the naive 360.
    assert!(
        est.rotations_evaluated <= 40,
        "used {} rotations",
        est.rotations_evaluated
    );
}

#[test]
fn flip_detection_on_header_position() {
    // Header band in the top quarter: upright.
    let mut line = BinaryImage::zeros(40, 60);
    for &c0 in &[5usize, 15, 25, 35, 45] {
        fill(&mut line, 0..40, c0..c0 + 2);
    }
    fill(&mut line, 10..13, 0..60);
    assert!(!detect_flip(&line).unwrap());
    // Mirror: band in the bottom quarter.
    let upside_down = rotate(&line, 180.0);
    assert!(detect_flip(&upside_down).unwrap());

    let mut low_band = BinaryImage::zeros(40, 60);
    for &c0 in &[5usize, 15, 25, 35, 45] {
        fill(&mut low_band, 0..40, c0..c0 + 2);
    }
    fill(&mut low_band, 30..33, 0..60);
    assert!(detect_flip(&low_band).unwrap());
}

#[test]
fn upright_text_line_is_not_flipped() {
    let page = text_page(1);
    assert!(!detect_flip(&page).unwrap());
    assert!(detect_flip(&rotate(&page, 180.0)).unwrap());
}

#[test]
fn flip_on_blank_page_is_an_error() {
    let page = BinaryImage::zeros(10, 10);
    assert!(matches!(detect_flip(&page), Err(Error::EmptyLine)));
}

#[test]
fn naive_sweep_agrees_with_bounded_search() {
    let page = text_page(3);
    for &angle in &[-46.0f64, 9.0] {
        let tilted = rotate(&page, angle);
        let (naive_theta, rotations) = naive_full_sweep(&tilted, 1.0).unwrap();
        assert!(rotations >= 360);
        let est = estimate_skew(&tilted, &SkewConfig::default()).unwrap();
        // Both see the same page modulo 180.
        let diff = angle_error(naive_theta, est.theta_skew)
            .min(angle_error(naive_theta, est.theta_skew + 180.0));
        assert!(diff <= 2.0, "naive {naive_theta} vs bounded {}", est.theta_skew);
    }
}
