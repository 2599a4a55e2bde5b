use mtfedge_core::batch::{plan_tiles, process_tiles, run_batch};
use mtfedge_core::pipeline::rank_image;
use mtfedge_core::raster::{write_pgm, PgmFile};
use mtfedge_core::segment::ScanMode;
use mtfedge_core::synth::{render, EdgeTarget};
use mtfedge_core::{Image, PipelineConfig, Threshold};
use proptest::prelude::*;

fn blocks(w: usize, h: usize, rects: &[(usize, usize, usize, usize, u8)]) -> Image {
    Image::from_fn(w, h, |r, c| {
        rects
            .iter()
            .rev()
            .find(|&&(t, l, hh, ww, _)| r >= t && r < t + hh && c >= l && c < l + ww)
            .map_or(30.0, |&(.., v)| f64::from(v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Image height never exceeds max_len, so no segment can be longer than it.
    #[test]
    fn tiled_equals_untiled(
        rects in proptest::collection::vec((0usize..40, 0usize..90, 1usize..30, 1usize..40, any::<u8>()), 1..8),
        tile in 16usize..40,
        per_pixel in any::<bool>(),
        noise in any::<bool>(),
        workers in 1usize..5,
    ) {
        let mut img = blocks(90, 40, &rects);
        if noise {
            img = Image::from_fn(90, 40, |r, c| img.get(r, c) + ((r * 7919 + c * 104_729) % 23) as f64);
        }
        let cfg = PipelineConfig {
            tile,
            max_len: 40,
            min_len: 1,
            scan_mode: if per_pixel { ScanMode::PerPixelRuns } else { ScanMode::MaximalRuns },
            workers,
            ..PipelineConfig::default()
        };
        let report = run_batch(&img, &cfg).unwrap();
        let untiled = rank_image(&img, &cfg).unwrap();
        prop_assert_eq!(report.truncated, 0);
        prop_assert_eq!(&report.merged, &untiled);
        for s in report.merged.iter() {
            let owners = plan_tiles(90, 40, tile, 40).unwrap().iter().filter(|t| t.core.contains(s.start)).count();
            prop_assert_eq!(owners, 1);
        }
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let img = blocks(
        200,
        150,
        &[(10, 10, 60, 30, 200), (40, 70, 90, 20, 90), (100, 120, 30, 60, 250), (5, 150, 140, 6, 0)],
    );
    let cfg = PipelineConfig {
        tile: 32,
        max_len: 150,
        ..PipelineConfig::default()
    };
    let tiles = plan_tiles(200, 150, 32, 150).unwrap();
    let one = process_tiles(&img, &tiles, &cfg, 1).unwrap();
    for workers in [2, 4, 8] {
        let many = process_tiles(&img, &tiles, &cfg, workers).unwrap();
        assert!(one.same_result(&many), "workers {workers}");
    }
    for _ in 0..3 {
        assert!(one.same_result(&process_tiles(&img, &tiles, &cfg, 8).unwrap()));
    }
}

#[test]
fn edge_inside_one_core_matches_single_pass() {
    // a short vertical edge well inside the first 64x64 core
    let img = Image::from_fn(160, 160, |r, c| if (10..40).contains(&r) && c >= 30 { 220.0 } else { 20.0 });
    let cfg = PipelineConfig { tile: 64, max_len: 40, ..PipelineConfig::default() };
    let report = run_batch(&img, &cfg).unwrap();
    let untiled = rank_image(&img, &cfg).unwrap();
    assert_eq!(report.merged, untiled);
    let best = report.best.unwrap();
    assert!(best.start.row < 64 && best.start.col < 64);
}

#[test]
fn edge_straddling_cores_reported_once() {
    // vertical edge spanning rows 40..100, crossing the core boundary at row 64
    let img = Image::from_fn(128, 128, |r, c| if (40..100).contains(&r) && c >= 50 { 200.0 } else { 0.0 });
    let cfg = PipelineConfig { tile: 64, max_len: 80, ..PipelineConfig::default() };
    let report = run_batch(&img, &cfg).unwrap();
    let untiled = rank_image(&img, &cfg).unwrap();
    assert_eq!(report.merged, untiled);
    let long: Vec<_> = report.merged.iter().filter(|s| s.start.row < 64 && s.start.row + s.length > 64).collect();
    assert_eq!(long.len(), 1);
    assert!(long[0].length >= 60);
    assert_eq!(report.best.as_ref(), Some(long[0]));
}

#[test]
fn auto_threshold_is_global() {
    // the strong edge lives in one tile, a weak one elsewhere; a per-tile
    // threshold would keep the weak edge, the global one drops it
    let img = Image::from_fn(128, 64, |_, c| {
        let strong = if c >= 30 { 250.0 } else { 0.0 };
        let weak = if c >= 100 { 10.0 } else { 0.0 };
        strong + weak
    });
    let cfg = PipelineConfig { tile: 32, max_len: 64, ..PipelineConfig::default() };
    let report = run_batch(&img, &cfg).unwrap();
    assert_eq!(report.merged, rank_image(&img, &cfg).unwrap());
    assert!(report.merged.iter().all(|s| s.start.col < 64));
    // peak LoG response of a 250 step is 5 * 250
    assert_eq!(report.threshold, 0.2 * 250.0 * 5.0);
    assert!(!report.merged.is_empty());
}

#[test]
fn fixed_threshold_path() {
    let img = render(&EdgeTarget { width: 96, height: 64, edge_angle: 1.2, blur_sigma: 1.0, ..EdgeTarget::default() }).unwrap();
    let cfg = PipelineConfig { tile: 32, max_len: 64, threshold: Threshold::Fixed(40.0), ..PipelineConfig::default() };
    let report = run_batch(&img, &cfg).unwrap();
    assert_eq!(report.threshold, 40.0);
    assert_eq!(report.merged, rank_image(&img, &cfg).unwrap());
}

#[test]
fn streamed_file_matches_memory() {
    let img = render(&EdgeTarget { width: 150, height: 100, edge_angle: 1.4, blur_sigma: 1.2, ..EdgeTarget::default() })
        .unwrap()
        .map(f64::round);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edge.pgm");
    std::fs::write(&path, write_pgm(&img, 255).unwrap()).unwrap();
    let file = PgmFile::open(&path).unwrap();
    let cfg = PipelineConfig { tile: 48, max_len: 100, workers: 3, ..PipelineConfig::default() };
    let from_file = run_batch(&file, &cfg).unwrap();
    let from_memory = run_batch(&img, &cfg).unwrap();
    assert!(from_file.same_result(&from_memory));
    assert_eq!(from_file.merged, rank_image(&img, &cfg).unwrap());
}
