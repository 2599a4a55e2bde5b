//! Randomized invariant checks shared by the crate's property tests and the
//! acceptance suite. Each check runs `cases` generated instances.

use mtfedge_core::detect::{binary_threshold, convolve2d, log_kernel_5x5, Kernel};
use mtfedge_core::mtf::{lsf_from_esf, mtf_from_lsf, EsfProfile, LsfProfile};
use mtfedge_core::Image;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Check = fn(u32) -> Result<(), String>;

/// `(name, check)` for every property.
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("convolution linearity", convolution_linearity as Check),
        ("LoG annihilates planes", log_annihilates_planes),
        ("threshold scale covariance", threshold_scale_covariance),
        ("LSF telescoping", lsf_telescoping),
        ("DFT shift invariance", dft_shift_invariance),
        ("DFT amplitude invariance", dft_amplitude_invariance),
        ("MTF(0) = 1", mtf_dc_is_one),
        ("nonnegative LSF modulation <= 1", nonnegative_lsf_bounded),
    ]
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn image(w: usize, h: usize) -> impl Strategy<Value = Image> {
    proptest::collection::vec(-1000.0..1000.0f64, w * h).prop_map(move |px| Image::new(w, h, px).unwrap())
}

fn kernel() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(3usize), Just(5usize)].prop_flat_map(|n| {
        proptest::collection::vec(-5.0..5.0f64, n * n).prop_map(move |w| Kernel::new(n, w).unwrap())
    })
}

pub fn convolution_linearity(cases: u32) -> Result<(), String> {
    let strategy = (image(11, 9), image(11, 9), kernel(), -10.0..10.0f64, -10.0..10.0f64);
    run(cases, strategy, |(i, j, k, a, b)| {
        let mixed = Image::new(
            11,
            9,
            i.pixels().iter().zip(j.pixels()).map(|(x, y)| a * x + b * y).collect(),
        )
        .unwrap();
        let lhs = convolve2d(&mixed, &k).unwrap();
        let ci = convolve2d(&i, &k).unwrap();
        let cj = convolve2d(&j, &k).unwrap();
        // scale for the relative bound: the largest term magnitude feeding the sums
        let scale = 25.0 * 5.0 * 1000.0 * (a.abs() + b.abs()).max(1.0);
        for n in 0..lhs.pixels().len() {
            let rhs = a * ci.pixels()[n] + b * cj.pixels()[n];
            let err = (lhs.pixels()[n] - rhs).abs();
            prop_assert!(err <= 1e-9 * scale, "pixel {n}: {} vs {rhs}", lhs.pixels()[n]);
        }
        Ok(())
    })
}

pub fn log_annihilates_planes(cases: u32) -> Result<(), String> {
    let strategy = (-100.0..100.0f64, -100.0..100.0f64, -1000.0..1000.0f64);
    run(cases, strategy, |(p, q, d)| {
        let img = Image::from_fn(16, 14, |r, c| p * r as f64 + q * c as f64 + d);
        let out = convolve2d(&img, &log_kernel_5x5()).unwrap();
        for r in 2..12 {
            for c in 2..14 {
                prop_assert!(out.get(r, c).abs() <= 1e-9, "({r},{c}) = {}", out.get(r, c));
            }
        }
        Ok(())
    })
}

pub fn threshold_scale_covariance(cases: u32) -> Result<(), String> {
    let strategy = (image(9, 7), 0.0..800.0f64, 1e-3..1e3f64);
    run(cases, strategy, |(img, t, k)| {
        let scaled = img.map(|v| k * v);
        prop_assert_eq!(
            binary_threshold(&scaled, k * t).unwrap(),
            binary_threshold(&img, t).unwrap()
        );
        Ok(())
    })
}

pub fn lsf_telescoping(cases: u32) -> Result<(), String> {
    // integer-valued samples keep every difference and partial sum exact
    let strategy = proptest::collection::vec(-100_000i32..100_000, 4..64);
    run(cases, strategy, |samples| {
        let esf = EsfProfile {
            samples: samples.iter().map(|&v| f64::from(v)).collect(),
            spacing: 1.0,
        };
        let lsf = lsf_from_esf(&esf).unwrap();
        prop_assert_eq!(lsf.samples.len(), esf.samples.len() - 1);
        let total: f64 = lsf.samples.iter().sum::<f64>() * lsf.spacing;
        prop_assert_eq!(total, esf.samples[esf.samples.len() - 1] - esf.samples[0]);
        Ok(())
    })
}

fn lsf_profile(min_len: usize) -> impl Strategy<Value = LsfProfile> {
    proptest::collection::vec(0.0..10.0f64, min_len..48)
        .prop_filter("nonzero DC", |s| s.iter().sum::<f64>() > 1e-6)
        .prop_map(|samples| LsfProfile {
            samples,
            spacing: 1.0,
        })
}

pub fn dft_shift_invariance(cases: u32) -> Result<(), String> {
    run(cases, (lsf_profile(3), any::<prop::sample::Index>()), |(lsf, shift)| {
        let mut rotated = lsf.samples.clone();
        rotated.rotate_left(shift.index(lsf.samples.len()));
        let a = mtf_from_lsf(&lsf).unwrap();
        let b = mtf_from_lsf(&LsfProfile {
            samples: rotated,
            spacing: 1.0,
        })
        .unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            prop_assert!((p.modulation - q.modulation).abs() <= 1e-9);
        }
        Ok(())
    })
}

pub fn dft_amplitude_invariance(cases: u32) -> Result<(), String> {
    run(cases, (lsf_profile(3), 1e-3..1e3f64), |(lsf, k)| {
        let a = mtf_from_lsf(&lsf).unwrap();
        let b = mtf_from_lsf(&LsfProfile {
            samples: lsf.samples.iter().map(|v| k * v).collect(),
            spacing: 1.0,
        })
        .unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            prop_assert!((p.modulation - q.modulation).abs() <= 1e-9);
        }
        Ok(())
    })
}

pub fn mtf_dc_is_one(cases: u32) -> Result<(), String> {
    let strategy = proptest::collection::vec(-10.0..10.0f64, 3..48)
        .prop_filter("nonzero DC", |s| s.iter().sum::<f64>().abs() > 1e-6);
    run(cases, strategy, |samples| {
        let n = samples.len();
        let c = mtf_from_lsf(&LsfProfile {
            samples,
            spacing: 1.0,
        })
        .unwrap();
        prop_assert_eq!(c.points[0].frequency, 0.0);
        prop_assert_eq!(c.points[0].modulation, 1.0);
        prop_assert_eq!(c.points.len(), n / 2 + 1);
        prop_assert!(c.points.windows(2).all(|w| w[0].frequency < w[1].frequency));
        prop_assert!(c.points.last().unwrap().frequency <= 0.5);
        Ok(())
    })
}

pub fn nonnegative_lsf_bounded(cases: u32) -> Result<(), String> {
    run(cases, lsf_profile(3), |lsf| {
        for p in mtf_from_lsf(&lsf).unwrap().points {
            prop_assert!(p.modulation >= 0.0 && p.modulation <= 1.0 + 1e-9);
        }
        Ok(())
    })
}
