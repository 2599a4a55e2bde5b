//! Brute-force reference for chain tracing.
//!
//! Enumerates every non-extendable downward path from a start pixel and picks
//! the one whose step preferences (down < right < left) are lexicographically
//! smallest, which is the chain a greedy tracer must produce. Start filtering,
//! thickness and angle are recomputed from scratch.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use mtfedge_core::detect::{AngleField, BinaryMap};
use mtfedge_core::PixelCoord;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSegment {
    pub start: PixelCoord,
    pub length: usize,
    pub thickness: f64,
    pub theta: f64,
    pub rank: f64,
    pub columns: Vec<usize>,
}

fn set(bm: &BinaryMap, r: isize, c: isize) -> bool {
    r >= 0
        && c >= 0
        && (r as usize) < bm.height()
        && (c as usize) < bm.width()
        && bm.get(r as usize, c as usize)
}

/// All maximal downward paths from `(r, c)` as (preference keys, columns).
fn all_paths(bm: &BinaryMap, r: usize, c: usize) -> Vec<(Vec<u8>, Vec<usize>)> {
    let moves: [(u8, isize); 3] = [(0, 0), (1, 1), (2, -1)];
    let mut out = Vec::new();
    let mut stack = vec![(r, c, Vec::<u8>::new(), vec![c])];
    while let Some((r, c, keys, cols)) = stack.pop() {
        let mut extended = false;
        for (key, dc) in moves {
            let nc = c as isize + dc;
            if set(bm, r as isize + 1, nc) {
                extended = true;
                let mut k = keys.clone();
                k.push(key);
                let mut cc = cols.clone();
                cc.push(nc as usize);
                stack.push((r + 1, nc as usize, k, cc));
            }
        }
        if !extended {
            out.push((keys, cols));
        }
    }
    out
}

fn is_maximal_start(bm: &BinaryMap, r: usize, c: usize) -> bool {
    let (r, c) = (r as isize, c as isize);
    let has_parent = (-1..=1).any(|dc| set(bm, r - 1, c + dc));
    !has_parent && !set(bm, r, c - 1)
}

fn run_width(bm: &BinaryMap, r: usize, c: usize) -> usize {
    let mut runs = Vec::new();
    let mut open: Option<usize> = None;
    for x in 0..=bm.width() {
        let on = x < bm.width() && bm.get(r, x);
        match (on, open) {
            (true, None) => open = Some(x),
            (false, Some(s)) => {
                runs.push((s, x - 1));
                open = None;
            }
            _ => {}
        }
    }
    let (s, e) = runs
        .into_iter()
        .find(|&(s, e)| s <= c && c <= e)
        .expect("chain pixel is set");
    e - s + 1
}

pub fn trace(bm: &BinaryMap, angles: &AngleField, min_len: usize, maximal: bool) -> Vec<OracleSegment> {
    let mut out = Vec::new();
    for r in 0..bm.height() {
        for c in 0..bm.width() {
            if !bm.get(r, c) || (maximal && !is_maximal_start(bm, r, c)) {
                continue;
            }
            let (_, columns) = all_paths(bm, r, c)
                .into_iter()
                .min_by(|a, b| a.0.cmp(&b.0))
                .unwrap();
            let length = columns.len();
            if length < min_len {
                continue;
            }
            let widths: usize = columns
                .iter()
                .enumerate()
                .map(|(i, &cc)| run_width(bm, r + i, cc))
                .sum();
            let thickness = widths as f64 / length as f64;
            let mut normals: Vec<f64> = columns
                .iter()
                .enumerate()
                .filter(|&(i, &cc)| angles.is_valid(r + i, cc))
                .map(|(i, &cc)| FRAC_PI_2 - angles.angle(r + i, cc).abs())
                .collect();
            normals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let theta = if normals.is_empty() {
                if length == 1 {
                    FRAC_PI_2
                } else {
                    let dx = (*columns.last().unwrap() as f64 - columns[0] as f64).abs();
                    ((length - 1) as f64).atan2(dx)
                }
            } else if normals.len() % 2 == 1 {
                normals[normals.len() / 2]
            } else {
                (normals[normals.len() / 2 - 1] + normals[normals.len() / 2]) / 2.0
            };
            out.push(OracleSegment {
                start: PixelCoord::new(r, c),
                length,
                thickness,
                theta,
                rank: (length as f64 - thickness) / 10.0 + theta,
                columns,
            });
        }
    }
    out
}

/// Field-by-field comparison; returns a description of the first difference.
pub fn compare(
    got: &mtfedge_core::RankVector,
    want: &[OracleSegment],
) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} segments, oracle has {}", got.len(), want.len()));
    }
    for (g, w) in got.iter().zip(want) {
        let same = g.start == w.start
            && g.length == w.length
            && g.columns == w.columns
            && g.thickness == w.thickness
            && g.theta == w.theta
            && g.rank == w.rank;
        if !same {
            return Err(format!("segment mismatch: got {g:?}, oracle {w:?}"));
        }
    }
    Ok(())
}

/// A random angle field: mostly valid angles in `(−π/2, π/2]`, some sentinels.
pub fn random_angles(rng: &mut impl rand::Rng, w: usize, h: usize) -> AngleField {
    let n = w * h;
    let valid: Vec<bool> = (0..n).map(|_| rng.random_bool(0.8)).collect();
    let angles = valid
        .iter()
        .map(|&v| if v { rng.random_range(-FRAC_PI_2..=FRAC_PI_2) } else { 0.0 })
        .collect();
    AngleField::new(w, h, angles, valid).unwrap()
}

/// Checks maximal-runs tracing against the oracle on every 3×3 map and on
/// `random` seeded 8×8 maps. Returns the number of maps compared.
pub fn check_maximal_runs(random: usize, seed: u64) -> Result<usize, String> {
    use mtfedge_core::segment::{trace_segments, ScanMode};
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for mask in 0u32..512 {
        let bm = BinaryMap::from_fn(3, 3, |r, c| mask >> (r * 3 + c) & 1 == 1);
        let angles = random_angles(&mut rng, 3, 3);
        let got = trace_segments(&bm, &angles, 1, ScanMode::MaximalRuns).map_err(|e| e.to_string())?;
        compare(&got, &trace(&bm, &angles, 1, true)).map_err(|e| format!("3x3 mask {mask:#011b}: {e}"))?;
        checked += 1;
    }
    for i in 0..random {
        let density = rng.random_range(0.1..0.9);
        let bm = BinaryMap::from_fn(8, 8, |_, _| rng.random_bool(density));
        let angles = random_angles(&mut rng, 8, 8);
        let got = trace_segments(&bm, &angles, 1, ScanMode::MaximalRuns).map_err(|e| e.to_string())?;
        compare(&got, &trace(&bm, &angles, 1, true)).map_err(|e| format!("random map {i}: {e}"))?;
        checked += 1;
    }
    Ok(checked)
}
