//! Text and JSON renderings of rank tables and MTF curves.

use std::fmt::Write as _;

use mtfedge_core::mtf::MtfCurve;
use mtfedge_core::segment::{best_edge, sort_ranked};
use mtfedge_core::{EdgeSegment, RankVector};
use serde::Serialize;

use crate::{Format, Outcome, EXIT_NO_EDGES, EXIT_OK};

pub const RANK_HEADER: &str = "edge_rank,edge_length,start_row,start_col,thickness,theta_rad";

/// Prefix of the lines `batch` adds after the shared table.
pub const BATCH_PREFIX: &str = "# batch ";

/// Tiling details appended by `batch`.
#[derive(Debug, Clone, Serialize)]
pub struct BatchStats<'a> {
    pub tiles_processed: usize,
    pub truncated: usize,
    pub threshold: f64,
    pub wall_ms: f64,
    pub tile_millis: &'a [f64],
}

#[derive(Serialize)]
struct JsonReport<'a> {
    segments: &'a [EdgeSegment],
    best: Option<&'a EdgeSegment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    batch: Option<BatchStats<'a>>,
}

pub fn csv_row(s: &EdgeSegment) -> String {
    format!(
        "{:.4},{},{},{},{:.4},{:.6}",
        s.rank, s.length, s.start.row, s.start.col, s.thickness, s.theta
    )
}

/// The ranked table (highest rank first) with a best-edge summary, and the
/// "no edges" status when it is empty.
pub fn rank_outcome(rv: &RankVector, format: Format, batch: Option<BatchStats<'_>>) -> Outcome {
    let sorted = sort_ranked(rv);
    let best = best_edge(rv).ok();
    let text = match format {
        Format::Csv => {
            let mut out = String::from(RANK_HEADER);
            out.push('\n');
            for s in sorted.iter() {
                out.push_str(&csv_row(s));
                out.push('\n');
            }
            match best {
                Some(b) => {
                    let _ = writeln!(
                        out,
                        "# best: rank={:.4} length={} start=({},{})",
                        b.rank, b.length, b.start.row, b.start.col
                    );
                }
                None => out.push_str("# best: none (no edges found)\n"),
            }
            if let Some(b) = &batch {
                let _ = writeln!(
                    out,
                    "{BATCH_PREFIX}tiles_processed={} truncated={} threshold={}",
                    b.tiles_processed, b.truncated, b.threshold
                );
                let _ = writeln!(out, "{BATCH_PREFIX}wall_ms={:.1}", b.wall_ms);
                let tiles: Vec<String> = b.tile_millis.iter().map(|t| format!("{t:.1}")).collect();
                let _ = writeln!(out, "{BATCH_PREFIX}tile_ms={}", tiles.join(","));
            }
            out
        }
        Format::Json => {
            let report = JsonReport {
                segments: &sorted.segments,
                best,
                batch,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    Outcome {
        text,
        code: if rv.is_empty() { EXIT_NO_EDGES } else { EXIT_OK },
    }
}

/// CSV output with the `batch`-only lines removed.
pub fn strip_batch_lines(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with(BATCH_PREFIX))
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        })
}

pub fn mtf_csv(curve: &MtfCurve) -> String {
    let mut out = String::from("frequency_cpp,modulation\n");
    for p in &curve.points {
        let _ = writeln!(out, "{:.6},{:.6}", p.frequency, p.modulation);
    }
    out
}
