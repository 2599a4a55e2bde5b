//! Command-line front end: `rank`, `mtf`, `batch` and `synth`.
//!
//! Each command is a plain function returning the text to print and the exit
//! status, so tests can drive them without spawning the binary.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtfedge_core::batch::run_batch;
use mtfedge_core::detect::{log_kernel_5x5, GradientOperator, Kernel};
use mtfedge_core::mtf::{LsfMethod, DEFAULT_HALF_WINDOW};
use mtfedge_core::pipeline::{measure_mtf, rank_image, DEFAULT_MAX_LEN, DEFAULT_TILE};
use mtfedge_core::raster::{load_image, write_pgm, PgmFile};
use mtfedge_core::segment::{DEFAULT_MIN_LEN, DEFAULT_RANK_DIVISOR};
use mtfedge_core::synth::{analytic_mtf50, render, EdgeTarget, NOISE_ALGORITHM};
use mtfedge_core::{PipelineConfig, ScanMode, Threshold};

pub mod report;
pub mod svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NO_EDGES: i32 = 4;

const AFTER_HELP: &str = "\
Coordinates are 0-based (row, col) with the origin at the top-left pixel.

Exit codes:
  0  success
  2  invalid arguments or configuration
  3  unreadable or unwritable file
  4  no edges found";

#[derive(Debug, Parser)]
#[command(name = "mtfedge", version, about = "Best-edge selection and MTF measurement", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank every near-vertical edge segment of an image.
    #[command(after_help = AFTER_HELP)]
    Rank {
        input: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Measure the MTF across the best-ranked edge.
    #[command(after_help = AFTER_HELP)]
    Mtf {
        input: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot of the curve.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Rank edges tile by tile, in parallel; same table as `rank`.
    #[command(after_help = AFTER_HELP)]
    Batch {
        input: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write a synthetic blurred straight-edge target as PGM.
    #[command(after_help = AFTER_HELP, allow_negative_numbers = true)]
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanModeArg {
    MaximalRuns,
    PerPixelRuns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradientArg {
    Sobel,
    Prewitt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LsfArg {
    Forward,
    Central,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Edge-response threshold: a number, or `auto` for 0.2 × the peak response.
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    pub threshold: Threshold,
    /// Shortest segment kept, in rows.
    #[arg(long, default_value_t = DEFAULT_MIN_LEN)]
    pub min_len: usize,
    #[arg(long, value_enum, default_value_t = ScanModeArg::MaximalRuns)]
    pub scan_mode: ScanModeArg,
    #[arg(long, value_enum, default_value_t = GradientArg::Sobel)]
    pub gradient: GradientArg,
    /// Half width of the edge profile window, in pixels.
    #[arg(long, default_value_t = DEFAULT_HALF_WINDOW)]
    pub half_window: usize,
    #[arg(long, default_value_t = DEFAULT_RANK_DIVISOR)]
    pub rank_divisor: f64,
    #[arg(long, value_enum, default_value_t = LsfArg::Forward)]
    pub lsf: LsfArg,
    /// Tile core size for `batch`.
    #[arg(long, default_value_t = DEFAULT_TILE)]
    pub tile: usize,
    /// Longest segment reproduced exactly by `batch`; also bounds thickness runs.
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: usize,
    #[arg(long, env = "MTFEDGE_THREADS", default_value_t = 1)]
    pub workers: usize,
    /// Replacement edge-detection mask: n×n whitespace- or comma-separated weights, n odd.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
}

impl Default for PipelineArgs {
    fn default() -> Self {
        Self {
            threshold: Threshold::Auto,
            min_len: DEFAULT_MIN_LEN,
            scan_mode: ScanModeArg::MaximalRuns,
            gradient: GradientArg::Sobel,
            half_window: DEFAULT_HALF_WINDOW,
            rank_divisor: DEFAULT_RANK_DIVISOR,
            lsf: LsfArg::Forward,
            tile: DEFAULT_TILE,
            max_len: DEFAULT_MAX_LEN,
            workers: 1,
            kernel: None,
        }
    }
}

impl PipelineArgs {
    pub fn to_config(&self) -> Result<PipelineConfig, CliError> {
        let edge_kernel = match &self.kernel {
            Some(path) => load_kernel(path)?,
            None => log_kernel_5x5(),
        };
        let cfg = PipelineConfig {
            threshold: self.threshold,
            min_len: self.min_len,
            scan_mode: match self.scan_mode {
                ScanModeArg::MaximalRuns => ScanMode::MaximalRuns,
                ScanModeArg::PerPixelRuns => ScanMode::PerPixelRuns,
            },
            gradient_op: match self.gradient {
                GradientArg::Sobel => GradientOperator::Sobel,
                GradientArg::Prewitt => GradientOperator::Prewitt,
            },
            half_window: self.half_window,
            rank_divisor: self.rank_divisor,
            lsf_method: match self.lsf {
                LsfArg::Forward => LsfMethod::Forward,
                LsfArg::Central => LsfMethod::Central,
            },
            tile: self.tile,
            max_len: self.max_len,
            workers: self.workers,
            edge_kernel,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    /// Edge angle from the x-axis in degrees, in [-90, 90]; 90 is vertical.
    #[arg(long, default_value_t = 90.0)]
    pub angle: f64,
    /// Signed shift of the edge line from the image center, in pixels.
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    #[arg(long, default_value_t = 0.0)]
    pub low: f64,
    #[arg(long, default_value_t = 200.0)]
    pub high: f64,
    /// Gaussian blur sigma in pixels.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 255 or 65535.
    #[arg(long, default_value_t = 255)]
    pub maxval: u32,
}

impl SynthArgs {
    pub fn target(&self) -> EdgeTarget {
        // 90° must land exactly on the domain boundary, not one ulp past it
        let edge_angle = if self.angle.abs() == 90.0 {
            FRAC_PI_2.copysign(self.angle)
        } else {
            self.angle.to_radians()
        };
        EdgeTarget {
            width: self.width,
            height: self.height,
            edge_angle,
            edge_offset: self.offset,
            low: self.low,
            high: self.high,
            blur_sigma: self.sigma,
            noise_sigma: self.noise,
            seed: self.seed,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    NoEdges(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::NoEdges(_) => EXIT_NO_EDGES,
        }
    }
}

impl From<mtfedge_core::Error> for CliError {
    fn from(e: mtfedge_core::Error) -> Self {
        use mtfedge_core::Error as E;
        match e {
            E::Io(_) | E::MalformedHeader(_) | E::UnsupportedFormat(_) | E::TruncatedData { .. } => {
                CliError::Io(e.to_string())
            }
            E::NoEdges | E::EmptyRankVector => CliError::NoEdges("no usable edge found".into()),
            E::EsfWindow(_) => CliError::Config(format!("{e}; try a smaller --half-window")),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Text to print and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Threshold::Auto);
    }
    match s.parse::<f64>() {
        Ok(t) if t >= 0.0 && t.is_finite() => Ok(Threshold::Fixed(t)),
        _ => Err(format!("expected `auto` or a non-negative number, got `{s}`")),
    }
}

/// Reads an odd square mask from a text file.
pub fn load_kernel(path: &Path) -> Result<Kernel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let weights = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Config(format!("{}: bad kernel weight `{t}`", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let size = (weights.len() as f64).sqrt().round() as usize;
    if size * size != weights.len() {
        return Err(CliError::Config(format!(
            "{}: {} weights do not form a square kernel",
            path.display(),
            weights.len()
        )));
    }
    Ok(Kernel::new(size, weights)?)
}

pub fn cmd_rank(input: &Path, cfg: &PipelineConfig, format: Format) -> Result<Outcome, CliError> {
    let img = load_image(input)?;
    let ranked = rank_image(&img, cfg)?;
    Ok(report::rank_outcome(&ranked, format, None))
}

pub fn cmd_batch(input: &Path, cfg: &PipelineConfig, format: Format) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let report = if is_pgm(input)? {
        run_batch(&PgmFile::open(input)?, cfg)?
    } else {
        run_batch(&load_image(input)?, cfg)?
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report::rank_outcome(
        &report.merged,
        format,
        Some(report::BatchStats {
            tiles_processed: report.tiles_processed,
            truncated: report.truncated,
            threshold: report.threshold,
            wall_ms,
            tile_millis: &report.tile_millis,
        }),
    ))
}

fn is_pgm(path: &Path) -> Result<bool, CliError> {
    use std::io::Read;
    let mut magic = [0u8; 2];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut magic))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(&magic == b"P5" || &magic == b"P2")
}

pub fn cmd_mtf(
    input: &Path,
    cfg: &PipelineConfig,
    out_csv: Option<&Path>,
    out_svg: Option<&Path>,
) -> Result<Outcome, CliError> {
    let img = load_image(input)?;
    let m = measure_mtf(&img, cfg)?;
    let csv = report::mtf_csv(&m.curve);
    let mut text = String::new();
    match out_csv {
        Some(path) => write_file(path, csv.as_bytes())?,
        None => text.push_str(&csv),
    }
    if let Some(path) = out_svg {
        write_file(path, svg::mtf_plot(&m.curve, m.mtf50).as_bytes())?;
    }
    let e = &m.edge;
    let _ = writeln!(
        text,
        "# edge: rank={:.4} length={} start=({},{})",
        e.rank, e.length, e.start.row, e.start.col
    );
    match m.mtf50 {
        Some(f) => {
            let _ = writeln!(text, "# mtf50_cpp: {f:.6}");
        }
        None => text.push_str("# mtf50_cpp: no crossing\n"),
    }
    Ok(Outcome { text, code: EXIT_OK })
}

pub fn cmd_synth(args: &SynthArgs) -> Result<Outcome, CliError> {
    let target = args.target();
    let img = render(&target)?;
    let bytes = write_pgm(&img, args.maxval)?;
    write_file(&args.out, &bytes)?;
    let mut text = format!(
        "wrote {} ({}x{}, maxval {})\n",
        args.out.display(),
        args.width,
        args.height,
        args.maxval
    );
    match analytic_mtf50(target.blur_sigma) {
        Some(f) => {
            let _ = writeln!(text, "# analytic_mtf50_cpp: {f:.5}");
        }
        None => text.push_str("# analytic_mtf50_cpp: none (unblurred edge)\n"),
    }
    if target.noise_sigma > 0.0 {
        let _ = writeln!(text, "# noise: {NOISE_ALGORITHM} seed={}", target.seed);
    }
    Ok(Outcome { text, code: EXIT_OK })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Rank { input, pipeline, format } => cmd_rank(&input, &pipeline.to_config()?, format),
        Command::Batch { input, pipeline, format } => cmd_batch(&input, &pipeline.to_config()?, format),
        Command::Mtf { input, pipeline, out, svg } => {
            cmd_mtf(&input, &pipeline.to_config()?, out.as_deref(), svg.as_deref())
        }
        Command::Synth(args) => cmd_synth(&args),
    }
}
