use thiserror::Error;

/// Errors produced by the edge-ranking and MTF pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("window {height}x{width} at ({top},{left}) exceeds {image_height}x{image_width} image")]
    WindowOutOfBounds {
        top: usize,
        left: usize,
        height: usize,
        width: usize,
        image_height: usize,
        image_width: usize,
    },

    #[error("kernel of size {kernel} does not fit a {width}x{height} image")]
    KernelTooLarge {
        kernel: usize,
        width: usize,
        height: usize,
    },

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("edge angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),

    #[error("rank vector is empty")]
    EmptyRankVector,

    #[error("no usable edge found")]
    NoEdges,

    #[error("ESF window exits the image: {0}")]
    EsfWindow(String),

    #[error("profile too short: need at least {needed} samples, got {got}")]
    ProfileTooShort { needed: usize, got: usize },

    #[error("line spread function has zero DC component")]
    ZeroDc,

    #[error("blur sigma {sigma} too large for a {width}x{height} target")]
    BlurTooLarge {
        sigma: f64,
        width: usize,
        height: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
