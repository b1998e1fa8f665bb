//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice size L={0} is degenerate; periodic FCC needs L >= 2")]
    DegenerateLattice(u32),

    #[error("edge ({0}, {1}) is out of range for {2} sites")]
    EdgeOutOfRange(u32, u32, usize),

    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(u32),

    #[error("value {value} is outside the spin space {space}")]
    ValueOutsideSpinSpace { value: f64, space: String },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("gross return is undefined: previous price is zero")]
    UndefinedReturn,

    #[error("window [{lo}, {hi}) is out of range for a series of {len} rows")]
    WindowOutOfRange { lo: u64, hi: u64, len: usize },

    #[error("averaging window is empty (discard {discard} >= {len} rows)")]
    EmptyWindow { discard: u64, len: usize },

    #[error("series has zero variance; autocorrelation is undefined")]
    ZeroVariance,

    #[error("series of length {len} is shorter than window {window}")]
    SeriesTooShort { len: usize, window: usize },

    #[error("need at least {min} grid points, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("susceptibility peak sits at the grid boundary (T={0}); widen the grid")]
    PeakAtBoundary(f64),

    #[error(
        "critical-field bracket is not ordered: persistence is {lo_verdict} at H={lo} \
         and {hi_verdict} at H={hi}; need false at the low end and true at the high end"
    )]
    UnorderedBracket {
        lo: f64,
        hi: f64,
        lo_verdict: bool,
        hi_verdict: bool,
    },

    #[error("trajectory tail is transient (none of ordered/oscillating/clearing); lengthen the run")]
    TransientTail,

    #[error("regime sequence across the temperature grid is not monotone: {0}")]
    NonMonotoneRegimes(String),

    #[error("regime precondition failed: {0}")]
    RegimePrecondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
