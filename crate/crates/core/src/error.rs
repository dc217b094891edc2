//! Error type shared by all oracle, projection, and solver routines.

use core::fmt;

/// Errors reported by the oracles, projections, and solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input contained a NaN or an infinity.
    NonFinite(&'static str),
    /// A scalar parameter was outside its admissible range.
    InvalidParameter(&'static str),
    /// A vector or flat buffer had the wrong length.
    DimensionMismatch { expected: usize, found: usize },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// The edge list contains a directed cycle.
    CycleDetected,
    /// The graph must have exactly one source and one sink.
    BadSourceSink { sources: usize, sinks: usize },
    /// No directed path reaches the sink.
    SinkUnreachable,
    /// The level-set gradient vanished at an infeasible point.
    DegenerateGradient,
    /// The two halfspaces handed to the Haugazeau step do not intersect.
    EmptyHalfspaceIntersection,
    /// The requested brute-force reference does not cover this set or size.
    Unsupported(&'static str),
    /// The start point handed to the solver is not feasible.
    InfeasibleStart,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite(what) => write!(f, "non-finite entry in {what}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {rows}x{cols}")
            }
            Error::CycleDetected => write!(f, "directed cycle detected"),
            Error::BadSourceSink { sources, sinks } => {
                write!(f, "need exactly one source and one sink, found {sources} source(s) and {sinks} sink(s)")
            }
            Error::SinkUnreachable => write!(f, "sink unreachable from source"),
            Error::DegenerateGradient => {
                write!(f, "gradient vanished at an infeasible point")
            }
            Error::EmptyHalfspaceIntersection => {
                write!(f, "halfspace intersection is empty")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::InfeasibleStart => write!(f, "start point is not feasible"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
