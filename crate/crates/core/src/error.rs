use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Everything that can go wrong inside the core algorithms.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The window polygon is not strictly convex and counter-clockwise.
    NonConvexWindow,
    /// A line does not cut the window interior.
    LineMissesWindow { line: usize },
    /// Coincident lines, concurrent triples, or colliding event times.
    DegenerateConfiguration(String),
    /// A mark references an event that does not lie on its line.
    MalformedMarks { line: usize },
    /// Input was expected to be a T-tessellation.
    InvalidTessellation(String),
    /// The enumeration node budget was exhausted.
    BudgetExceeded { nodes: u64 },
    /// A murder-count labelling does not come from a real tessellation.
    InconsistentScheme { event: usize },
    /// The orphan labelling violates the input requirements.
    SchemeViolation(String),
    /// The rebuild loop ran past its iteration cap.
    NonTermination { rounds: usize },
    /// Orphan refinement could not find the expected line.
    InvalidReduction(String),
    /// A reconstruction did not reproduce its source tessellation.
    RoundTripMismatch { lines: Vec<usize> },
    /// The energy went below its declared stability bound.
    StabilityViolated { energy: f64, bound: f64 },
    /// Bad numeric argument.
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used on diagnostic streams.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonConvexWindow => "NonConvexWindow",
            Error::LineMissesWindow { .. } => "LineMissesWindow",
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::MalformedMarks { .. } => "MalformedMarks",
            Error::InvalidTessellation(_) => "InvalidTessellation",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::InconsistentScheme { .. } => "InconsistentScheme",
            Error::SchemeViolation(_) => "SchemeViolation",
            Error::NonTermination { .. } => "NonTermination",
            Error::InvalidReduction(_) => "InvalidReduction",
            Error::RoundTripMismatch { .. } => "RoundTripMismatch",
            Error::StabilityViolated { .. } => "StabilityViolated",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvexWindow => write!(f, "window is not a strictly convex CCW polygon"),
            Error::LineMissesWindow { line } => write!(f, "line {line} does not cross the window"),
            Error::DegenerateConfiguration(what) => write!(f, "degenerate configuration: {what}"),
            Error::MalformedMarks { line } => {
                write!(f, "marks of line {line} reference events off that line")
            }
            Error::InvalidTessellation(what) => write!(f, "invalid tessellation: {what}"),
            Error::BudgetExceeded { nodes } => {
                write!(f, "enumeration budget exceeded after {nodes} nodes")
            }
            Error::InconsistentScheme { event } => {
                write!(f, "murder counts inconsistent at event {event}")
            }
            Error::SchemeViolation(what) => write!(f, "labelling scheme violation: {what}"),
            Error::NonTermination { rounds } => {
                write!(f, "rebuild loop did not settle within {rounds} rounds")
            }
            Error::InvalidReduction(what) => write!(f, "invalid reduction: {what}"),
            Error::RoundTripMismatch { lines } => {
                write!(f, "reconstruction differs on lines {lines:?}")
            }
            Error::StabilityViolated { energy, bound } => {
                write!(f, "energy {energy} below stability bound {bound}")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
