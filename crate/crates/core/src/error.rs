use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Local dimension below 2.
    InvalidDimension(usize),
    /// A real parameter outside its allowed range.
    Domain { name: &'static str, value: f64 },
    /// Operand shapes do not fit together.
    DimensionMismatch { expected: usize, found: usize },
    /// Projector index out of range or repeated.
    InvalidProjector { index: usize, dim: usize },
    /// A conditioning branch whose probability is indistinguishable from zero.
    ZeroProbabilityBranch(f64),
    /// A behavior table that is not a normalized probability table.
    MalformedTable(&'static str, f64),
    /// The facet characterization only applies to no-signaling tables.
    SignalingTable(f64),
    /// Simplex exceeded its pivot budget.
    SolverFailure,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(n) => write!(f, "invalid dimension {n}, need at least 2"),
            Error::Domain { name, value } => write!(f, "{name} = {value} is out of range"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidProjector { index, dim } => {
                write!(f, "projector index {index} invalid for dimension {dim}")
            }
            Error::ZeroProbabilityBranch(p) => {
                write!(f, "conditioning on a zero-probability branch (p = {p:e})")
            }
            Error::MalformedTable(what, defect) => {
                write!(f, "malformed behavior table: {what} (defect {defect:e})")
            }
            Error::SignalingTable(defect) => write!(
                f,
                "facet test not applicable to a signaling table (defect {defect:e})"
            ),
            Error::SolverFailure => write!(f, "simplex did not terminate"),
        }
    }
}

impl core::error::Error for Error {}
