use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("degenerate pair: the two points coincide")]
    DegeneratePair,
    #[error("line coefficients a and b are both zero")]
    DegenerateLine,
    #[error("line is vertical and has no dual point")]
    VerticalLine,
    #[error("point set contains a duplicate point (indices {0} and {1})")]
    DuplicatePoint(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("exact solver is capped at {cap} points, got {got}")]
    SizeCap { cap: usize, got: usize },
    #[error("points {0}, {1} and {2} are collinear")]
    GeneralPosition(usize, usize, usize),
    #[error("line {line} contains {count} points of the set")]
    TooManyOnLine { line: usize, count: usize },
    #[error("cell degeneracy: {0}")]
    CellDegeneracy(String),
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("sampling from an empty structure")]
    Empty,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("lines do not separate the point set (pair {0}, {1})")]
    NotSeparating(usize, usize),
    #[error("arrangement is capped at {cap} lines, got {got}")]
    ArrangementCap { cap: usize, got: usize },
    #[error("verification failed: {0}")]
    Verification(String),
}
