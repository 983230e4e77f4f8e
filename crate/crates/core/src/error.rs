use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes across the toolkit.
///
/// Variants are grouped by the stage that raises them; see [`Error::class`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // linalg
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric (|a[{row}][{col}] - a[{col}][{row}]| = {gap:e})")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("design is rank deficient: column {column} is collinear with preceding columns")]
    RankDeficient { column: usize },

    // dataprep
    #[error("csv: {0}")]
    Csv(String),
    #[error("duplicate column name '{0}' in header")]
    DuplicateHeader(String),
    #[error("empty column name at position {0}")]
    EmptyHeader(usize),
    #[error("ragged row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot parse cell at row {row}, column '{column}': '{value}'")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("table has no data rows")]
    NoRows,
    #[error("unknown column(s): {}", .0.join(", "))]
    UnknownColumns(Vec<String>),
    #[error("unknown group '{0}'")]
    UnknownGroup(String),
    #[error("subset config line {line}: {message}")]
    SubsetSyntax { line: usize, message: String },
    #[error("missing value at row {row}, column '{column}'")]
    MissingValue { row: usize, column: String },
    #[error("column '{0}' is constant")]
    ConstantColumn(String),
    #[error("need at least {needed} rows, found {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    // enet / cv
    #[error("coordinate descent did not converge at lambda index {lambda_index} after {iterations} sweeps")]
    MaxIterations {
        lambda_index: usize,
        iterations: usize,
    },
    #[error("lambda_max is undefined for alpha = 0; supply a lambda grid")]
    RidgeNeedsGrid,
    #[error("fold {fold}: predictor column {column} is constant in the training slice")]
    ConstantInFold { fold: usize, column: usize },

    // inference
    #[error("perfect fit (residual sum of squares is zero)")]
    PerfectFit,
    #[error("perfect collinearity: predictor '{0}' is explained exactly by the others")]
    PerfectCollinearity(String),
    #[error("degenerate correlation r = {0}")]
    PerfectCorrelation(f64),
    #[error("total sum of squares is zero (constant responses)")]
    ZeroTotalVariance,
    #[error("domain error: {0}")]
    Domain(String),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Solver,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Csv(_)
            | DuplicateHeader(_)
            | EmptyHeader(_)
            | RaggedRow { .. }
            | BadCell { .. }
            | NoRows
            | UnknownColumns(_)
            | UnknownGroup(_)
            | SubsetSyntax { .. }
            | MissingValue { .. }
            | ConstantColumn(_)
            | TooFewRows { .. }
            | InvalidArgument(_) => ErrorClass::Input,
            MaxIterations { .. } | RidgeNeedsGrid | ConstantInFold { .. } => ErrorClass::Solver,
            _ => ErrorClass::Numeric,
        }
    }
}
