use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh topology error: {0}")]
    Topology(String),

    #[error("cell {cell} has non-positive signed area {area:e} (cells must be counter-clockwise)")]
    Orientation { cell: usize, area: f64 },

    #[error(
        "cell {cell}: interface changes sign {sign_changes} times around the element boundary \
         (at most 2 allowed; refine the mesh)"
    )]
    CutTopology { cell: usize, sign_changes: usize },

    #[error("bisection did not converge after {iterations} iterations")]
    BisectionFailed { iterations: usize },

    #[error("degenerate polygon with area {area:e}")]
    DegeneratePolygon { area: f64 },

    #[error("singular {what} matrix")]
    SingularMatrix { what: &'static str },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("conjugate gradient stagnated at relative residual {residual:e} after {iterations} iterations (tolerance too tight)")]
    Stagnated { iterations: usize, residual: f64 },

    #[error("error is exactly zero at row {row}; convergence order is undefined")]
    ExactError { row: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("problem validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Topology(_)
            | Error::Orientation { .. }
            | Error::InvalidArgument(_)
            | Error::Io(_) => 2,
            Error::CutTopology { .. } => 4,
            _ => 3,
        }
    }
}
