use thiserror::Error;

/// Errors raised by the kernel, realization, map, oscillator and Fock layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point outside the domain of the {space} space: {detail}")]
    Domain { space: &'static str, detail: String },

    #[error("kernel formula is singular at the given pair of points")]
    Singularity,

    #[error("space `{0}` has no projective structure")]
    NotProjective(&'static str),

    #[error("matrix is not Hermitian: relative correction {correction:.3e}")]
    NotHermitian { correction: f64 },

    #[error("Gram matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.6e} (max {max_eigenvalue:.6e})")]
    NotPositive { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("function is not admissible on the sample: null-space residual {residual:.3e} exceeds {threshold:.3e}")]
    NotAdmissible { residual: f64, threshold: f64 },

    #[error("kernel is not a shadow on the sample: residual {residual:.3e} exceeds {threshold:.3e}")]
    NotShadow { residual: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("map `{0}` has no adjoint")]
    MissingAdjoint(String),

    #[error("map `{0}` has no inverse")]
    MissingInverse(String),

    #[error("orbit is not closed under `{map}`: image of point {index} is missing")]
    OrbitNotClosed { map: String, index: usize },

    #[error("sample Gram matrix is ill-conditioned: numerical rank {rank} of {n} with {parallel} parallel pairs")]
    IllConditioned { rank: usize, n: usize, parallel: usize },

    #[error("matrix is numerically singular: sigma_min/sigma_max = {ratio:.3e}")]
    Singular { ratio: f64 },

    #[error("element is not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("mode index {index} out of range 1..={dim}")]
    Index { index: usize, dim: usize },

    #[error("operator degree {degree} exceeds the cutoff {cutoff}")]
    Degree { degree: usize, cutoff: usize },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("invalid Möbius map: {0}")]
    InvalidMap(String),

    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}
