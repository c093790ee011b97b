use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (max |M†M - I| = {0:e})")]
    NotUnitary(f64),
    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("qubit index {index} out of range 1..={qubits}")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("locality {found} where {expected} was required")]
    Locality { expected: usize, found: usize },
    #[error("degenerate ground state (gap {0:e})")]
    DegenerateGround(f64),
    #[error("level crossing at s = {s} (gap {gap:e})")]
    LevelCrossing { s: f64, gap: f64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("series diverges: |V| = {norm} >= gap {gap}")]
    Divergent { norm: f64, gap: f64 },
    #[error("step-doubling check failed: change {change:e} exceeds {tolerance:e}")]
    StepDoubling { change: f64, tolerance: f64 },
    #[error("expectation mismatch: tr(ρH) - ⟨ψ|H|ψ⟩ = {0:e}")]
    ExpectationMismatch(f64),
    #[error("path constraint violated: {0}")]
    Constraint(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
