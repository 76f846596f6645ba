use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("expected a {}x{} matrix, found {found} entries", expected.0, expected.1)]
    Shape { expected: (usize, usize), found: usize },
    #[error("matrix rows have different lengths")]
    Ragged,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not invertible over Z (det = {det})")]
    NotUnimodular { det: BigInt },
    #[error("exterior power {k} out of range for a {n}x{n} matrix")]
    ExteriorDegree { k: usize, n: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring has no generators")]
    Empty,
    #[error("generator {label:?}: degree must be at least 1")]
    ZeroDegree { label: String },
    #[error("generator {label:?}: nilpotency must be at least 2, got {nilpotency}")]
    Nilpotency { label: String, nilpotency: u32 },
    #[error("generator {label:?} has odd degree {degree} and nilpotency {nilpotency}; odd classes square to zero")]
    OddNilpotent { label: String, degree: u32, nilpotency: u32 },
    #[error("duplicate generator label {0:?}")]
    DuplicateLabel(String),
    #[error("generators must be listed with non-decreasing degrees ({label:?} breaks the order)")]
    DegreeOrder { label: String },
    #[error("degree {degree} out of range 0..={top}")]
    DegreeOutOfRange { degree: i64, top: u32 },
    #[error("unknown generator label {0:?}")]
    UnknownLabel(String),
    #[error("monomial does not match the ring: {0}")]
    BadMonomial(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomorphismError {
    #[error("not a ring map: the image of generator {label:?} violates its relation ({label}^{nilpotency} = 0)")]
    NotRingMap { label: String, nilpotency: u32 },
    #[error("not invertible over Z: det of the degree-{degree} matrix is {det}")]
    NotInvertible { degree: u32, det: BigInt },
    #[error("generator {label:?}: image has {found} coordinates but H^{degree} has rank {expected}")]
    ImageLength { label: String, degree: u32, expected: usize, found: usize },
    #[error("no image given for generator {0:?}")]
    MissingImage(String),
    #[error("image given for unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("degree {degree}: expected a {expected}x{expected} matrix, found {rows}x{cols}")]
    DegreeShape { degree: u32, expected: usize, rows: usize, cols: usize },
    #[error("degree {0} is missing from the family and H^{0} is nonzero")]
    MissingDegree(u32),
    #[error("degree key {0:?} is not a valid degree of the ring")]
    BadDegreeKey(String),
    #[error("automorphisms act on different rings")]
    RingMismatch,
    #[error("the degree-0 matrix must be [1]")]
    UnitNotFixed,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(
        "unresolved grouping: moduli {a:.12} and {b:.12} fall within tolerance {tolerance:e} but are certified distinct; \
         use a smaller tolerance or a longer exact sequence"
    )]
    UnresolvedGrouping { a: f64, b: f64, tolerance: f64 },
    #[error("root finder did not converge on a degree-{degree} factor")]
    NoConvergence { degree: usize },
    #[error("spectral reconstruction deviates from the exact sequence by {residual:e} (relative) at l = {l}")]
    ReconstructionMismatch { l: u64, residual: f64 },
    #[error("cascade exceeded {0} steps without finding a nonvanishing coefficient")]
    CascadeExhausted(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereProductError {
    #[error("sphere product has no factors")]
    Empty,
    #[error("sphere dimensions must be strictly increasing and at least 1 (got {0:?})")]
    Dimensions(Vec<u32>),
    #[error("factor S^{dim} has count 0")]
    ZeroCount { dim: u32 },
    #[error("degree {degree} out of range 0..={top}")]
    DegreeOutOfRange { degree: u32, top: u32 },
    #[error("missing generator block A_{dim} for the odd sphere S^{dim}")]
    MissingBlock { dim: u32 },
    #[error("block A_{dim} must be {expected}x{expected}, found {rows}x{cols}")]
    BlockShape { dim: u32, expected: usize, rows: usize, cols: usize },
    #[error("block A_{dim} is not unimodular (det = {det})")]
    BlockNotUnimodular { dim: u32, det: BigInt },
    #[error("block given for S^{dim}, which is not a factor")]
    UnknownBlock { dim: u32 },
    #[error("splitting {alpha:?} does not fit the product")]
    BadSplitting { alpha: Vec<u32> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no power l <= {bound} fixes the even-degree generators; the automorphism does not permute them")]
    OrderBoundExceeded { bound: u64 },
    #[error("multiplicity law violated for odd splitting {alpha:?}: {appearances} appearances, expected {expected}")]
    MultiplicityLaw { alpha: Vec<u32>, appearances: u64, expected: u64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("form must be a nonempty square matrix, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("form is not unimodular (det = {0})")]
    NotUnimodular(BigInt),
    #[error("matrix is not an isometry of the form")]
    NotIsometry,
    #[error("non-split Jordan block: the eigenvalue-1 part of A is not semisimple (dim ker(A-I) = {kernel}, algebraic multiplicity {multiplicity})")]
    NonSplitJordan { kernel: usize, multiplicity: usize },
    #[error("rank {0} exceeds the configured search limit")]
    SearchLimit(usize),
    #[error("{0}")]
    Invariant(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("matrix must be square with det = +-1")]
    NotUnimodular,
    #[error("map is not hyperbolic (eigenvalue on the unit circle)")]
    NotHyperbolic,
    #[error("non-isolated fixed points: det(A^{l} - I) = 0")]
    NonIsolated { l: u64 },
    #[error("cross-check mismatch at l = {l}: lefschetz {lefschetz}, det count {det_count}, smith count {smith_count}")]
    Mismatch { l: u64, lefschetz: BigInt, det_count: BigInt, smith_count: BigInt },
    #[error("growth mismatch: {0}")]
    Growth(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("outside theorem hypotheses: {0}")]
    OutsideHypotheses(String),
    #[error("invalid manifold description: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    SphereProduct(#[from] SphereProductError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Crate-wide error, one variant per subsystem.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    SphereProduct(#[from] SphereProductError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// An internal cross-check failed, as opposed to bad or unsupported input.
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::Spectral(_)
                | Error::Oracle(OracleError::Mismatch { .. } | OracleError::Growth(_) | OracleError::Spectral(_))
                | Error::SphereProduct(SphereProductError::Spectral(_) | SphereProductError::MultiplicityLaw { .. })
        )
    }
}
