use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime below 2^31")]
    NotOddPrime(u64),
    #[error("cannot parse field {0:?}")]
    Unparseable(String),
    #[error("coefficient {0} has a denominator divisible by the characteristic")]
    BadDenominator(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("columns are linearly dependent")]
    DependentColumns,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("shape mismatch at degree {degree}: {detail}")]
    ShapeMismatch { degree: i64, detail: String },
    #[error("d∘d is nonzero at degree {degree}")]
    SquareNonZero { degree: i64 },
    #[error("degree {degree} is not interior to the window [{lo}, {hi}]")]
    EdgeDegree { degree: i64, lo: i64, hi: i64 },
    #[error("graded maps are not composable")]
    ChainMismatch,
    #[error("complex would have {total} basis elements, above the cap {cap}")]
    TooLarge { total: usize, cap: usize },
    #[error("invalid window [{lo}, {hi}]")]
    BadWindow { lo: i64, hi: i64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("path {path:?} is not composable at {arrow:?}")]
    BrokenPath { path: Vec<String>, arrow: String },
    #[error("relation {index} mixes paths with different endpoints")]
    NotParallel { index: usize },
    #[error("relation {index} is not admissible: {detail}")]
    NotAdmissible { index: usize, detail: String },
    #[error("bound {bound} is too small: a path of length {} from {from} to {to} survives", bound + 1)]
    BoundTooSmall { bound: usize, from: String, to: String },
    #[error("bad coefficient: {0}")]
    Coefficient(#[from] FieldError),
    #[error("{0}")]
    LawViolation(String),
    #[error("expected a single-object category")]
    NotSingleObject,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("modules live over different categories")]
    CategoryMismatch,
    #[error("category is not self-injective: Ext^1(S_{stalk}, P_{projective}) ≠ 0")]
    NotSelfInjective { stalk: usize, projective: usize },
    #[error("object {0} has no local endomorphism ring, so there is no stalk module")]
    NotLocal(usize),
    #[error("invalid module data: {0}")]
    Invalid(String),
    #[error("maps are not composable")]
    NotComposable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("window [{lo}, {hi}] must contain [-1, 1]")]
    WindowTooSmall { lo: i64, hi: i64 },
    #[error("degree {degree} is outside the available range of the resolution")]
    EdgeDegree { degree: i64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error("resolutions do not share a category or window")]
    WindowMismatch,
    #[error("degree {degree} is outside the safe range [{lo}, {hi}]")]
    Unsafe { degree: i64, lo: i64, hi: i64 },
    #[error("{what} is rank deficient in degree {degree}")]
    RankDeficient { what: String, degree: i64 },
    #[error("{0}")]
    Inconsistent(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("schema violation at {field}: {message}")]
    SchemaViolation { field: String, message: String },
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
