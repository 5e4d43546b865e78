use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RationalizeError {
    #[error("cannot rationalize non-finite value {0}")]
    NonFinite(f64),
    #[error("significant digits must be in 1..=30, got {0}")]
    BadPrecision(u32),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("grid dimensions must be positive (got {0})")]
    NonPositiveDimension(String),
    #[error("vertex {vertex} has {got} coordinates, expected {expected}")]
    CoordinateArity { vertex: usize, expected: usize, got: usize },
    #[error("vertex coordinate is not finite at vertex {0}")]
    NonFiniteCoordinate(usize),
    #[error("simplex {simplex:?} declared in dimension {dim} has the wrong vertex count")]
    SimplexArity { dim: usize, simplex: Vec<usize> },
    #[error("simplex {0:?} references a vertex out of range")]
    VertexOutOfRange(Vec<usize>),
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<usize>),
    #[error("duplicate simplex {0:?}")]
    Duplicate(Vec<usize>),
    #[error("face {face:?} of simplex {simplex:?} is missing")]
    MissingFace { simplex: Vec<usize>, face: Vec<usize> },
    #[error("simplex {0:?} is degenerate (zero volume)")]
    Degenerate(Vec<usize>),
    #[error("simplex dimension {dim} exceeds ambient dimension {ambient}")]
    DimensionTooLarge { dim: usize, ambient: usize },
    #[error("boundary index p = {p} out of range for a complex of dimension {dim}")]
    BoundaryOutOfRange { p: usize, dim: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain has {got} coefficients but the complex has {expected} simplices of dimension {dim}")]
    Length { dim: usize, expected: usize, got: usize },
    #[error("the boundary of a 0-chain is undefined")]
    ZeroDimensionalBoundary,
    #[error("chain dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("complex has no simplices of dimension {0}")]
    MissingDimension(usize),
    #[error("polyline needs at least two points")]
    TooFewPoints,
    #[error("point {index} has {got} coordinates, expected {expected}")]
    PointArity { index: usize, expected: usize, got: usize },
    #[error("vertex {to} is unreachable from vertex {from}")]
    Unreachable { from: usize, to: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("simplex iteration cap of {0} reached")]
    IterationLimit(usize),
    #[error("solution is not optimal")]
    NotOptimal,
}

/// Rational vertex solution returned when an optimum is not integral.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalOptimum {
    pub x: Vec<BigRational>,
    pub objective: BigRational,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatNormError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Rationalize(#[from] RationalizeError),
    #[error("lambda must be finite and nonnegative, got {0}")]
    BadLambda(f64),
    #[error("linear program optimum is fractional")]
    Fractional(Box<FractionalOptimum>),
    #[error("search space of {0} candidates exceeds the brute-force guard")]
    SearchTooLarge(f64),
    #[error("linear program unexpectedly reported {0}")]
    Unexpected(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MedianError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    FlatNorm(#[from] FlatNormError),
    #[error(transparent)]
    Rationalize(#[from] RationalizeError),
    #[error("median problem needs at least one input chain")]
    NoInputs,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("{expected} weights expected, got {got}")]
    AlphaCount { expected: usize, got: usize },
    #[error("linear program optimum is fractional")]
    Fractional(Box<FractionalOptimum>),
    #[error("homology constraint violated for input {0}")]
    ConstraintViolation(usize),
    #[error("inputs {0} and {1} do not share a boundary")]
    BoundaryMismatch(usize, usize),
    #[error("difference of inputs {0} and {1} could not be filled at any tried scale")]
    Unfillable(usize, usize),
    #[error("search space of {0} candidates exceeds the brute-force guard")]
    SearchTooLarge(f64),
    #[error("interpolation sweep requires exactly two inputs, got {0}")]
    SweepArity(usize),
    #[error("linear program unexpectedly reported {0}")]
    Unexpected(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TuError {
    #[error("matrix data has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("entry {0} exceeds the magnitude bound of 10")]
    EntryTooLarge(i64),
    #[error("fold count must be at least 1")]
    BadFold,
    #[error("matrix of size {rows}x{cols} exceeds the exhaustive-test guard")]
    TooLarge { rows: usize, cols: usize },
    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("permutation is invalid")]
    BadPermutation,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CozyError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("source and sink must differ")]
    SameEndpoints,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has fewer than two vertices")]
    TooSmall,
    #[error("vertex set has {spines} spines, knitting needs fewer than {k}")]
    TooManySpines { spines: usize, k: usize },
    #[error("knitting did not produce a cozy graph: {0}")]
    KnitNotCozy(String),
    #[error("no cozy graph with k = {k} on {n} vertices")]
    Infeasible { k: usize, n: usize },
    #[error("no connected sample after {0} attempts")]
    ResampleCap(usize),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Tu(#[from] TuError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
