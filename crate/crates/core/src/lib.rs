//! Median shapes of integer chains on finite simplicial complexes.
//!
//! The crate assembles the multiscale flat norm and median-shape linear
//! programs over a simplicial complex, solves them with an exact rational
//! simplex method and certifies integrality of the optimum. It also carries
//! the supporting total-unimodularity tools and an edge-colored multigraph
//! toolkit for cozy/comfortable graphs.
//!
//! Geometry is generic over [`scalar::Real`] (`f32`, `f64`); linear programs
//! are generic over [`scalar::LpScalar`] (exact [`Rational`] or `f64`). The
//! aliases below fix the usual choices.

pub mod chain;
pub mod complex;
pub mod cozy;
pub mod error;
pub mod flatnorm;
pub mod io;
pub mod lp;
pub mod median;
pub mod scalar;
pub mod tu;

pub use chain::Chain;
pub use complex::{BoundaryMatrix, SimplicialComplex};
pub use cozy::EdgeColoredGraph;
pub use flatnorm::{flat_norm, FlatNormDecomposition};
pub use median::{solve_median, MedianProblem, MedianSolution};
pub use scalar::{rationalize, LpScalar, Real};
pub use tu::IntMatrix;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Complex with double-precision coordinates.
pub type Complex = SimplicialComplex<f64>;
/// Single-precision complex.
pub type Complex32 = SimplicialComplex<f32>;

pub type ExactLp = lp::StandardFormLp<Rational>;
pub type ExactLpSolution = lp::LpSolution<Rational>;
pub type FloatLp = lp::StandardFormLp<f64>;
pub type ExactMedianSolution = median::MedianSolution<Rational>;

/// Default number of significant digits used when turning volumes and
/// parameters into rationals.
pub const DEFAULT_SIG_DIGITS: u32 = 12;
