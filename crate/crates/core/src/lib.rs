//! Exact integer machinery for one-dimensional integral self-similar tiles
//! `T(b, D)`.
//!
//! The crate decides whether a digit set tiles, extracts the skew-product
//! structure of its digit expansions, and builds the cyclotomic and
//! Hadamard-triple data that certify spectrality at every finite level.
//! Everything on the decision path is exact: integers are checked, and
//! polynomial divisibility is decided by division over `Z[x]`.
//!
//! Polynomial and rational arithmetic is generic over the scalar type (see
//! [`poly::Polynomial`] and [`spectral::unitarity_residual`]); the aliases
//! below fix the concrete types used throughout the rest of the crate.

pub mod arith;
pub mod cyclotomic;
pub mod digits;
pub mod error;
pub mod geometry;
pub mod periodic;
pub mod poly;
pub mod skewform;
pub mod spectral;
pub mod tiling;

pub use error::{Error, Result};

/// Exact rational number with 64-bit numerator and denominator.
pub type Rational = num_rational::Ratio<i64>;

/// Integer polynomial with 64-bit coefficients.
pub type IntPolynomial = poly::Polynomial<i64>;

/// Integer polynomial with 128-bit coefficients, for cross-checks with large
/// intermediate values.
pub type WidePolynomial = poly::Polynomial<i128>;

pub use cyclotomic::{PrimePowerSupport, RationalSpectrum};
pub use digits::{DigitSet, ExpandedDigits, Normalized};
pub use geometry::IntervalUnion;
pub use periodic::PeriodicSet;
pub use skewform::SkewDecomposition;
pub use spectral::{AnLaiReport, HadamardTriple};
pub use tiling::{CarryAutomaton, ReplicatingChain, TileWitness};
