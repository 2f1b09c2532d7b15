//! Certified bounds on the best one-round randomized 2-coloring of directed
//! cycles.
//!
//! A one-round algorithm maps the random values `(a, b, c)` of a node's
//! predecessor, itself and its successor to a color. Its quality `p(f)` is
//! the probability that an edge is monochromatic. Colorings of the normal De
//! Bruijn graph give algorithms (upper bounds on the optimum `p*`); every
//! algorithm induces colorings of the distinct De Bruijn graph (so cut bounds
//! there are lower bounds on `p*`).
//!
//! * [`model`] – algorithm families and grid discretization.
//! * [`debruijn`] – the graphs, colorings and exact cut accounting.
//! * [`evaluate`] – exact, Monte Carlo and bracketed evaluation of `p(f)`.
//! * [`optimize`] – searches for good colorings; upper [`BoundRecord`]s.
//! * [`certify`] – pentagon and SDP dual certificates; lower bound records.
//! * [`simulate`] – running algorithms on actual cycles.
//! * [`ledger`] – the append-only record of bounds, checked on every append.

pub mod algofile;
pub mod certify;
pub mod debruijn;
pub mod error;
pub mod evaluate;
pub mod figures;
pub mod ledger;
pub mod model;
pub mod optimize;
pub mod rng;
pub mod scalar;
pub mod simulate;

pub use error::{Error, Result};
pub use optimize::{BoundKind, BoundRecord};

/// Exact rational used for every certified number.
pub type Rational = num_rational::BigRational;

/// Threshold algorithm with exact rational cuts.
pub type ExactThreshold = model::ThresholdAlgorithm<Rational>;
/// Threshold algorithm with floating-point cuts (Monte Carlo only).
pub type FloatThreshold = model::ThresholdAlgorithm<f64>;
/// Exact `LDLᵀ` factorization.
pub type ExactLdl = certify::ldl::Ldl<Rational>;
/// Floating-point `LDLᵀ` factorization, used as a quick pre-check.
pub type FloatLdl = certify::ldl::Ldl<f64>;
