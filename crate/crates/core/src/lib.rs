//! Exact environment derivatives for first-passage percolation with two-valued
//! passage times on finite lattice boxes.
//!
//! The library computes passage times and geodesic structure, derivatives `∂_S f`
//! of any order, the two-lane extremal family, exhaustive and randomized searches
//! for extremal derivative values, and the exact variance decomposition.
//!
//! Computations are generic over an exact integer [`Weight`] for passage times and
//! a floating [`Real`] for probabilities; the aliases below fix `i64` and `f64`.

pub mod combinatorics;
pub mod derivative;
pub mod error;
pub mod extremes;
pub mod lanes;
pub mod lattice;
pub mod passage;
pub mod scalar;
pub mod variance;

pub use error::{Error, Result};
pub use scalar::{Real, Weight};

/// Passage-time scalar used by the CLI.
pub type Time = i64;
/// Exact normalized derivative `∂_S f / (b − a)`.
pub type Normalized = num_rational::Ratio<Time>;

pub type Spec = lattice::LatticeSpec<Time>;
pub type Lattice = lattice::Lattice<Time>;
pub type Dag = passage::GeodesicDag<Time>;
pub type Derivative = derivative::DerivativeValue<Time>;
pub type Table = derivative::HypercubeTable<Time>;
pub type Embedded = lanes::EmbeddedLanes<Time>;

pub type Report = extremes::ExtremeReport<Time>;
pub type Moments = variance::Moments<f64>;
pub type Decomposition = variance::DecompositionReport<f64>;
pub type TalagrandTerms = variance::TalagrandTerms<f64>;
