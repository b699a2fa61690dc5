//! Mass-action chemical reaction networks: structure, dynamics, complex
//! balancing and linear conjugacy between networks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balance;
pub mod conjugacy;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod report;
pub mod scalar;
pub mod search;
pub mod structure;

pub use error::{ConjugacyError, DynamicsError, ModelError, ParseError, SearchError, StructureError};
pub use model::{Complex, Network, Reaction, SpeciesTable};

/// Exact arbitrary-precision rational used for rate constants and every
/// feasibility decision.
pub type Rational = num_rational::BigRational;

pub type ExactMatrix = linalg::Matrix<Rational>;
pub type FloatMatrix = linalg::Matrix<f64>;
pub type ExactLp = lp::LinearProgram<Rational>;

pub type OdeSystem64 = dynamics::OdeSystem<f64>;
pub type OdeSystem32 = dynamics::OdeSystem<f32>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
