//! Engine for average-value correspondence between classical measurement
//! arrangements and quantum operators.
//!
//! The crate is organized around five layers:
//!
//! - [`operator`]: dense complex operators, states, spectra, evolution, and
//!   projective sampling.
//! - [`symbolic`]: noncommutative polynomials over observable symbols,
//!   simplicity classification, normal ordering, Poisson brackets, and
//!   rule-based transcription to operators.
//! - [`repr`]: concrete families — spin-j angular momentum, periodic-grid
//!   position/momentum/displacement, SO(3) rotations, tensor lifts.
//! - [`arrangement`]: classical measurement arrangements, their quantum
//!   counterparts with copy assignment, analytic and Monte Carlo outputs, and
//!   the average-value representability test.
//! - [`verify`]: the executable check suite and the inconsistency demos.

pub mod arrangement;
pub mod operator;
pub mod repr;
pub mod scalar;
pub mod scenario;
pub mod symbolic;
pub mod verify;

pub use operator::{Operator, OperatorError, Spectrum, StateVector};
pub use scalar::Scalar;
pub use symbolic::{CommutationContext, NCPolynomial, ObservableSymbol, SymbolicError};
