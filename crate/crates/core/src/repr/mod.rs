//! Concrete operator families: spin-j angular momentum, periodic-grid
//! position/momentum/displacement, classical rotation matrices, and
//! tensor-product composition.

pub mod grid;
pub mod rot3;
pub mod spin;
pub mod tensor;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = ReprError;
    fn from_str(s: &str) -> Result<Self, ReprError> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(ReprError::InvalidAxis {
                axis: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReprError {
    #[error("invalid spin {j}: 2j must be a positive integer")]
    InvalidSpin { j: f64 },
    #[error("invalid grid: n = {n} must be a power of two >= 8")]
    InvalidGrid { n: usize },
    #[error("invalid axis '{axis}'")]
    InvalidAxis { axis: String },
    #[error("slot {slot} expects dimension {expected}, operator has {actual}")]
    SlotMismatch {
        slot: usize,
        expected: usize,
        actual: usize,
    },
    #[error("vector potential must be univariate in the position coordinate '{expected}'")]
    PotentialNotUnivariate { expected: String },
}
