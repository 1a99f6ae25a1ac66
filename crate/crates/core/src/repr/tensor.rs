//! Tensor-product composition for subsystem measurements.

use super::ReprError;
use crate::operator::{Operator, StateVector};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Lifts `a` into slot `slot` of a composite system: I ⊗ … ⊗ a ⊗ … ⊗ I.
/// Operators lifted into distinct slots commute exactly.
pub fn tensor_lift(a: &Operator, slot: usize, dims: &[usize]) -> Result<Operator, ReprError> {
    if slot >= dims.len() || dims[slot] != a.dim() {
        return Err(ReprError::SlotMismatch {
            slot,
            expected: dims.get(slot).copied().unwrap_or(0),
            actual: a.dim(),
        });
    }
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for (s, &d) in dims.iter().enumerate() {
        let factor = if s == slot {
            a.matrix().clone()
        } else {
            DMatrix::identity(d, d)
        };
        out = out.kronecker(&factor);
    }
    Ok(if a.is_hermitian_kind() {
        Operator::hermitian(out, a.hbar()).expect("kron with identities preserves Hermiticity")
    } else {
        Operator::general(out, a.hbar())
    })
}

/// Tensor product of pure states, v ⊗ w ⊗ …
pub fn product_state(states: &[StateVector]) -> StateVector {
    assert!(!states.is_empty());
    let mut out = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for s in states {
        out = out.kronecker(s.amplitudes());
    }
    StateVector::new(out).expect("product of unit vectors is a unit vector")
}
