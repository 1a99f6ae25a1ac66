//! Spin-j angular momentum operators from the standard ladder construction,
//! in the basis where Lz is diagonal descending (index 0 holds m = +j).

use super::{Axis, ReprError};
use crate::operator::{commutator, evolve, expectation, Operator, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The Pauli matrices, in the descending-σz basis.
pub fn pauli(axis: char) -> DMatrix<Complex64> {
    let c = Complex64::new;
    match axis {
        'x' => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        'y' => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        'z' => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        other => panic!("unknown Pauli axis {other}"),
    }
}

/// The three angular momentum components for one spin quantum number.
#[derive(Debug, Clone)]
pub struct SpinRepresentation {
    two_j: u32,
    hbar: f64,
    lx: Operator,
    ly: Operator,
    lz: Operator,
}

/// Builds Lx, Ly, Lz for spin `j` (2j a positive integer).
pub fn spin_operators(j: f64, hbar: f64) -> Result<SpinRepresentation, ReprError> {
    let two_j = (2.0 * j).round();
    if two_j < 1.0 || (2.0 * j - two_j).abs() > 1e-9 || !two_j.is_finite() {
        return Err(ReprError::InvalidSpin { j });
    }
    let two_j = two_j as u32;
    let dim = (two_j + 1) as usize;
    let j = two_j as f64 / 2.0;

    // Raising operator in the descending-m basis: ⟨m+1|L+|m⟩ sits one row
    // above the diagonal.
    let mut raise = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 1..dim {
        let m = j - col as f64;
        let amp = hbar * (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        raise[(col - 1, col)] = Complex64::new(amp, 0.0);
    }
    let lower = raise.adjoint();

    let half = Complex64::new(0.5, 0.0);
    let half_over_i = Complex64::new(0.0, -0.5);
    let lx = (&raise + &lower).map(|z| z * half);
    let ly = (&raise - &lower).map(|z| z * half_over_i);
    let mut lz = DMatrix::<Complex64>::zeros(dim, dim);
    for row in 0..dim {
        lz[(row, row)] = Complex64::new(hbar * (j - row as f64), 0.0);
    }

    let rep = SpinRepresentation {
        two_j,
        hbar,
        lx: Operator::hermitian(lx, hbar).expect("Lx Hermitian by construction"),
        ly: Operator::hermitian(ly, hbar).expect("Ly Hermitian by construction"),
        lz: Operator::hermitian(lz, hbar).expect("Lz Hermitian by construction"),
    };
    debug_assert!(rep.max_commutator_residual() < 1e-12 * hbar * hbar * (1.0 + j * j));
    Ok(rep)
}

impl SpinRepresentation {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        (self.two_j + 1) as usize
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn component(&self, axis: Axis) -> &Operator {
        match axis {
            Axis::X => &self.lx,
            Axis::Y => &self.ly,
            Axis::Z => &self.lz,
        }
    }

    /// Lx² + Ly² + Lz²; equals ħ²j(j+1)·I.
    pub fn casimir(&self) -> Operator {
        self.lx
            .matmul(&self.lx)
            .add(&self.ly.matmul(&self.ly))
            .add(&self.lz.matmul(&self.lz))
            .symmetrized()
    }

    /// Worst residual over the three cyclic commutators [La, Lb] − iħLc.
    pub fn max_commutator_residual(&self) -> f64 {
        let ih = Complex64::new(0.0, self.hbar);
        let cyclic = [
            (&self.lx, &self.ly, &self.lz),
            (&self.ly, &self.lz, &self.lx),
            (&self.lz, &self.lx, &self.ly),
        ];
        cyclic
            .iter()
            .map(|(a, b, c)| {
                commutator(a, b)
                    .expect("same dims")
                    .sub(&c.scale(ih))
                    .norm_inf()
            })
            .fold(0.0f64, f64::max)
    }
}

/// The rotation generator about one axis: R_a = L_a/ħ.
///
/// An additive multiple of the identity would only shift a global phase of
/// every rotated state, so the constant is fixed to zero; the suite checks
/// that the commutation relations leave no other freedom.
pub fn rotation_generator(rep: &SpinRepresentation, axis: Axis) -> Operator {
    let scaled = rep
        .component(axis)
        .matrix()
        .map(|z| z / Complex64::new(rep.hbar(), 0.0));
    Operator::hermitian(scaled, rep.hbar()).expect("scaling preserves Hermiticity")
}

/// exp(−iθ R_a) applied to a state. Since R_a = L_a/ħ, this is spectral
/// evolution under L_a for "time" θ.
pub fn rotate_state(
    rep: &SpinRepresentation,
    axis: Axis,
    theta: f64,
    v: &StateVector,
) -> StateVector {
    evolve(v, rep.component(axis), theta).expect("spin components are Hermitian")
}

/// The expectation triple (⟨Lx⟩, ⟨Ly⟩, ⟨Lz⟩) of a spin state.
pub fn bloch_vector(rep: &SpinRepresentation, v: &StateVector) -> [f64; 3] {
    [
        expectation(&rep.component(Axis::X), v).expect("Hermitian"),
        expectation(&rep.component(Axis::Y), v).expect("Hermitian"),
        expectation(&rep.component(Axis::Z), v).expect("Hermitian"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::eigendecompose;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn rejects_non_half_integer_spin() {
        assert!(spin_operators(0.7, 1.0).is_err());
        assert!(spin_operators(0.0, 1.0).is_err());
    }

    #[test]
    fn spin_half_matches_pauli_convention() {
        let rep = spin_operators(0.5, 1.0).unwrap();
        let half = Complex64::new(0.5, 0.0);
        for (axis, label) in [(Axis::X, 'x'), (Axis::Y, 'y'), (Axis::Z, 'z')] {
            let expect = pauli(label).map(|z| z * half);
            let diff = (rep.component(axis).matrix() - expect)
                .iter()
                .map(|z| z.norm())
                .fold(0.0f64, f64::max);
            assert!(diff < 1e-15, "axis {label} deviates by {diff}");
        }
        // Lz diagonal descending.
        assert_relative_eq!(rep.component(Axis::Z).matrix()[(0, 0)].re, 0.5);
        assert_relative_eq!(rep.component(Axis::Z).matrix()[(1, 1)].re, -0.5);
    }

    #[test]
    fn tilted_component_has_sqrt_half_outcomes() {
        let rep = spin_operators(0.5, 1.0).unwrap();
        let sum = rep.component(Axis::X).add(rep.component(Axis::Z)).symmetrized();
        let spec = eigendecompose(&sum, 1e-9).unwrap();
        let expect = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(spec.eigenvalues[0], -expect, epsilon = 1e-12);
        assert_relative_eq!(spec.eigenvalues[1], expect, epsilon = 1e-12);
    }

    #[test]
    fn casimir_at_spin_one() {
        // j = 1: Lx² + Ly² + Lz² = j(j+1)ħ²·I = 2ħ²·I.
        let rep = spin_operators(1.0, 1.0).unwrap();
        let casimir = rep.casimir();
        let expect = Operator::identity(3, 1.0).scale(Complex64::new(2.0, 0.0));
        assert!(casimir.sub(&expect).norm_inf() < 1e-12);
    }

    #[test]
    fn rotation_generator_commutators() {
        // [R_z, Lx] = iLy.
        let rep = spin_operators(1.5, 1.0).unwrap();
        let rz = rotation_generator(&rep, Axis::Z);
        let lhs = commutator(&rz, rep.component(Axis::X)).unwrap();
        let rhs = rep.component(Axis::Y).scale(Complex64::new(0.0, 1.0));
        assert!(lhs.sub(&rhs).norm_inf() < 1e-12);
    }

    #[test]
    fn spinor_double_cover() {
        // exp(−i·2π·R_z) = −I at j = 1/2: a full turn flips the spinor sign.
        let rep = spin_operators(0.5, 1.0).unwrap();
        let v = StateVector::normalized(DVector::from_vec(vec![
            Complex64::new(0.6, 0.1),
            Complex64::new(0.2, -0.7),
        ]))
        .unwrap();
        let rotated = rotate_state(&rep, Axis::Z, 2.0 * std::f64::consts::PI, &v);
        let flipped = v.amplitudes().map(|z| -z);
        assert!((rotated.amplitudes() - flipped).norm() < 1e-12);
    }
}
