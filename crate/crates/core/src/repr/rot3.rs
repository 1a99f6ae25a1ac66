//! Classical SO(3) rotation matrices.

use super::Axis;
use nalgebra::Matrix3;

/// A right-handed rotation about one coordinate axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix3 {
    mat: Matrix3<f64>,
    axis: Axis,
    angle: f64,
}

/// Standard right-handed rotation matrix about `axis` by `angle`.
pub fn so3_rotation(axis: Axis, angle: f64) -> RotationMatrix3 {
    let (s, c) = angle.sin_cos();
    let mat = match axis {
        Axis::X => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        Axis::Y => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        Axis::Z => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    };
    let r = RotationMatrix3 { mat, axis, angle };
    debug_assert!(r.orthogonality_deviation() < 1e-12);
    r
}

impl RotationMatrix3 {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.mat
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let out = self.mat * nalgebra::Vector3::new(v[0], v[1], v[2]);
        [out[0], out[1], out[2]]
    }

    /// Max deviation of RᵀR from I together with |det − 1|.
    pub fn orthogonality_deviation(&self) -> f64 {
        let gram = self.mat.transpose() * self.mat;
        let eye = Matrix3::identity();
        let ortho = (gram - eye).abs().max();
        ortho.max((self.mat.determinant() - 1.0).abs())
    }
}

/// ‖(Rx(ε)Ry(ε) − Ry(ε)Rx(ε)) − (Rz(ε²) − I)‖, the residual of the group
/// identity that seeds the angular-momentum commutators; it is O(ε³).
pub fn rotation_group_identity_residual(eps: f64) -> f64 {
    let rx = so3_rotation(Axis::X, eps);
    let ry = so3_rotation(Axis::Y, eps);
    let rz2 = so3_rotation(Axis::Z, eps * eps);
    let lhs = rx.matrix() * ry.matrix() - ry.matrix() * rx.matrix();
    let rhs = rz2.matrix() - Matrix3::identity();
    (lhs - rhs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_angle_is_identity() {
        let r = so3_rotation(Axis::Y, 0.0);
        assert_eq!(*r.matrix(), Matrix3::identity());
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = so3_rotation(Axis::Z, std::f64::consts::FRAC_PI_2);
        let out = r.apply([1.0, 0.0, 0.0]);
        assert!((out[0]).abs() < 1e-15);
        assert!((out[1] - 1.0).abs() < 1e-15);
        assert!((out[2]).abs() < 1e-15);
    }

    #[test]
    fn group_identity_residual_is_cubic() {
        let r1 = rotation_group_identity_residual(1e-2);
        let r2 = rotation_group_identity_residual(1e-3);
        assert!(r1 < 1e-5);
        // One decade in ε should shrink the residual by about three decades.
        let order = (r1 / r2).log10();
        assert!((order - 3.0).abs() < 0.2, "measured order {order}");
    }
}
