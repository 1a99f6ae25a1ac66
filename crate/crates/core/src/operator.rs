//! Dense complex operators, pure states, spectra, and projective measurement.
//!
//! Everything is immutable after construction and every operation is a pure
//! function. Spectral decomposition is the single primitive used for
//! functions of operators, time evolution, and outcome sampling; dimensions
//! stay small enough that exactness and degeneracy control matter more than
//! speed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Entrywise tolerance for the Hermiticity / unitarity invariants.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Norm tolerance below which a projected post-measurement state is treated
/// as numerically impossible.
pub const ZERO_PROJECTION_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("hbar scale mismatch: {left} vs {right}")]
    HbarMismatch { left: f64, right: f64 },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("projection onto the drawn eigenspace has norm {norm:.3e}; outcome numerically impossible")]
    ZeroProjection { norm: f64 },
    #[error("expectation value has imaginary part {imag:.3e}")]
    ImaginaryExpectation { imag: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    General,
}

/// A dense complex square matrix tagged with its structural role and the ħ
/// scale it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
    kind: OperatorKind,
    hbar: f64,
}

impl Operator {
    /// Wraps a matrix asserted Hermitian; fails fast if it is not.
    pub fn hermitian(mat: DMatrix<Complex64>, hbar: f64) -> Result<Self, OperatorError> {
        assert!(mat.is_square(), "operator matrix must be square");
        assert!(hbar > 0.0, "hbar must be positive");
        let deviation = hermitian_deviation(&mat);
        if deviation > STRUCTURE_TOL {
            return Err(OperatorError::NotHermitian { deviation });
        }
        Ok(Self {
            mat,
            kind: OperatorKind::Hermitian,
            hbar,
        })
    }

    /// Wraps a matrix asserted unitary; fails fast if U†U deviates from I.
    pub fn unitary(mat: DMatrix<Complex64>, hbar: f64) -> Result<Self, OperatorError> {
        assert!(mat.is_square(), "operator matrix must be square");
        assert!(hbar > 0.0, "hbar must be positive");
        let prod = mat.adjoint() * &mat;
        let eye = DMatrix::<Complex64>::identity(mat.nrows(), mat.ncols());
        let deviation = (&prod - &eye)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        if deviation > STRUCTURE_TOL {
            return Err(OperatorError::NotUnitary { deviation });
        }
        Ok(Self {
            mat,
            kind: OperatorKind::Unitary,
            hbar,
        })
    }

    pub fn general(mat: DMatrix<Complex64>, hbar: f64) -> Self {
        assert!(mat.is_square(), "operator matrix must be square");
        assert!(hbar > 0.0, "hbar must be positive");
        Self {
            mat,
            kind: OperatorKind::General,
            hbar,
        }
    }

    /// Real diagonal matrix, Hermitian by construction.
    pub fn from_real_diagonal(diag: &[f64], hbar: f64) -> Self {
        let n = diag.len();
        let mut mat = DMatrix::<Complex64>::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(d, 0.0);
        }
        Self {
            mat,
            kind: OperatorKind::Hermitian,
            hbar,
        }
    }

    pub fn identity(dim: usize, hbar: f64) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
            kind: OperatorKind::Hermitian,
            hbar,
        }
    }

    pub fn zeros(dim: usize, hbar: f64) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
            kind: OperatorKind::Hermitian,
            hbar,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn is_hermitian_kind(&self) -> bool {
        self.kind == OperatorKind::Hermitian
    }

    /// Largest entry magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            kind: self.kind,
            hbar: self.hbar,
        }
    }

    /// Matrix product; panics on dimension or scale mismatch (callers check).
    pub fn matmul(&self, other: &Self) -> Self {
        self.compatible(other).expect("matmul operand mismatch");
        Self::general(&self.mat * &other.mat, self.hbar)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.compatible(other).expect("add operand mismatch");
        Self::general(&self.mat + &other.mat, self.hbar)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.compatible(other).expect("sub operand mismatch");
        Self::general(&self.mat - &other.mat, self.hbar)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::general(self.mat.map(|z| z * factor), self.hbar)
    }

    /// Integer matrix power by repeated multiplication.
    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        for _ in 0..exponent {
            out = out * &self.mat;
        }
        Self::general(out, self.hbar)
    }

    /// Symmetrizes `(M + M†)/2` and re-tags as Hermitian. The average is
    /// Hermitian bitwise, so the invariant check cannot fail.
    pub fn symmetrized(&self) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let sym = (&self.mat + self.mat.adjoint()).map(|z| z * half);
        Self {
            mat: sym,
            kind: OperatorKind::Hermitian,
            hbar: self.hbar,
        }
    }

    /// Revalidates the Hermitian invariant on the stored entries.
    pub fn into_hermitian(self) -> Result<Self, OperatorError> {
        Self::hermitian(self.mat, self.hbar)
    }

    pub fn compatible(&self, other: &Self) -> Result<(), OperatorError> {
        if self.dim() != other.dim() {
            return Err(OperatorError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.hbar != other.hbar {
            return Err(OperatorError::HbarMismatch {
                left: self.hbar,
                right: other.hbar,
            });
        }
        Ok(())
    }

    /// Default eigenvalue-clustering tolerance, scaled to the operator.
    pub fn default_degeneracy_tol(&self) -> f64 {
        1e-9 * f64::max(1.0, self.norm_fro())
    }
}

fn hermitian_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let n = mat.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A unit-norm complex vector: a pure quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes already normalized to unit Euclidean norm.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self, OperatorError> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(OperatorError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary amplitudes; fails on the zero vector.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self, OperatorError> {
        let norm = amplitudes.norm();
        if norm < ZERO_PROJECTION_TOL {
            return Err(OperatorError::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// ⟨self | other⟩ with the left argument conjugated.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Overlap probability |⟨self|other⟩|².
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Ascending eigenvalues, orthonormal eigenvector columns, and the grouping
/// of indices into eigenspaces at a given degeneracy tolerance.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
    pub eigenspaces: Vec<Vec<usize>>,
    hbar: f64,
}

impl Spectrum {
    /// Assembles a spectrum from eigenpairs known analytically. Eigenvalues
    /// must already be ascending with matching eigenvector columns.
    pub fn from_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<Complex64>,
        degeneracy_tol: f64,
        hbar: f64,
    ) -> Self {
        debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let eigenspaces = group_eigenspaces(&eigenvalues, degeneracy_tol);
        Self {
            eigenvalues,
            eigenvectors,
            eigenspaces,
            hbar,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn eigenvector(&self, index: usize) -> DVector<Complex64> {
        self.eigenvectors.column(index).into_owned()
    }

    /// Representative measured value of an eigenspace (mean of its cluster).
    pub fn eigenspace_value(&self, group: usize) -> f64 {
        let idx = &self.eigenspaces[group];
        idx.iter().map(|&i| self.eigenvalues[i]).sum::<f64>() / idx.len() as f64
    }

    /// Born probability of each eigenspace in the given state.
    pub fn eigenspace_probabilities(&self, v: &StateVector) -> Vec<f64> {
        self.eigenspaces
            .iter()
            .map(|group| {
                group
                    .iter()
                    .map(|&i| self.eigenvectors.column(i).dotc(v.amplitudes()).norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Normalized projection of `v` onto one eigenspace.
    pub fn project(&self, group: usize, v: &StateVector) -> Result<StateVector, OperatorError> {
        let mut w = DVector::<Complex64>::zeros(self.dim());
        for &i in &self.eigenspaces[group] {
            let col = self.eigenvectors.column(i);
            let coeff = col.dotc(v.amplitudes());
            w.axpy(coeff, &col.into_owned(), Complex64::new(1.0, 0.0));
        }
        let norm = w.norm();
        if norm < ZERO_PROJECTION_TOL {
            return Err(OperatorError::ZeroProjection { norm });
        }
        Ok(StateVector {
            amplitudes: w / Complex64::new(norm, 0.0),
        })
    }

    /// Applies `f` to the spectrum: Σ f(λ_i) |v_i⟩⟨v_i| acting on `v`.
    pub fn apply_function(&self, v: &StateVector, f: impl Fn(f64) -> Complex64) -> DVector<Complex64> {
        let coeffs = self.eigenvectors.adjoint() * v.amplitudes();
        let scaled = DVector::from_iterator(
            self.dim(),
            coeffs
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(c, &lam)| c * f(lam)),
        );
        &self.eigenvectors * scaled
    }
}

fn group_eigenspaces(eigenvalues: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &lam) in eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(group) if (lam - eigenvalues[*group.last().unwrap()]).abs() <= tol => {
                group.push(i);
            }
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Result of one projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub outcome_index: usize,
    pub value: f64,
    pub probability: f64,
    pub post_state: StateVector,
}

/// AB − BA. Anti-Hermitian whenever both inputs are Hermitian.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator, OperatorError> {
    a.compatible(b)?;
    let mat = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(Operator::general(mat, a.hbar()))
}

/// ⟨v|A|v⟩ for Hermitian A; the imaginary part is checked and discarded.
pub fn expectation(a: &Operator, v: &StateVector) -> Result<f64, OperatorError> {
    if !a.is_hermitian_kind() {
        return Err(OperatorError::NotHermitian {
            deviation: hermitian_deviation(a.matrix()),
        });
    }
    if a.dim() != v.dim() {
        return Err(OperatorError::DimensionMismatch {
            left: a.dim(),
            right: v.dim(),
        });
    }
    let av = a.matrix() * v.amplitudes();
    let value = v.amplitudes().dotc(&av);
    if value.im.abs() >= 1e-10 {
        return Err(OperatorError::ImaginaryExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// Expectation without the Hermitian-kind gate, returned as a complex number.
/// Used where anti-Hermitian combinations such as commutators are probed.
pub fn expectation_complex(a: &Operator, v: &StateVector) -> Complex64 {
    let av = a.matrix() * v.amplitudes();
    v.amplitudes().dotc(&av)
}

/// Full eigendecomposition of a Hermitian operator, with eigenvalues within
/// `degeneracy_tol` of each other clustered into a single eigenspace.
pub fn eigendecompose(a: &Operator, degeneracy_tol: f64) -> Result<Spectrum, OperatorError> {
    if !a.is_hermitian_kind() {
        return Err(OperatorError::NotHermitian {
            deviation: hermitian_deviation(a.matrix()),
        });
    }
    let eig = a.matrix().clone().symmetric_eigen();
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum::from_parts(
        eigenvalues,
        eigenvectors,
        degeneracy_tol,
        a.hbar(),
    ))
}

/// exp(−iH·dt/ħ)·v computed through the spectral decomposition of H.
pub fn evolve(v: &StateVector, h: &Operator, dt: f64) -> Result<StateVector, OperatorError> {
    let spectrum = eigendecompose(h, h.default_degeneracy_tol())?;
    evolve_with_spectrum(&spectrum, v, dt)
}

/// Same as [`evolve`] with a precomputed spectrum of the Hamiltonian.
pub fn evolve_with_spectrum(
    spectrum: &Spectrum,
    v: &StateVector,
    dt: f64,
) -> Result<StateVector, OperatorError> {
    if spectrum.dim() != v.dim() {
        return Err(OperatorError::DimensionMismatch {
            left: spectrum.dim(),
            right: v.dim(),
        });
    }
    let hbar = spectrum.hbar();
    let out = spectrum.apply_function(v, |lam| {
        let phase = -lam * dt / hbar;
        Complex64::new(phase.cos(), phase.sin())
    });
    let norm = out.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(OperatorError::NotNormalized { norm });
    }
    // Rescale the last few ulps so downstream norm checks never accumulate.
    StateVector::normalized(out)
}

/// Draws one outcome with Born probabilities summed over eigenspaces and
/// collapses the state onto the drawn eigenspace.
pub fn sample_outcome<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    v: &StateVector,
    rng: &mut R,
) -> Result<MeasurementRecord, OperatorError> {
    if spectrum.dim() != v.dim() {
        return Err(OperatorError::DimensionMismatch {
            left: spectrum.dim(),
            right: v.dim(),
        });
    }
    let probs = spectrum.eigenspace_probabilities(v);
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    let mut chosen = probs.len() - 1;
    for (g, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            chosen = g;
            break;
        }
    }
    let post_state = spectrum.project(chosen, v)?;
    Ok(MeasurementRecord {
        outcome_index: chosen,
        value: spectrum.eigenspace_value(chosen),
        probability: probs[chosen],
        post_state,
    })
}

/// Random Hermitian matrix with entries of order one, for tests and probes.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, hbar: f64, rng: &mut R) -> Operator {
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        mat[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            mat[(i, j)] = z;
            mat[(j, i)] = z.conj();
        }
    }
    Operator::hermitian(mat, hbar).expect("Hermitian by construction")
}

/// Haar-ish random pure state (normalized complex Gaussian-free box draw).
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let v = DVector::from_iterator(
            dim,
            (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        );
        if let Ok(state) = StateVector::normalized(v) {
            return state;
        }
    }
}
