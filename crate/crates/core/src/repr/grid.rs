//! Position, momentum, and displacement operators on a periodic grid.
//!
//! Momentum is spectral: diagonal in the discrete Fourier basis with exact
//! eigenvalues ħk, so it is exactly Hermitian and free evolution translates
//! wavepackets without discretization drift. Canonical-commutator statements
//! on this grid are expectation statements over interior wavepackets; the
//! strict operator identity cannot hold in finite dimension.

use super::ReprError;
use crate::operator::{Operator, Spectrum, StateVector};
use crate::symbolic::phase_space::PhaseSpacePolynomial;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct GridRepresentation {
    n: usize,
    length: f64,
    hbar: f64,
    dx: f64,
    /// Signed wavenumber k_m = 2π·s(m)/L indexed by the raw DFT index m.
    freqs: Vec<f64>,
    x: Operator,
    p: Operator,
    d: Operator,
}

/// Builds the grid operators for `n` points (power of two ≥ 8) on a box of
/// the given length.
pub fn grid_representation(n: usize, length: f64, hbar: f64) -> Result<GridRepresentation, ReprError> {
    if n < 8 || !n.is_power_of_two() {
        return Err(ReprError::InvalidGrid { n });
    }
    assert!(length > 0.0 && hbar > 0.0);
    let dx = length / n as f64;

    let freqs: Vec<f64> = (0..n)
        .map(|m| {
            let s = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            2.0 * PI * s / length
        })
        .collect();

    // Circulant kernel K_d = (1/n) Σ_m k_m e^{2πi m d / n}. Only half is
    // computed; the other half is set to the exact conjugate so the matrix
    // is Hermitian bitwise.
    let mut kernel = vec![Complex64::new(0.0, 0.0); n];
    for (d, slot) in kernel.iter_mut().enumerate().take(n / 2 + 1) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &k) in freqs.iter().enumerate() {
            let phase = 2.0 * PI * (m * d % n) as f64 / n as f64;
            acc += Complex64::new(phase.cos(), phase.sin()) * k;
        }
        *slot = acc / n as f64;
    }
    for d in (n / 2 + 1)..n {
        kernel[d] = kernel[n - d].conj();
    }

    let mut d_mat = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            d_mat[(j, l)] = kernel[(n + j - l) % n];
        }
    }
    // p = ħ·D entrywise; at ħ = 1 the two matrices are identical bitwise,
    // which makes D = p/ħ and [p, D] = 0 exact.
    let p_mat = d_mat.map(|z| z * hbar);

    let x_values: Vec<f64> = (0..n).map(|j| j as f64 * dx).collect();

    Ok(GridRepresentation {
        n,
        length,
        hbar,
        dx,
        freqs,
        x: Operator::from_real_diagonal(&x_values, hbar),
        p: Operator::hermitian(p_mat, hbar).expect("spectral momentum is Hermitian bitwise"),
        d: Operator::hermitian(d_mat, hbar).expect("displacement generator is Hermitian bitwise"),
    })
}

impl GridRepresentation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn position(&self) -> &Operator {
        &self.x
    }

    pub fn momentum(&self) -> &Operator {
        &self.p
    }

    /// The displacement generator D = p/ħ.
    pub fn displacement(&self) -> &Operator {
        &self.d
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Exact spectrum of the momentum operator: eigenvalues ħk ascending,
    /// eigenvectors the matching Fourier columns.
    pub fn momentum_spectrum(&self) -> Spectrum {
        self.scaled_momentum_spectrum(1.0)
    }

    /// Spectrum of `factor·p`, still assembled analytically.
    pub fn scaled_momentum_spectrum(&self, factor: f64) -> Spectrum {
        let n = self.n;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let ka = factor * self.freqs[a];
            let kb = factor * self.freqs[b];
            ka.partial_cmp(&kb).unwrap()
        });
        let eigenvalues: Vec<f64> = order
            .iter()
            .map(|&m| factor * self.hbar * self.freqs[m])
            .collect();
        let mut eigenvectors = DMatrix::<Complex64>::zeros(n, n);
        let norm = 1.0 / (n as f64).sqrt();
        for (col, &m) in order.iter().enumerate() {
            for j in 0..n {
                let phase = 2.0 * PI * (m * j % n) as f64 / n as f64;
                eigenvectors[(j, col)] = Complex64::new(phase.cos(), phase.sin()) * norm;
            }
        }
        let gap = 2.0 * PI * self.hbar * factor.abs() / self.length;
        Spectrum::from_parts(eigenvalues, eigenvectors, 1e-9 * gap.max(1e-30), self.hbar)
    }

    /// Normalized plane wave e^{ikx} for the raw DFT index `m`; an exact
    /// eigenstate of the momentum operator with eigenvalue ħk_m.
    pub fn plane_wave(&self, m: usize) -> StateVector {
        let n = self.n;
        let norm = 1.0 / (n as f64).sqrt();
        let v = DVector::from_iterator(
            n,
            (0..n).map(|j| {
                let phase = 2.0 * PI * (m * j % n) as f64 / n as f64;
                Complex64::new(phase.cos(), phase.sin()) * norm
            }),
        );
        StateVector::new(v).expect("plane wave is normalized")
    }

    pub fn frequency(&self, m: usize) -> f64 {
        self.freqs[m]
    }

    /// Fourier coefficients c_m = (1/√n) Σ_j e^{−2πimj/n} ψ_j.
    fn fourier_coeffs(&self, v: &StateVector) -> Vec<Complex64> {
        let n = self.n;
        let norm = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let phase = -2.0 * PI * (m * j % n) as f64 / n as f64;
                    acc += Complex64::new(phase.cos(), phase.sin()) * v.amplitudes()[j];
                }
                acc * norm
            })
            .collect()
    }

    fn inverse_fourier(&self, coeffs: &[Complex64]) -> DVector<Complex64> {
        let n = self.n;
        let norm = 1.0 / (n as f64).sqrt();
        DVector::from_iterator(
            n,
            (0..n).map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, c) in coeffs.iter().enumerate() {
                    let phase = 2.0 * PI * (m * j % n) as f64 / n as f64;
                    acc += Complex64::new(phase.cos(), phase.sin()) * c;
                }
                acc * norm
            }),
        )
    }

    /// exp(−iε D) ψ: translation by ε, applied in the Fourier basis.
    pub fn translate(&self, v: &StateVector, eps: f64) -> StateVector {
        let mut coeffs = self.fourier_coeffs(v);
        for (m, c) in coeffs.iter_mut().enumerate() {
            let phase = -eps * self.freqs[m];
            *c *= Complex64::new(phase.cos(), phase.sin());
        }
        StateVector::normalized(self.inverse_fourier(&coeffs)).expect("unitary translation")
    }

    /// Normalized Gaussian wavepacket exp(−(x−c)²/(2w²) + ik₀(x−c)).
    pub fn gaussian(&self, center: f64, width: f64, momentum: f64) -> StateVector {
        assert!(width > 0.0, "wavepacket width must be positive");
        let v = DVector::from_iterator(
            self.n,
            (0..self.n).map(|j| {
                let x = self.grid_point(j) - center;
                let envelope = (-x * x / (2.0 * width * width)).exp();
                let phase = momentum * x;
                Complex64::new(phase.cos(), phase.sin()) * envelope
            }),
        );
        StateVector::normalized(v).expect("Gaussian envelope is nonzero")
    }

    /// Largest amplitude magnitude at the two box edges; the interior-support
    /// precondition requires this below 1e-12.
    pub fn boundary_leak(&self, v: &StateVector) -> f64 {
        let amps = v.amplitudes();
        amps[0].norm().max(amps[self.n - 1].norm())
    }
}

/// One member of the documented wavepacket family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
}

/// The documented Gaussian family used by the grid checks: centers at the
/// base center and ±L/32 around it, widths at the base width and 3/4 of it,
/// carrier momenta 0 and ±8·(2π/L). All members keep boundary amplitudes
/// below 1e-12 for the default center L/2 and width L/16.
pub fn standard_wavepacket_family(length: f64, center: f64, width: f64) -> Vec<WavepacketSpec> {
    let mut family = Vec::new();
    let k_unit = 2.0 * PI / length;
    for dc in [-length / 32.0, 0.0, length / 32.0] {
        for w in [width, 0.75 * width] {
            for k in [0.0, 8.0 * k_unit, -8.0 * k_unit] {
                family.push(WavepacketSpec {
                    center: center + dc,
                    width: w,
                    momentum: k,
                });
            }
        }
    }
    family
}

/// Kinetic momentum m·ẋ = p − e·A(x) for a vector potential A given as a
/// polynomial in the position coordinate. A(x̂) is diagonal, so the result
/// differs from p only on the diagonal and stays exactly Hermitian.
pub fn minimal_coupling_momentum(
    grid: &GridRepresentation,
    vector_potential: &PhaseSpacePolynomial,
    charge: f64,
    position_var: &str,
) -> Result<Operator, ReprError> {
    if !vector_potential.is_univariate_in(position_var) {
        return Err(ReprError::PotentialNotUnivariate {
            expected: position_var.to_string(),
        });
    }
    let mut mat = grid.momentum().matrix().clone();
    for j in 0..grid.n() {
        let a_x = vector_potential.eval_single(position_var, grid.grid_point(j), grid.hbar());
        mat[(j, j)] -= Complex64::new(charge, 0.0) * a_x;
    }
    Operator::hermitian(mat, grid.hbar()).map_err(|_| ReprError::PotentialNotUnivariate {
        expected: position_var.to_string(),
    })
}
