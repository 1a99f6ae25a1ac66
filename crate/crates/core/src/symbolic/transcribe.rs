//! Rule-based transcription of simple classical polynomials into Hermitian
//! operators, plus the deliberately inconsistent symmetrized-product rule
//! kept for the inconsistency demonstrations.

use super::{is_simple, CommutationContext, NCPolynomial, Simplicity, SymbolicError};
use crate::operator::{commutator, Operator};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Relative tolerance for the numeric cross-check of declared-commuting
/// pairs, scaled by the operand norms.
pub const COMMUTING_CHECK_TOL: f64 = 1e-9;
/// Tolerance on the Hermiticity of a transcribed matrix.
pub const TRANSCRIBE_HERMITICITY_TOL: f64 = 1e-10;

/// Map from symbol names to operators. All operators must share one
/// dimension and one ħ scale.
#[derive(Debug, Clone, Default)]
pub struct Binding {
    ops: BTreeMap<String, Operator>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, op: Operator) -> Result<(), SymbolicError> {
        if let Some((_, existing)) = self.ops.iter().next() {
            if existing.dim() != op.dim() {
                return Err(SymbolicError::InconsistentBinding(format!(
                    "dimension {} vs {}",
                    existing.dim(),
                    op.dim()
                )));
            }
            if existing.hbar() != op.hbar() {
                return Err(SymbolicError::InconsistentBinding(format!(
                    "hbar {} vs {}",
                    existing.hbar(),
                    op.hbar()
                )));
            }
        }
        self.ops.insert(name.into(), op);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Operator> {
        self.ops.get(name)
    }

    pub fn dim(&self) -> Option<usize> {
        self.ops.values().next().map(|op| op.dim())
    }

    pub fn hbar(&self) -> Option<f64> {
        self.ops.values().next().map(|op| op.hbar())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(|s| s.as_str())
    }
}

/// Numeric commutation residual ‖[A,B]‖ scaled by the operand norms.
pub fn commutation_residual(a: &Operator, b: &Operator) -> f64 {
    let comm = commutator(a, b).expect("bound operators share dim and hbar");
    comm.norm_inf() / f64::max(1.0, a.norm_inf() * b.norm_inf())
}

/// Checks every declared-commuting pair of bound symbols against the actual
/// matrices.
fn cross_check_commuting(
    symbols: &std::collections::BTreeSet<String>,
    ctx: &CommutationContext,
    binding: &Binding,
) -> Result<(), SymbolicError> {
    for (a, b) in ctx.commuting_pairs() {
        if !symbols.contains(a) || !symbols.contains(b) {
            continue;
        }
        let (op_a, op_b) = match (binding.get(a), binding.get(b)) {
            (Some(x), Some(y)) => (x, y),
            _ => continue,
        };
        let residual = commutation_residual(op_a, op_b);
        if residual >= COMMUTING_CHECK_TOL {
            return Err(SymbolicError::BindingMismatch {
                left: a.to_string(),
                right: b.to_string(),
                residual,
            });
        }
    }
    Ok(())
}

fn eval_words(f: &NCPolynomial, binding: &Binding) -> Result<DMatrix<Complex64>, SymbolicError> {
    let dim = binding
        .dim()
        .ok_or_else(|| SymbolicError::InconsistentBinding("empty binding".into()))?;
    let hbar = binding.hbar().expect("nonempty binding has an hbar");
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (word, coeff) in f.terms() {
        let mut term = DMatrix::<Complex64>::identity(dim, dim);
        for sym in word {
            let op = binding
                .get(sym)
                .ok_or_else(|| SymbolicError::UnboundSymbol(sym.clone()))?;
            term *= op.matrix();
        }
        let c = coeff.eval(hbar);
        acc += term.map(|z| z * c);
    }
    Ok(acc)
}

/// Evaluates any polynomial word-by-word at a binding, with no simplicity
/// gate and no Hermiticity claim. Oracles use this to evaluate expressions
/// that transcription would refuse.
pub fn eval_polynomial(f: &NCPolynomial, binding: &Binding) -> Result<Operator, SymbolicError> {
    let mat = eval_words(f, binding)?;
    Ok(Operator::general(
        mat,
        binding.hbar().expect("nonempty binding"),
    ))
}

/// Transcribes a simple polynomial over bound symbols into the operator
/// obtained by word-by-word substitution. Refuses non-simple input with the
/// offending word as witness and cross-checks declared commutation facts
/// against the bound matrices.
pub fn transcribe(
    f: &NCPolynomial,
    ctx: &CommutationContext,
    binding: &Binding,
) -> Result<Operator, SymbolicError> {
    for sym in f.symbols() {
        if !ctx.knows(&sym) {
            return Err(SymbolicError::UnknownSymbol(sym));
        }
        if binding.get(&sym).is_none() {
            return Err(SymbolicError::UnboundSymbol(sym));
        }
    }
    match is_simple(f, ctx)? {
        Simplicity::Simple => {}
        Simplicity::NotSimple { witness } => {
            return Err(SymbolicError::NotSimple { witness });
        }
    }
    cross_check_commuting(&f.symbols(), ctx, binding)?;

    let mat = eval_words(f, binding)?;
    let hbar = binding.hbar().expect("nonempty binding");

    // Simple words contain mutually commuting symbols only, so the result is
    // Hermitian up to roundoff whenever the coefficients are real.
    let scale = f64::max(1.0, mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max));
    let deviation = {
        let adj = mat.adjoint();
        (&mat - adj).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    };
    if deviation > TRANSCRIBE_HERMITICITY_TOL * scale {
        return Err(SymbolicError::NotHermitianResult { deviation });
    }
    Ok(Operator::general(mat, hbar).symmetrized())
}

/// Evaluates a univariate polynomial at one operator (Horner is unnecessary
/// at these sizes; plain powers keep it readable).
pub fn eval_univariate(
    f: &NCPolynomial,
    op: &Operator,
) -> Result<Operator, SymbolicError> {
    let symbols = f.symbols();
    if symbols.len() > 1 {
        return Err(SymbolicError::NotUnivariate(symbols.into_iter().collect()));
    }
    let dim = op.dim();
    let hbar = op.hbar();
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (word, coeff) in f.terms() {
        let c = coeff.eval(hbar);
        let power = op.pow(word.len() as u32);
        acc += power.matrix().map(|z| z * c);
    }
    Ok(Operator::general(acc, hbar))
}

/// The symmetrized product rule ½(f₁(Â)f₂(B̂) + f₂(B̂)f₁(Â)).
///
/// This rule is inconsistent under iteration for non-commuting operators; it
/// is exposed only so the inconsistency demonstrations can exhibit that, and
/// it degenerates to the product rule when the operators commute.
pub fn hermitize(
    f1_of_a: &NCPolynomial,
    f2_of_b: &NCPolynomial,
    a: &Operator,
    b: &Operator,
) -> Result<Operator, SymbolicError> {
    a.compatible(b)
        .map_err(|e| SymbolicError::InconsistentBinding(e.to_string()))?;
    let fa = eval_univariate(f1_of_a, a)?;
    let fb = eval_univariate(f2_of_b, b)?;
    let half = Complex64::new(0.5, 0.0);
    let sym = (fa.matrix() * fb.matrix() + fb.matrix() * fa.matrix()).map(|z| z * half);
    let deviation = {
        let adj = sym.adjoint();
        (&sym - adj).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    };
    let scale = f64::max(1.0, sym.iter().map(|z| z.norm()).fold(0.0f64, f64::max));
    if deviation > TRANSCRIBE_HERMITICITY_TOL * scale {
        return Err(SymbolicError::NotHermitianResult { deviation });
    }
    Ok(Operator::general(sym, a.hbar()).symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eigendecompose, random_hermitian, StateVector};
    use crate::repr::spin::{pauli, spin_operators};
    use crate::repr::Axis;
    use crate::scalar::Scalar;
    use crate::symbolic::{ObservableSymbol, SymbolRole};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spin_binding(j: f64) -> (CommutationContext, Binding) {
        let rep = spin_operators(j, 1.0).unwrap();
        let mut ctx = CommutationContext::new();
        for name in ["Lx", "Ly", "Lz"] {
            ctx.declare(ObservableSymbol::new(name, SymbolRole::AngularMomentum));
        }
        let mut binding = Binding::new();
        binding.insert("Lx", rep.component(Axis::X).clone()).unwrap();
        binding.insert("Ly", rep.component(Axis::Y).clone()).unwrap();
        binding.insert("Lz", rep.component(Axis::Z).clone()).unwrap();
        (ctx, binding)
    }

    #[test]
    fn scalar_multiple_of_momentum() {
        // H = c·px with c a plain scalar coefficient.
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::new("px", SymbolRole::Momentum));
        let mut binding = Binding::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_hermitian(4, 1.0, &mut rng);
        binding.insert("px", p.clone()).unwrap();

        let c = Scalar::from_ratio(3, 2);
        let f = NCPolynomial::symbol("px").scale(&c);
        let h = transcribe(&f, &ctx, &binding).unwrap();
        let expect = p.scale(Complex64::new(1.5, 0.0));
        assert!(h.sub(&expect).norm_inf() < 1e-12);
    }

    #[test]
    fn casimir_from_sum_of_squares() {
        // Lx² + Ly² + Lz² is simple (no cross words) and transcribes to the
        // Casimir operator, 2ħ²·I at j = 1.
        let (ctx, binding) = spin_binding(1.0);
        let f = NCPolynomial::symbol("Lx")
            .pow(2)
            .add(&NCPolynomial::symbol("Ly").pow(2))
            .add(&NCPolynomial::symbol("Lz").pow(2));
        let op = transcribe(&f, &ctx, &binding).unwrap();
        let expect = Operator::identity(3, 1.0).scale(Complex64::new(2.0, 0.0));
        assert!(op.sub(&expect).norm_inf() < 1e-12);
    }

    #[test]
    fn product_of_noncommuting_symbols_is_refused() {
        let (ctx, binding) = spin_binding(0.5);
        let f = NCPolynomial::symbol("Lx").mul(&NCPolynomial::symbol("Lz"));
        match transcribe(&f, &ctx, &binding) {
            Err(SymbolicError::NotSimple { witness }) => {
                assert_eq!(witness, vec!["Lx".to_string(), "Lz".to_string()]);
            }
            other => panic!("expected NotSimple, got {other:?}"),
        }
    }

    #[test]
    fn declared_commuting_pair_is_cross_checked() {
        // Declare Lx and Lz commuting (false) and watch the binding check.
        let (mut ctx, binding) = spin_binding(0.5);
        ctx.declare_commuting("Lx", "Lz").unwrap();
        let f = NCPolynomial::symbol("Lx").mul(&NCPolynomial::symbol("Lz"));
        assert!(matches!(
            transcribe(&f, &ctx, &binding),
            Err(SymbolicError::BindingMismatch { .. })
        ));
    }

    #[test]
    fn transcribe_is_additive_and_multiplicative_on_commuting_bindings() {
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::generic("a"));
        ctx.declare(ObservableSymbol::generic("b"));
        ctx.declare_commuting("a", "b").unwrap();

        // Commuting Hermitians: two diagonal matrices.
        let mut binding = Binding::new();
        binding
            .insert("a", Operator::from_real_diagonal(&[0.3, -1.2, 0.8], 1.0))
            .unwrap();
        binding
            .insert("b", Operator::from_real_diagonal(&[2.0, 0.5, -0.1], 1.0))
            .unwrap();

        let f1 = NCPolynomial::symbol("a").pow(2);
        let f2 = NCPolynomial::symbol("b").scale(&Scalar::from_ratio(1, 3));

        let sum = transcribe(&f1.add(&f2), &ctx, &binding).unwrap();
        let parts = transcribe(&f1, &ctx, &binding)
            .unwrap()
            .add(&transcribe(&f2, &ctx, &binding).unwrap());
        assert!(sum.sub(&parts).norm_inf() < 1e-12);

        let prod = transcribe(&f1.mul(&f2), &ctx, &binding).unwrap();
        let factors = transcribe(&f1, &ctx, &binding)
            .unwrap()
            .matmul(&transcribe(&f2, &ctx, &binding).unwrap());
        assert!(prod.sub(&factors).norm_inf() < 1e-10);
    }

    #[test]
    fn hermitize_commuting_degenerates_to_product() {
        let a = Operator::from_real_diagonal(&[1.0, 2.0], 1.0);
        let b = Operator::from_real_diagonal(&[-0.5, 3.0], 1.0);
        let fa = NCPolynomial::symbol("a");
        let fb = NCPolynomial::symbol("b");
        let h = hermitize(&fa, &fb, &a, &b).unwrap();
        assert!(h.sub(&a.matmul(&b).symmetrized()).norm_inf() < 1e-14);
    }

    #[test]
    fn hermitize_pauli_pair_is_zero() {
        // σx σz + σz σx = 0, so (ħ/2)² scaling keeps it zero.
        let half = Complex64::new(0.5, 0.0);
        let a = Operator::hermitian(pauli('x').map(|z| z * half), 1.0).unwrap();
        let b = Operator::hermitian(pauli('z').map(|z| z * half), 1.0).unwrap();
        let h = hermitize(
            &NCPolynomial::symbol("a"),
            &NCPolynomial::symbol("b"),
            &a,
            &b,
        )
        .unwrap();
        assert!(h.norm_inf() < 1e-15);
    }

    #[test]
    fn hermitize_square_first_factor() {
        // f₁ = a², f₂ = b gives ½(Â²B̂ + B̂Â²).
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_hermitian(3, 1.0, &mut rng);
        let b = random_hermitian(3, 1.0, &mut rng);
        let h = hermitize(
            &NCPolynomial::symbol("a").pow(2),
            &NCPolynomial::symbol("b"),
            &a,
            &b,
        )
        .unwrap();
        let a2 = a.matmul(&a);
        let expect = a2
            .matmul(&b)
            .add(&b.matmul(&a2))
            .scale(Complex64::new(0.5, 0.0));
        assert!(h.sub(&expect).norm_inf() < 1e-12);
    }

    #[test]
    fn transcription_expectation_agrees_with_classical_function_of_outcomes() {
        // ⟨f(Â)⟩ = Σ f(aᵢ) pᵢ: the function rule content, spot-checked.
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::generic("a"));
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_hermitian(4, 1.0, &mut rng);
        let mut binding = Binding::new();
        binding.insert("a", a.clone()).unwrap();
        let f = NCPolynomial::symbol("a")
            .pow(3)
            .sub(&NCPolynomial::symbol("a").scale(&Scalar::from_int(2)));
        let op = transcribe(&f, &ctx, &binding).unwrap();

        let v = crate::operator::random_state(4, &mut rng);
        let lhs = crate::operator::expectation(&op, &v).unwrap();
        let spec = eigendecompose(&a, 1e-12).unwrap();
        let rhs: f64 = (0..4)
            .map(|i| {
                let p = spec
                    .eigenvectors
                    .column(i)
                    .dotc(v.amplitudes())
                    .norm_sqr();
                let lam: f64 = spec.eigenvalues[i];
                (lam.powi(3) - 2.0 * lam) * p
            })
            .sum();
        assert!((lhs - rhs).abs() < 1e-10);
        let _unused: StateVector = v;
    }
}
