//! Property tests for the algebraic invariants.

use avcp_core::operator::{
    commutator, evolve, expectation, expectation_complex, random_hermitian, random_state,
};
use avcp_core::repr::grid::grid_representation;
use avcp_core::scalar::Scalar;
use avcp_core::symbolic::parse::parse_polynomial;
use avcp_core::symbolic::phase_space::{poisson_bracket, PhaseSpace, PhaseSpacePolynomial};
use avcp_core::symbolic::transcribe::{eval_polynomial, Binding};
use avcp_core::symbolic::{
    normal_order, CommutationContext, NCPolynomial, ObservableSymbol, SymbolOrder, SymbolRole,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_rational() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Scalar::from_ratio(n, d))
}

/// Random phase-space polynomial over (x, px) of total degree at most 3.
fn phase_poly() -> impl Strategy<Value = PhaseSpacePolynomial> {
    let term = (0u32..=3, 0u32..=3, small_rational())
        .prop_filter("degree cap", |(a, b, _)| a + b <= 3);
    prop::collection::vec(term, 1..4).prop_map(|terms| {
        let space = PhaseSpace::single("x", "px");
        let mut poly = PhaseSpacePolynomial::new(space);
        for (a, b, coeff) in terms {
            poly.add_term(vec![a, b], coeff);
        }
        poly
    })
}

/// Random noncommutative polynomial over {x, px} with small degree.
fn nc_poly() -> impl Strategy<Value = NCPolynomial> {
    let word = prop::collection::vec(prop::bool::ANY, 0..4).prop_map(|bits| {
        bits.iter()
            .map(|&b| if b { "x".to_string() } else { "px".to_string() })
            .collect::<Vec<_>>()
    });
    prop::collection::vec((word, small_rational()), 1..4).prop_map(|terms| {
        let mut poly = NCPolynomial::zero();
        for (w, c) in terms {
            poly.add_term(w, c);
        }
        poly
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_of_hermitians_is_anti_hermitian(seed in 0u64..1000, dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(dim, 1.0, &mut rng);
        let b = random_hermitian(dim, 1.0, &mut rng);
        let comm = commutator(&a, &b).unwrap();
        // (AB − BA)† = −(AB − BA).
        let dev = comm.adjoint().add(&comm).norm_inf();
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn poisson_bracket_antisymmetry(f in phase_poly(), g in phase_poly()) {
        let fg = poisson_bracket(&f, &g);
        let gf = poisson_bracket(&g, &f);
        prop_assert_eq!(fg, gf.neg());
    }

    #[test]
    fn poisson_bracket_leibniz(f in phase_poly(), g in phase_poly(), h in phase_poly()) {
        // {f, gh} = {f,g}h + g{f,h}, exactly.
        let lhs = poisson_bracket(&f, &g.mul(&h));
        let rhs = poisson_bracket(&f, &g).mul(&h).add(&g.mul(&poisson_bracket(&f, &h)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poisson_bracket_jacobi(f in phase_poly(), g in phase_poly(), h in phase_poly()) {
        // {f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0, exactly.
        let total = poisson_bracket(&f, &poisson_bracket(&g, &h))
            .add(&poisson_bracket(&g, &poisson_bracket(&h, &f)))
            .add(&poisson_bracket(&h, &poisson_bracket(&f, &g)));
        prop_assert!(total.is_zero());
    }

    #[test]
    fn normal_order_is_idempotent(f in nc_poly()) {
        let ctx = canonical_ctx();
        let order = SymbolOrder::position_before_momentum(&ctx);
        let once = normal_order(&f, &ctx, &order).unwrap();
        let twice = normal_order(&once, &ctx, &order).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn normal_order_preserves_matrix_expectations(f in nc_poly()) {
        // ⟨NO(f)⟩ = ⟨f⟩ on an interior wavepacket, evaluating both sides as
        // grid matrices.
        let ctx = canonical_ctx();
        let order = SymbolOrder::position_before_momentum(&ctx);
        let ordered = normal_order(&f, &ctx, &order).unwrap();

        let grid = grid_representation(64, 1.0, 1.0).unwrap();
        let mut binding = Binding::new();
        binding.insert("x", grid.position().clone()).unwrap();
        binding.insert("px", grid.momentum().clone()).unwrap();
        let lhs = eval_polynomial(&f, &binding).unwrap();
        let rhs = eval_polynomial(&ordered, &binding).unwrap();
        let psi = grid.gaussian(0.5, 1.0 / 14.0, 4.0 * 2.0 * std::f64::consts::PI);
        let lv = expectation_complex(&lhs, &psi);
        let rv = expectation_complex(&rhs, &psi);
        let scale = 1.0 + lv.norm().max(rv.norm());
        prop_assert!((lv - rv).norm() < 1e-6 * scale, "lhs {lv}, rhs {rv}");
    }

    #[test]
    fn printed_polynomials_reparse(f in nc_poly()) {
        let printed = f.to_string();
        let reparsed = parse_polynomial(&printed).unwrap();
        prop_assert_eq!(f, reparsed);
    }

    #[test]
    fn evolution_preserves_norm_and_commuting_means(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(4, 1.0, &mut rng);
        let conserved = h.matmul(&h).symmetrized();
        let v = random_state(4, &mut rng);
        let evolved = evolve(&v, &h, 0.63).unwrap();
        prop_assert!((evolved.amplitudes().norm() - 1.0).abs() < 1e-10);
        let before = expectation(&conserved, &v).unwrap();
        let after = expectation(&conserved, &evolved).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }
}

fn canonical_ctx() -> CommutationContext {
    let mut ctx = CommutationContext::new();
    ctx.declare(ObservableSymbol::new("x", SymbolRole::Position));
    ctx.declare(ObservableSymbol::new("px", SymbolRole::Momentum));
    ctx.declare_canonical("x", "px", &Scalar::i() * &Scalar::hbar_pow(1))
        .unwrap();
    ctx
}

#[test]
fn expectation_is_real_on_many_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_hermitian(5, 1.0, &mut rng);
    for _ in 0..1000 {
        let v = random_state(5, &mut rng);
        let value = expectation_complex(&a, &v);
        assert!(value.im.abs() < 1e-10);
        assert_eq!(expectation(&a, &v).unwrap(), value.re);
    }
}

#[test]
fn transcribe_distributes_over_sums_when_defined() {
    // transcribe(f1 + f2) = transcribe(f1) + transcribe(f2), exact matrices.
    use avcp_core::symbolic::transcribe::transcribe;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for dim in 2..6 {
        let a = random_hermitian(dim, 1.0, &mut rng);
        let b = random_hermitian(dim, 1.0, &mut rng);
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::generic("a"));
        ctx.declare(ObservableSymbol::generic("b"));
        let mut binding = Binding::new();
        binding.insert("a", a).unwrap();
        binding.insert("b", b).unwrap();
        let f1 = NCPolynomial::symbol("a").pow(2).scale(&Scalar::from_ratio(2, 3));
        let f2 = NCPolynomial::symbol("b").scale(&Scalar::from_ratio(-1, 2));
        let joint = transcribe(&f1.add(&f2), &ctx, &binding).unwrap();
        let split = transcribe(&f1, &ctx, &binding)
            .unwrap()
            .add(&transcribe(&f2, &ctx, &binding).unwrap());
        assert!(joint.sub(&split).norm_inf() < 1e-12);
    }
}

#[test]
fn grid_commutator_expectation_error_shrinks_with_n() {
    // The convergence behavior that fixes the 1e-6 grid tolerance.
    let mut previous = f64::INFINITY;
    for n in [32usize, 64, 128] {
        let grid = grid_representation(n, 1.0, 1.0).unwrap();
        let psi = grid.gaussian(0.5, 1.0 / 10.0, 0.0);
        let comm = commutator(grid.position(), grid.momentum()).unwrap();
        let err = (expectation_complex(&comm, &psi) - Complex64::new(0.0, 1.0)).norm();
        assert!(err <= previous * 1.5, "error grew from {previous} to {err} at n={n}");
        previous = err;
    }
    assert!(previous < 1e-8);
}
