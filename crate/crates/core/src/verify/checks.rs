//! Individual checks of the suite, grouped as angular / grid / pb /
//! arrangements. Grid-based commutator claims are expectation claims over
//! the documented wavepacket family; the strict operator identity cannot
//! hold in finite dimension, so tolerances come from a convergence study
//! (see the `convergence_study` example).

use super::{CheckResult, SuiteConfig, VerifyError};
use crate::arrangement::{
    analytic_expected_output, build_quantum_counterpart, monte_carlo_output, operator_mean,
    representing_operator, ClassicalArrangement, CounterpartOptions,
};
use crate::operator::{
    commutator, eigendecompose, evolve_with_spectrum, expectation, expectation_complex,
    random_hermitian, random_state, Operator, StateVector,
};
use crate::repr::grid::{
    grid_representation, minimal_coupling_momentum, standard_wavepacket_family,
    GridRepresentation, WavepacketSpec,
};
use crate::repr::rot3::rotation_group_identity_residual;
use crate::repr::spin::{bloch_vector, rotate_state, rotation_generator, spin_operators};
use crate::repr::{rot3::so3_rotation, Axis};
use crate::scalar::Scalar;
use crate::symbolic::phase_space::{poisson_bracket, PhaseSpace, PhaseSpacePolynomial};
use crate::symbolic::transcribe::{transcribe, Binding};
use crate::symbolic::{
    is_simple, CommutationContext, NCPolynomial, ObservableSymbol, Simplicity, SymbolRole,
    SymbolicError,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOUNDARY_LEAK_TOL: f64 = 1e-12;

fn require_interior(grid: &GridRepresentation, psi: &StateVector) -> Result<(), VerifyError> {
    let leak = grid.boundary_leak(psi);
    if leak >= BOUNDARY_LEAK_TOL {
        return Err(VerifyError::BoundaryLeak { leak });
    }
    Ok(())
}

fn family_states(
    grid: &GridRepresentation,
    family: &[WavepacketSpec],
) -> Result<Vec<StateVector>, VerifyError> {
    family
        .iter()
        .map(|spec| {
            let psi = grid.gaussian(spec.center, spec.width, spec.momentum);
            require_interior(grid, &psi)?;
            Ok(psi)
        })
        .collect()
}

/// Least-squares slope of log(y) against log(x).
fn fit_log_log(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let var = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    cov / var
}

// ---------------------------------------------------------------------------
// Grid group
// ---------------------------------------------------------------------------

/// max over the family of |⟨[x̂, p̂]⟩ − iħ|, against 1e-6·ħ.
pub fn check_canonical_commutator(
    grid: &GridRepresentation,
    family: &[WavepacketSpec],
) -> Result<CheckResult, VerifyError> {
    let states = family_states(grid, family)?;
    let comm = commutator(grid.position(), grid.momentum())?;
    let target = Complex64::new(0.0, grid.hbar());
    let measured = states
        .iter()
        .map(|psi| (expectation_complex(&comm, psi) - target).norm())
        .fold(0.0f64, f64::max);
    Ok(CheckResult::evaluate(
        "grid/canonical-commutator",
        measured,
        1e-6 * grid.hbar(),
        format!("max |<[x,p]> - ih| over {} wavepackets", states.len()),
    ))
}

/// Massive-particle variant: ⟨p̂[x̂,p̂] + [x̂,p̂]p̂⟩ = 2iħ⟨p̂⟩ on the family.
pub fn check_massive_particle_relation(
    grid: &GridRepresentation,
    family: &[WavepacketSpec],
) -> Result<CheckResult, VerifyError> {
    let states = family_states(grid, family)?;
    let comm = commutator(grid.position(), grid.momentum())?;
    let p = grid.momentum();
    let sym = p.matmul(&comm).add(&comm.matmul(p));
    let mut measured = 0.0f64;
    let mut scale = 1.0f64;
    for psi in &states {
        let lhs = expectation_complex(&sym, psi);
        let p_mean = expectation(p, psi)?;
        let rhs = Complex64::new(0.0, 2.0 * grid.hbar() * p_mean);
        measured = measured.max((lhs - rhs).norm());
        scale = scale.max(2.0 * grid.hbar() * p_mean.abs());
    }
    Ok(CheckResult::evaluate(
        "grid/canonical-massive-variant",
        measured,
        1e-6 * scale,
        "max |<p[x,p]+[x,p]p> - 2ih<p>| over the family",
    ))
}

/// Free drift under H = c·p̂ is exactly linear: |Δ⟨x̂⟩ − cδt| ≤ 1e-8·c·δt
/// for every δt, plus a second-order fit of the first-order-truncated
/// propagator error (the O(δt²) term the derivations discard).
pub fn check_ehrenfest_free(
    grid: &GridRepresentation,
    c: f64,
    dt_list: &[f64],
    packet: &WavepacketSpec,
) -> Result<Vec<CheckResult>, VerifyError> {
    assert!(c > 0.0, "drift speed must be positive");
    let psi = grid.gaussian(packet.center, packet.width, packet.momentum);
    require_interior(grid, &psi)?;
    let x0 = expectation(grid.position(), &psi)?;
    let spectrum = grid.scaled_momentum_spectrum(c);

    let mut worst_rel = 0.0f64;
    for &dt in dt_list {
        if dt == 0.0 {
            continue;
        }
        let evolved = evolve_with_spectrum(&spectrum, &psi, dt)?;
        require_interior(grid, &evolved)?;
        let drift = expectation(grid.position(), &evolved)? - x0;
        worst_rel = worst_rel.max((drift - c * dt).abs() / (c * dt));
    }
    let exact = CheckResult::evaluate(
        "grid/ehrenfest-free-drift",
        worst_rel,
        1e-8,
        format!("max |d<x> - c*dt|/(c*dt) over dt in {dt_list:?}"),
    );

    // Asymmetric packet: symmetric Gaussians have a vanishing second-order
    // coefficient, which would leave nothing to fit.
    let lopsided = {
        let g1 = grid.gaussian(packet.center - grid.length() / 24.0, packet.width, 0.0);
        let g2 = grid.gaussian(packet.center + grid.length() / 24.0, packet.width / 2.0, 0.0);
        let sum = g1.amplitudes() + g2.amplitudes().map(|z| z * Complex64::new(0.5, 0.0));
        StateVector::normalized(sum).expect("nonzero superposition")
    };
    require_interior(grid, &lopsided)?;
    let x0 = expectation(grid.position(), &lopsided)?;
    let mut points = Vec::new();
    for &dt in &[1e-4, 2e-4, 4e-4, 8e-4, 1.6e-3] {
        let dt = dt * grid.length() / c;
        // One step of the first-order propagator (1 − iH·dt/ħ), renormalized.
        let h_psi = grid.momentum().matrix() * lopsided.amplitudes();
        let factor = Complex64::new(0.0, -c * dt / grid.hbar());
        let stepped = StateVector::normalized(
            lopsided.amplitudes() + h_psi.map(|z| z * factor),
        )?;
        let resid = (expectation(grid.position(), &stepped)? - x0 - c * dt).abs();
        points.push((dt, resid));
    }
    let order = fit_log_log(&points);
    let truncation = CheckResult::evaluate(
        "grid/ehrenfest-truncation-order",
        (order - 2.0).abs(),
        0.2,
        format!("fitted error order of the first-order propagator: {order:.3}"),
    );
    Ok(vec![exact, truncation])
}

/// The displacement relations: ⟨[x̂, D̂]⟩ = i on the family, [p̂, D̂] = 0 and
/// D̂ = p̂/ħ as matrix identities, and the active/passive density match.
pub fn check_displacement_relations(
    grid: &GridRepresentation,
    family: &[WavepacketSpec],
) -> Result<Vec<CheckResult>, VerifyError> {
    let states = family_states(grid, family)?;
    let mut results = Vec::new();

    let comm_xd = commutator(grid.position(), grid.displacement())?;
    let measured = states
        .iter()
        .map(|psi| (expectation_complex(&comm_xd, psi) - Complex64::new(0.0, 1.0)).norm())
        .fold(0.0f64, f64::max);
    results.push(CheckResult::evaluate(
        "grid/displacement-x-commutator",
        measured,
        1e-6,
        "max |<[x,D]> - i| over the family",
    ));

    // Both identities are bitwise at ħ = 1 because p and D share storage.
    let comm_pd = commutator(grid.momentum(), grid.displacement())?;
    let exact_tol = if grid.hbar() == 1.0 {
        0.0
    } else {
        1e-12 * grid.momentum().norm_inf().powi(2)
    };
    results.push(CheckResult::evaluate(
        "grid/displacement-p-commutator",
        comm_pd.norm_inf(),
        exact_tol,
        "||[p, D]|| as a matrix identity",
    ));

    let d_dev = grid
        .displacement()
        .matrix()
        .iter()
        .zip(grid.momentum().matrix().iter())
        .map(|(d, p)| (d - p / Complex64::new(grid.hbar(), 0.0)).norm())
        .fold(0.0f64, f64::max);
    let tol = if grid.hbar() == 1.0 {
        0.0
    } else {
        1e-15 * grid.displacement().norm_inf()
    };
    results.push(CheckResult::evaluate(
        "grid/displacement-equals-p-over-hbar",
        d_dev,
        tol,
        "max-entry deviation of D from p/hbar",
    ));

    // Active vs passive: exp(−iεD)ψ has the density of ψ(x−ε). On an exact
    // grid multiple of dx the densities match pointwise.
    let shift_cells = 7usize;
    let eps = shift_cells as f64 * grid.dx();
    let mut density_dev = 0.0f64;
    for psi in &states {
        let shifted = grid.translate(psi, eps);
        for j in 0..grid.n() {
            let src = (j + grid.n() - shift_cells) % grid.n();
            let expect = psi.amplitudes()[src].norm_sqr();
            let got = shifted.amplitudes()[j].norm_sqr();
            density_dev = density_dev.max((got - expect).abs());
        }
    }
    results.push(CheckResult::evaluate(
        "grid/translation-density",
        density_dev,
        1e-10,
        format!("pointwise density match after a {shift_cells}-cell shift"),
    ));

    // Fractional shift: the wavepacket center moves by exactly ε. Kept small
    // enough that the widest off-center family member stays interior.
    let eps = 0.015 * grid.length();
    let mut shift_dev = 0.0f64;
    for psi in &states {
        let before = expectation(grid.position(), psi)?;
        let shifted = grid.translate(psi, eps);
        require_interior(grid, &shifted)?;
        let after = expectation(grid.position(), &shifted)?;
        shift_dev = shift_dev.max((after - before - eps).abs());
    }
    results.push(CheckResult::evaluate(
        "grid/translation-shift",
        shift_dev,
        1e-6 * grid.length(),
        format!("center shift error for eps = {eps}"),
    ));

    Ok(results)
}

/// Kinetic momentum in a linear vector potential: ⟨[x̂, mẋ̂]⟩ = iħ and the
/// algebraic reconstruction mẋ̂ + eA(x̂) = p̂.
pub fn check_minimal_coupling(
    grid: &GridRepresentation,
    family: &[WavepacketSpec],
) -> Result<CheckResult, VerifyError> {
    let states = family_states(grid, family)?;
    let potential = PhaseSpacePolynomial::monomial(vec!["x".into()], "x", 1, 0.8);
    let charge = 1.3;
    let kinetic = minimal_coupling_momentum(grid, &potential, charge, "x")?;
    let comm = commutator(grid.position(), &kinetic)?;
    let target = Complex64::new(0.0, grid.hbar());
    let mut measured = states
        .iter()
        .map(|psi| (expectation_complex(&comm, psi) - target).norm())
        .fold(0.0f64, f64::max);

    // Reconstruction p̂ = mẋ̂ + eA(x̂); only the diagonal differs.
    let mut recon = kinetic.matrix().clone();
    for j in 0..grid.n() {
        recon[(j, j)] +=
            Complex64::new(charge, 0.0) * potential.eval_single("x", grid.grid_point(j), grid.hbar());
    }
    let recon_dev = (&recon - grid.momentum().matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    measured = measured.max(recon_dev);

    Ok(CheckResult::evaluate(
        "grid/minimal-coupling",
        measured,
        1e-6 * grid.hbar(),
        "max of |<[x, m xdot]> - ih| over the family and the p reconstruction error",
    ))
}

pub fn grid_group(config: &SuiteConfig, out: &mut Vec<CheckResult>) -> Result<(), VerifyError> {
    let grid = grid_representation(config.grid_n, config.grid_length, config.hbar)?;
    let family = standard_wavepacket_family(
        config.grid_length,
        config.wavepacket_center,
        config.wavepacket_width,
    );
    out.push(check_canonical_commutator(&grid, &family)?);
    out.push(check_massive_particle_relation(&grid, &family)?);
    out.extend(check_displacement_relations(&grid, &family)?);
    out.push(check_minimal_coupling(&grid, &family)?);
    let packet = WavepacketSpec {
        center: config.wavepacket_center,
        width: config.grid_length / 20.0,
        momentum: 0.0,
    };
    let c = 1.0;
    let dt_list: Vec<f64> = [0.005, 0.01, 0.02, 0.04]
        .iter()
        .map(|f| f * config.grid_length / c)
        .collect();
    out.extend(check_ehrenfest_free(&grid, c, &dt_list, &packet)?);

    // Negative control: a plane wave wraps around the box and must be
    // rejected by the interior-support precondition.
    let plane = grid.plane_wave(3);
    let caught = matches!(
        require_interior(&grid, &plane),
        Err(VerifyError::BoundaryLeak { .. })
    );
    out.push(CheckResult::evaluate(
        "grid/negative-control-boundary",
        if caught { 0.0 } else { 1.0 },
        0.5,
        "a boundary-wrapping plane wave must raise BoundaryLeak",
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Angular group
// ---------------------------------------------------------------------------

/// All commutator identities, derivation identities, Casimir, and the
/// generator relations, at every half-integer j up to `j_max`.
pub fn check_angular_suite(j_max: f64, hbar: f64) -> Result<Vec<CheckResult>, VerifyError> {
    let mut comm_resid = 0.0f64;
    let mut derivation_resid = 0.0f64;
    let mut casimir_resid = 0.0f64;
    let mut generator_resid = 0.0f64;
    let mut scaling_resid = 0.0f64;

    let mut two_j = 1u32;
    while f64::from(two_j) / 2.0 <= j_max {
        let j = f64::from(two_j) / 2.0;
        let rep = spin_operators(j, hbar)?;
        comm_resid = comm_resid.max(rep.max_commutator_residual());

        // [L_a, L_z + (i/ħ)[L_x, L_y]] = 0 for a ∈ {x, y, z}.
        let lx = rep.component(Axis::X);
        let ly = rep.component(Axis::Y);
        let lz = rep.component(Axis::Z);
        let inner = lz.add(&commutator(lx, ly)?.scale(Complex64::new(0.0, 1.0 / hbar)));
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let resid = commutator(rep.component(axis), &inner)?.norm_inf();
            derivation_resid = derivation_resid.max(resid);
        }

        let casimir_target =
            Operator::identity(rep.dim(), hbar).scale(Complex64::new(hbar * hbar * j * (j + 1.0), 0.0));
        casimir_resid = casimir_resid.max(rep.casimir().sub(&casimir_target).norm_inf());

        // [R_z, L_x] = iL_y, [R_z, L_y] = −iL_x, [R_z, L_z] = 0, and cyclic.
        let triples = [
            (Axis::Z, Axis::X, Some((Axis::Y, 1.0))),
            (Axis::Z, Axis::Y, Some((Axis::X, -1.0))),
            (Axis::Z, Axis::Z, None),
            (Axis::X, Axis::Y, Some((Axis::Z, 1.0))),
            (Axis::X, Axis::Z, Some((Axis::Y, -1.0))),
            (Axis::X, Axis::X, None),
            (Axis::Y, Axis::Z, Some((Axis::X, 1.0))),
            (Axis::Y, Axis::X, Some((Axis::Z, -1.0))),
            (Axis::Y, Axis::Y, None),
        ];
        for (gen_axis, l_axis, target) in triples {
            let r = rotation_generator(&rep, gen_axis);
            let lhs = commutator(&r, rep.component(l_axis))?;
            let resid = match target {
                Some((t_axis, sign)) => lhs
                    .sub(&rep.component(t_axis).scale(Complex64::new(0.0, sign)))
                    .norm_inf(),
                None => lhs.norm_inf(),
            };
            generator_resid = generator_resid.max(resid);
        }

        // ħ·R_a = L_a entrywise.
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let r = rotation_generator(&rep, axis);
            let resid = r
                .scale(Complex64::new(hbar, 0.0))
                .sub(rep.component(axis))
                .norm_inf();
            scaling_resid = scaling_resid.max(resid);
        }

        two_j += 1;
    }

    let tol = 1e-9 * hbar * hbar;
    Ok(vec![
        CheckResult::evaluate(
            "angular/commutators",
            comm_resid,
            tol,
            format!("max ||[La,Lb] - ih Lc|| over all half-integer j <= {j_max}"),
        ),
        CheckResult::evaluate(
            "angular/derivation-identities",
            derivation_resid,
            tol,
            "max ||[La, Lz + (i/h)[Lx,Ly]]||; the gamma constants vanish",
        ),
        CheckResult::evaluate(
            "angular/casimir",
            casimir_resid,
            1e-9 * hbar * hbar * (1.0 + j_max * (j_max + 1.0)),
            "max ||Lx^2+Ly^2+Lz^2 - h^2 j(j+1) I||",
        ),
        CheckResult::evaluate(
            "angular/rotation-generator-commutators",
            generator_resid,
            1e-9 * hbar,
            "max residual of [Ra, Lb] relations",
        ),
        CheckResult::evaluate(
            "angular/r-equals-l-over-hbar",
            scaling_resid,
            if hbar == 1.0 { 0.0 } else { 1e-12 * hbar * j_max },
            "max ||h Ra - La||",
        ),
    ])
}

/// Residual of the rotation-matrix identity is cubic in ε.
pub fn check_rotation_group_identity(epsilons: &[f64]) -> CheckResult {
    let points: Vec<(f64, f64)> = epsilons
        .iter()
        .map(|&eps| (eps, rotation_group_identity_residual(eps)))
        .collect();
    let order = fit_log_log(&points);
    let sample = rotation_group_identity_residual(1e-2);
    CheckResult::evaluate(
        "angular/rotation-group-identity-order",
        (order - 3.0).abs(),
        0.2,
        format!("fitted order {order:.3}; residual at eps=1e-2 is {sample:.3e}"),
    )
}

/// Rotating a state rotates its expectation triple: ℘(e^{−iθR_a}v) equals
/// R_a(θ)·℘(v) for random states.
pub fn check_bloch_rotation(
    j: f64,
    hbar: f64,
    theta_list: &[f64],
    seed: u64,
) -> Result<CheckResult, VerifyError> {
    let rep = spin_operators(j, hbar)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut measured = 0.0f64;
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for &theta in theta_list {
            let classical = so3_rotation(axis, theta);
            for _ in 0..100 {
                let v = random_state(rep.dim(), &mut rng);
                let rotated = rotate_state(&rep, axis, theta, &v);
                let lhs = bloch_vector(&rep, &rotated);
                let rhs = classical.apply(bloch_vector(&rep, &v));
                for k in 0..3 {
                    measured = measured.max((lhs[k] - rhs[k]).abs());
                }
            }
        }
    }
    Ok(CheckResult::evaluate(
        format!("angular/bloch-rotation-j-{j}"),
        measured,
        1e-9 * hbar * (1.0 + j),
        format!("covariance of the expectation triple, thetas {theta_list:?}"),
    ))
}

pub fn angular_group(config: &SuiteConfig, out: &mut Vec<CheckResult>) -> Result<(), VerifyError> {
    out.extend(check_angular_suite(config.j_max, config.hbar)?);
    out.push(check_rotation_group_identity(&[
        1e-1, 3.2e-2, 1e-2, 3.2e-3, 1e-3,
    ]));
    for j in [0.5, 1.5] {
        out.push(check_bloch_rotation(
            j,
            config.hbar,
            &[0.0, 0.3, std::f64::consts::PI / 2.0, std::f64::consts::PI],
            config.seed,
        )?);
    }

    // Negative control: a 1e-6 perturbation of one Lx entry must break the
    // derivation identity beyond its tolerance.
    let rep = spin_operators(1.0, config.hbar)?;
    let mut lx = rep.component(Axis::X).matrix().clone();
    lx[(0, 0)] += Complex64::new(1e-6, 0.0);
    let lx = Operator::hermitian(lx, config.hbar).expect("diagonal bump stays Hermitian");
    let inner = rep.component(Axis::Z).add(
        &commutator(&lx, rep.component(Axis::Y))
            .expect("dims agree")
            .scale(Complex64::new(0.0, 1.0 / config.hbar)),
    );
    let resid = commutator(&lx, &inner).expect("dims agree").norm_inf();
    let caught = resid > 1e-9 * config.hbar * config.hbar;
    out.push(CheckResult::evaluate(
        "angular/negative-control-perturbation",
        if caught { 0.0 } else { 1.0 },
        0.5,
        format!("perturbed Lx drives the derivation residual to {resid:.3e}"),
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Bracket rule group
// ---------------------------------------------------------------------------

/// Where a bracket-rule check evaluates: on the canonical grid pair over a
/// wavepacket family, or on an explicit finite-dimensional binding.
pub enum PbRepBinding<'a> {
    Grid {
        grid: &'a GridRepresentation,
        family: &'a [WavepacketSpec],
    },
    Finite {
        ctx: &'a CommutationContext,
        binding: &'a Binding,
    },
}

/// Checks iħ·{F,H}̂ = [F̂, Ĥ]. All three of F, H, {F,H} must be simple;
/// otherwise the rule does not apply and the check refuses.
pub fn check_pb_rule(
    name: &str,
    f: &PhaseSpacePolynomial,
    h: &PhaseSpacePolynomial,
    rep: &PbRepBinding,
) -> Result<CheckResult, VerifyError> {
    let bracket = poisson_bracket(f, h);

    let (ctx, binding) = match rep {
        PbRepBinding::Grid { grid, .. } => {
            assert_eq!(
                f.space().dof(),
                1,
                "grid binding covers one degree of freedom"
            );
            let (q, p) = f.space().pairs()[0].clone();
            let mut ctx = CommutationContext::new();
            ctx.declare(ObservableSymbol::new(q.clone(), SymbolRole::Position));
            ctx.declare(ObservableSymbol::new(p.clone(), SymbolRole::Momentum));
            ctx.declare_canonical(&q, &p, &Scalar::i() * &Scalar::hbar_pow(1))?;
            let mut binding = Binding::new();
            binding.insert(q, grid.position().clone())?;
            binding.insert(p, grid.momentum().clone())?;
            (ctx, binding)
        }
        PbRepBinding::Finite { ctx, binding } => ((*ctx).clone(), (*binding).clone()),
    };

    for (label, poly) in [
        ("F", f.to_noncommutative()),
        ("H", h.to_noncommutative()),
        ("{F,H}", bracket.to_noncommutative()),
    ] {
        if let Simplicity::NotSimple { witness } = is_simple(&poly, &ctx)? {
            let _ = label;
            return Err(SymbolicError::NotSimple { witness }.into());
        }
    }

    let f_op = transcribe(&f.to_noncommutative(), &ctx, &binding)?;
    let h_op = transcribe(&h.to_noncommutative(), &ctx, &binding)?;
    let bracket_op = transcribe(&bracket.to_noncommutative(), &ctx, &binding)?;
    let hbar = binding.hbar().expect("nonempty binding");
    let lhs = bracket_op.scale(Complex64::new(0.0, hbar));
    let rhs = commutator(&f_op, &h_op)?;

    match rep {
        PbRepBinding::Grid { grid, family } => {
            let states = family_states(grid, family)?;
            let mut measured = 0.0f64;
            let mut scale = 1.0f64;
            for psi in &states {
                let l = expectation_complex(&lhs, psi);
                let r = expectation_complex(&rhs, psi);
                measured = measured.max((l - r).norm());
                scale = scale.max(r.norm());
            }
            Ok(CheckResult::evaluate(
                format!("pb/{name}"),
                measured,
                1e-6 * scale,
                "max |<ih{F,H}> - <[F,H]>| over the wavepacket family",
            ))
        }
        PbRepBinding::Finite { .. } => {
            let diff = lhs.sub(&rhs).norm_inf();
            let scale = f64::max(1.0, f64::max(lhs.norm_inf(), rhs.norm_inf()));
            Ok(CheckResult::evaluate(
                format!("pb/{name}"),
                diff,
                1e-12 * scale,
                "||ih{F,H} - [F,H]|| as matrices",
            ))
        }
    }
}

pub fn pb_group(config: &SuiteConfig, out: &mut Vec<CheckResult>) -> Result<(), VerifyError> {
    let grid = grid_representation(config.grid_n, config.grid_length, config.hbar)?;
    let family = standard_wavepacket_family(
        config.grid_length,
        config.wavepacket_center,
        config.wavepacket_width,
    );
    let space = PhaseSpace::single("x", "px");
    let x = PhaseSpacePolynomial::variable(&space, "x");
    let px = PhaseSpacePolynomial::variable(&space, "px");
    let grid_rep = PbRepBinding::Grid {
        grid: &grid,
        family: &family,
    };

    // F = x, H = c·px recovers the canonical commutator.
    let h_light = px.scale(&Scalar::from_ratio(3, 2));
    out.push(check_pb_rule("x-vs-c-px", &x, &h_light, &grid_rep)?);

    // F = x², H = px: bracket 2x against [x̂², p̂].
    out.push(check_pb_rule("x2-vs-px", &x.pow(2), &px, &grid_rep)?);

    // F = px, H = px²/2m: both sides vanish.
    let kinetic = px.pow(2).scale(&Scalar::from_ratio(1, 2));
    out.push(check_pb_rule("px-vs-kinetic", &px, &kinetic, &grid_rep)?);

    // Finite-dimensional case: powers of one observable, exact zero bracket.
    let q_space = PhaseSpace::single("q", "pq");
    let q = PhaseSpacePolynomial::variable(&q_space, "q");
    let mut ctx = CommutationContext::new();
    ctx.declare(ObservableSymbol::generic("q"));
    let mut binding = Binding::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9b);
    binding.insert("q", random_hermitian(5, config.hbar, &mut rng))?;
    let finite = PbRepBinding::Finite {
        ctx: &ctx,
        binding: &binding,
    };
    out.push(check_pb_rule("finite-powers", &q.pow(2), &q.pow(3), &finite)?);

    // Negative control: the cubic pair must be refused because {x³, γpx³}
    // is not simple.
    let gamma = Scalar::from_ratio(1, 5);
    let refused = matches!(
        check_pb_rule("cubic", &x.pow(3), &px.pow(3).scale(&gamma), &grid_rep),
        Err(VerifyError::Symbolic(SymbolicError::NotSimple { .. }))
    );
    out.push(CheckResult::evaluate(
        "pb/negative-control-cubic-refusal",
        if refused { 0.0 } else { 1.0 },
        0.5,
        "x^3 vs gamma*px^3 must be refused: the bracket is not simple",
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Arrangements group
// ---------------------------------------------------------------------------

/// One randomly generated admissible scenario: a context, a binding of
/// random Hermitians (commuting where declared), and a simple combine.
pub fn random_simple_scenario(
    dim: usize,
    hbar: f64,
    rng: &mut ChaCha8Rng,
) -> (CommutationContext, Binding, NCPolynomial) {
    let mut ctx = CommutationContext::new();
    let mut binding = Binding::new();

    let rand_coeff = |rng: &mut ChaCha8Rng| -> Scalar {
        let numer = *[-3i64, -2, -1, 1, 2, 3]
            .iter()
            .nth(rng.gen_range(0..6))
            .unwrap();
        let denom = rng.gen_range(1..=3i64);
        Scalar::from_ratio(numer, denom)
    };

    // A commuting pair shares one random eigenbasis.
    let commuting_pair = |rng: &mut ChaCha8Rng| -> (Operator, Operator) {
        let seededer = random_hermitian(dim, hbar, rng);
        let spec = eigendecompose(&seededer, seededer.default_degeneracy_tol())
            .expect("random Hermitian decomposes");
        let basis = &spec.eigenvectors;
        let make = |rng: &mut ChaCha8Rng| {
            let diag = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)),
            ));
            Operator::general(basis * diag * basis.adjoint(), hbar).symmetrized()
        };
        (make(rng), make(rng))
    };

    match rng.gen_range(0..3) {
        0 => {
            // Sum of functions of two non-commuting observables.
            ctx.declare(ObservableSymbol::generic("a"));
            ctx.declare(ObservableSymbol::generic("b"));
            binding.insert("a", random_hermitian(dim, hbar, rng)).unwrap();
            binding.insert("b", random_hermitian(dim, hbar, rng)).unwrap();
            let combine = NCPolynomial::symbol("a")
                .scale(&rand_coeff(rng))
                .add(&NCPolynomial::symbol("b").scale(&rand_coeff(rng)))
                .add(&NCPolynomial::symbol("a").pow(2).scale(&rand_coeff(rng)))
                .add(&NCPolynomial::symbol("b").pow(2).scale(&rand_coeff(rng)));
            (ctx, binding, combine)
        }
        1 => {
            // Product of commuting observables.
            ctx.declare(ObservableSymbol::generic("a"));
            ctx.declare(ObservableSymbol::generic("b"));
            ctx.declare_commuting("a", "b").unwrap();
            let (op_a, op_b) = commuting_pair(rng);
            binding.insert("a", op_a).unwrap();
            binding.insert("b", op_b).unwrap();
            let combine = NCPolynomial::symbol("a")
                .mul(&NCPolynomial::symbol("b"))
                .scale(&rand_coeff(rng))
                .add(&NCPolynomial::symbol("a").scale(&rand_coeff(rng)))
                .add(&NCPolynomial::symbol("b").pow(2).scale(&rand_coeff(rng)));
            (ctx, binding, combine)
        }
        _ => {
            // Commuting pair plus an independent third observable.
            ctx.declare(ObservableSymbol::generic("a"));
            ctx.declare(ObservableSymbol::generic("b"));
            ctx.declare(ObservableSymbol::generic("c"));
            ctx.declare_commuting("a", "b").unwrap();
            let (op_a, op_b) = commuting_pair(rng);
            binding.insert("a", op_a).unwrap();
            binding.insert("b", op_b).unwrap();
            binding.insert("c", random_hermitian(dim, hbar, rng)).unwrap();
            let combine = NCPolynomial::symbol("a")
                .mul(&NCPolynomial::symbol("b"))
                .scale(&rand_coeff(rng))
                .add(&NCPolynomial::symbol("c").scale(&rand_coeff(rng)))
                .add(&NCPolynomial::symbol("c").pow(2).scale(&rand_coeff(rng)));
            (ctx, binding, combine)
        }
    }
}

pub fn arrangements_group(
    config: &SuiteConfig,
    out: &mut Vec<CheckResult>,
) -> Result<(), VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Soundness: the analytic arrangement mean equals the mean of the
    // transcribed operator, on random scenarios and states.
    let mut analytic_dev = 0.0f64;
    for trial in 0..100 {
        let dim = 2 + (trial % 5);
        let (ctx, binding, combine) = random_simple_scenario(dim, config.hbar, &mut rng);
        let names: Vec<String> = combine.symbols().into_iter().collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let arr = ClassicalArrangement::simultaneous(&name_refs, combine)?;
        let qarr = build_quantum_counterpart(
            &arr,
            &ctx,
            &binding,
            None,
            0.0,
            &CounterpartOptions::default(),
        )?;
        let v0 = random_state(dim, &mut rng);
        let analytic = analytic_expected_output(&qarr, &v0)?;
        let op_mean = operator_mean(&qarr, &v0)?.expect("mandated counterpart has an operator");
        analytic_dev = analytic_dev.max((analytic - op_mean).abs());
    }
    out.push(CheckResult::evaluate(
        "arrangements/avcp-soundness-analytic",
        analytic_dev,
        1e-9,
        "max |arrangement mean - <transcribed operator>| over 100 random scenarios",
    ));

    // Monte Carlo stays within four standard errors of the analytic mean.
    let mut worst_ratio = 0.0f64;
    for trial in 0..5 {
        let dim = 2 + (trial % 3);
        let (ctx, binding, combine) = random_simple_scenario(dim, config.hbar, &mut rng);
        let names: Vec<String> = combine.symbols().into_iter().collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let arr = ClassicalArrangement::simultaneous(&name_refs, combine)?;
        let qarr = build_quantum_counterpart(
            &arr,
            &ctx,
            &binding,
            None,
            0.0,
            &CounterpartOptions::default(),
        )?;
        let v0 = random_state(dim, &mut rng);
        let analytic = analytic_expected_output(&qarr, &v0)?;
        let mc = monte_carlo_output(&qarr, &v0, 20_000, config.seed.wrapping_add(trial as u64))?;
        let ratio = if mc.stderr == 0.0 {
            if (mc.mean - analytic).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (mc.mean - analytic).abs() / (4.0 * mc.stderr)
        };
        worst_ratio = worst_ratio.max(ratio);
    }
    out.push(CheckResult::evaluate(
        "arrangements/avcp-soundness-montecarlo",
        worst_ratio,
        1.0,
        "max |sampled - analytic| / (4 stderr) over 5 scenarios at 2e4 runs",
    ));

    // The squared-mean functional is representable exactly when the bound
    // observable has no spectral spread.
    let spread_op = random_hermitian(3, config.hbar, &mut rng);
    let squared_mean = |v: &StateVector| {
        let m = expectation(&spread_op, v).expect("Hermitian");
        m * m
    };
    let spread_verdict = representing_operator(&squared_mean, 3, config.hbar, &mut rng);
    let trivial_op = Operator::identity(3, config.hbar).scale(Complex64::new(0.4, 0.0)).symmetrized();
    let trivial_mean = |v: &StateVector| {
        let m = expectation(&trivial_op, v).expect("Hermitian");
        m * m
    };
    let trivial_verdict = representing_operator(&trivial_mean, 3, config.hbar, &mut rng);
    let correct = !spread_verdict.is_yes() && trivial_verdict.is_yes();
    out.push(CheckResult::evaluate(
        "arrangements/squared-mean-representability",
        if correct { 0.0 } else { 1.0 },
        0.5,
        "squared mean: No for spread observables, Yes for multiples of identity",
    ));

    // Permuting commuting same-copy measurements leaves the analytic mean
    // unchanged.
    let mut ctx = CommutationContext::new();
    ctx.declare(ObservableSymbol::generic("a"));
    ctx.declare(ObservableSymbol::generic("b"));
    ctx.declare_commuting("a", "b")?;
    let basis_seed = random_hermitian(4, config.hbar, &mut rng);
    let spec = eigendecompose(&basis_seed, basis_seed.default_degeneracy_tol())?;
    let make = |rng: &mut ChaCha8Rng| {
        let diag = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            (0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)),
        ));
        Operator::general(&spec.eigenvectors * diag * spec.eigenvectors.adjoint(), config.hbar)
            .symmetrized()
    };
    let mut binding = Binding::new();
    binding.insert("a", make(&mut rng))?;
    binding.insert("b", make(&mut rng))?;
    let combine = NCPolynomial::symbol("a").mul(&NCPolynomial::symbol("b"));
    let forward = crate::arrangement::QuantumArrangement::manual(
        vec![vec!["a".to_string(), "b".to_string()]],
        binding.clone(),
        combine.clone(),
        None,
        (0.0, 0.0, 0.0),
        None,
    )?;
    let backward = crate::arrangement::QuantumArrangement::manual(
        vec![vec!["b".to_string(), "a".to_string()]],
        binding,
        combine,
        None,
        (0.0, 0.0, 0.0),
        None,
    )?;
    let mut order_dev = 0.0f64;
    for _ in 0..20 {
        let v0 = random_state(4, &mut rng);
        let lhs = analytic_expected_output(&forward, &v0)?;
        let rhs = analytic_expected_output(&backward, &v0)?;
        order_dev = order_dev.max((lhs - rhs).abs());
    }
    out.push(CheckResult::evaluate(
        "arrangements/order-irrelevance",
        order_dev,
        1e-12,
        "permuting commuting same-copy measurements preserves the mean",
    ));
    Ok(())
}
