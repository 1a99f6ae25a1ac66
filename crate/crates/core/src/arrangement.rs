//! Measurement arrangements and their quantum counterparts.
//!
//! A classical arrangement implements one measurement through other
//! measurements plus a combining polynomial. Its quantum counterpart assigns
//! each input measurement to a copy of the system: non-commuting pairs go on
//! different copies, commuting pairs share one (subsystem measurements are
//! exempt from forced co-location). The engine computes the expected output
//! analytically, simulates it by seeded Monte Carlo, and decides whether a
//! single Hermitian operator reproduces the arrangement's mean on every
//! state.

use crate::operator::{
    eigendecompose, evolve, expectation, random_state, sample_outcome, Operator, OperatorError,
    Spectrum, StateVector,
};
use crate::symbolic::transcribe::{commutation_residual, transcribe, Binding};
use crate::symbolic::{
    is_simple, CommutationContext, NCPolynomial, ObservableSymbol, Simplicity, SymbolicError,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Numeric threshold deciding whether two bound operators commute, relative
/// to the product of their norms.
pub const COPY_COMMUTE_TOL: f64 = 1e-9;
/// Validation tolerance for the average-value condition.
pub const REPRESENTABILITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ArrangementError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("input times differ: measurements must share one time t1")]
    StaggeredInputs,
    #[error("output time must not precede the input time")]
    OutputBeforeInputs,
    #[error("commutation declared in the context disagrees with the bound matrices for ('{left}', '{right}') (residual {residual:.3e})")]
    InconsistentCommutation {
        left: String,
        right: String,
        residual: f64,
    },
    #[error("no copy assignment satisfies the pairwise rules: '{a}' and '{c}' must share a copy through '{b}' but do not commute")]
    CopyConflict { a: String, b: String, c: String },
    #[error("copies must cover exactly the measured symbols; '{0}' is misplaced")]
    CopyCoverage(String),
}

/// The classical side: input measurements at a common time t₁, an output
/// measurement at t₂ ≥ t₁, and the combining polynomial.
#[derive(Debug, Clone)]
pub struct ClassicalArrangement {
    pub inputs: Vec<(ObservableSymbol, f64)>,
    pub output_symbol: ObservableSymbol,
    pub output_time: f64,
    pub combine: NCPolynomial,
}

impl ClassicalArrangement {
    pub fn new(
        inputs: Vec<(ObservableSymbol, f64)>,
        output_symbol: ObservableSymbol,
        output_time: f64,
        combine: NCPolynomial,
    ) -> Result<Self, ArrangementError> {
        let t1 = inputs.first().map(|(_, t)| *t).unwrap_or(output_time);
        if inputs.iter().any(|(_, t)| *t != t1) {
            return Err(ArrangementError::StaggeredInputs);
        }
        if output_time < t1 {
            return Err(ArrangementError::OutputBeforeInputs);
        }
        Ok(Self {
            inputs,
            output_symbol,
            output_time,
            combine,
        })
    }

    /// Inputs and output all at time zero; the common case.
    pub fn simultaneous(
        input_names: &[&str],
        combine: NCPolynomial,
    ) -> Result<Self, ArrangementError> {
        Self::new(
            input_names
                .iter()
                .map(|n| (ObservableSymbol::generic(*n), 0.0))
                .collect(),
            ObservableSymbol::generic("output"),
            0.0,
            combine,
        )
    }

    pub fn input_time(&self) -> f64 {
        self.inputs.first().map(|(_, t)| *t).unwrap_or(0.0)
    }
}

/// Options for the copy-assignment step.
#[derive(Debug, Clone, Default)]
pub struct CounterpartOptions {
    /// Subsystem slot of each symbol, when the measurements act on factors of
    /// a composite system. Commuting pairs in distinct slots are exempt from
    /// forced co-location.
    pub subsystem_slots: BTreeMap<String, usize>,
    /// Place cross-slot commuting pairs on separate copies instead of
    /// co-locating them (both choices are admissible for subsystems).
    pub separate_commuting_subsystems: bool,
}

/// The quantum counterpart: a copy partition with per-copy measurement
/// order, optional evolution, the binding, and the transcribed output
/// operator when the combine admits one.
#[derive(Debug, Clone)]
pub struct QuantumArrangement {
    copies: Vec<Vec<String>>,
    evolution: Option<Operator>,
    t0: f64,
    t1: f64,
    t2: f64,
    binding: Binding,
    combine: NCPolynomial,
    output_measurement: Option<Operator>,
}

impl QuantumArrangement {
    pub fn copies(&self) -> &[Vec<String>] {
        &self.copies
    }

    pub fn binding(&self) -> &Binding {
        &self.binding
    }

    pub fn combine(&self) -> &NCPolynomial {
        &self.combine
    }

    pub fn output_measurement(&self) -> Option<&Operator> {
        self.output_measurement.as_ref()
    }

    pub fn hbar(&self) -> f64 {
        self.binding.hbar().unwrap_or(1.0)
    }

    /// Manual construction with an explicit copy layout. Used by the demos
    /// that deliberately deviate from the mandated assignment (for example
    /// the two-copy squaring arrangement).
    pub fn manual(
        copies: Vec<Vec<String>>,
        binding: Binding,
        combine: NCPolynomial,
        evolution: Option<Operator>,
        times: (f64, f64, f64),
        output_measurement: Option<Operator>,
    ) -> Result<Self, ArrangementError> {
        let mut placed: BTreeSet<&String> = BTreeSet::new();
        for copy in &copies {
            for sym in copy {
                if !placed.insert(sym) {
                    return Err(ArrangementError::CopyCoverage(sym.clone()));
                }
            }
        }
        for sym in combine.symbols() {
            if !placed.contains(&sym) {
                return Err(ArrangementError::CopyCoverage(sym));
            }
        }
        Ok(Self {
            copies,
            evolution,
            t0: times.0,
            t1: times.1,
            t2: times.2,
            binding,
            combine,
            output_measurement,
        })
    }
}

/// Builds the mandated counterpart of a classical arrangement: the finest
/// copy partition with non-commuting pairs separated and commuting
/// non-subsystem pairs co-located, plus the transcribed output measurement
/// on its own copy at t₂.
pub fn build_quantum_counterpart(
    arr: &ClassicalArrangement,
    ctx: &CommutationContext,
    binding: &Binding,
    evolution: Option<Operator>,
    t0: f64,
    options: &CounterpartOptions,
) -> Result<QuantumArrangement, ArrangementError> {
    // Refuse non-simple combines outright: the correspondence does not apply.
    match is_simple(&arr.combine, ctx)? {
        Simplicity::Simple => {}
        Simplicity::NotSimple { witness } => {
            return Err(SymbolicError::NotSimple { witness }.into());
        }
    }

    let names: Vec<String> = arr.inputs.iter().map(|(s, _)| s.name.clone()).collect();
    for name in &names {
        if binding.get(name).is_none() {
            return Err(SymbolicError::UnboundSymbol(name.clone()).into());
        }
    }

    // Numeric commutation is ground truth; context declarations are
    // cross-checked against it.
    let mut commutes_num: BTreeMap<(String, String), bool> = BTreeMap::new();
    for (i, a) in names.iter().enumerate() {
        for b in names.iter().skip(i + 1) {
            if a == b {
                continue;
            }
            let residual = commutation_residual(
                binding.get(a).expect("checked above"),
                binding.get(b).expect("checked above"),
            );
            let numeric = residual < COPY_COMMUTE_TOL;
            let declared = ctx.commutes(a, b)?;
            if numeric != declared {
                return Err(ArrangementError::InconsistentCommutation {
                    left: a.clone(),
                    right: b.clone(),
                    residual,
                });
            }
            commutes_num.insert((a.clone(), b.clone()), numeric);
            commutes_num.insert((b.clone(), a.clone()), numeric);
        }
    }

    // Union-find over must-share edges.
    let index: BTreeMap<&String, usize> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let cross_slot = |a: &String, b: &String| -> bool {
        match (options.subsystem_slots.get(a), options.subsystem_slots.get(b)) {
            (Some(sa), Some(sb)) => sa != sb,
            _ => false,
        }
    };
    for (i, a) in names.iter().enumerate() {
        for (j, b) in names.iter().enumerate().skip(i + 1) {
            if a == b {
                continue;
            }
            let commuting = commutes_num[&(a.clone(), b.clone())];
            let exempt = cross_slot(a, b);
            let must_share = commuting && (!exempt || !options.separate_commuting_subsystems);
            if must_share {
                let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    // Non-commuting pairs must now sit in different classes.
    for (i, a) in names.iter().enumerate() {
        for (j, b) in names.iter().enumerate().skip(i + 1) {
            if a == b {
                continue;
            }
            if !commutes_num[&(a.clone(), b.clone())]
                && find(&mut parent, i) == find(&mut parent, j)
            {
                // Recover one intermediary for the message.
                let witness = names
                    .iter()
                    .find(|c| {
                        let k = index[*c];
                        k != i && k != j && find(&mut parent, k) == find(&mut parent, i)
                    })
                    .cloned()
                    .unwrap_or_else(|| a.clone());
                return Err(ArrangementError::CopyConflict {
                    a: a.clone(),
                    b: witness,
                    c: b.clone(),
                });
            }
        }
    }

    // Assemble copies in first-appearance order, sequence within a copy in
    // input order.
    let mut copies: Vec<Vec<String>> = Vec::new();
    let mut root_to_copy: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (i, name) in names.iter().enumerate() {
        if !seen.insert(name.clone()) {
            continue;
        }
        let root = find(&mut parent, i);
        match root_to_copy.get(&root) {
            Some(&c) => copies[c].push(name.clone()),
            None => {
                root_to_copy.insert(root, copies.len());
                copies.push(vec![name.clone()]);
            }
        }
    }

    let output_measurement = transcribe(&arr.combine, ctx, binding)?;
    Ok(QuantumArrangement {
        copies,
        evolution,
        t0,
        t1: arr.input_time(),
        t2: arr.output_time,
        binding: binding.clone(),
        combine: arr.combine.clone(),
        output_measurement: Some(output_measurement),
    })
}

fn state_at(
    v0: &StateVector,
    evolution: Option<&Operator>,
    dt: f64,
) -> Result<StateVector, OperatorError> {
    match evolution {
        Some(h) if dt != 0.0 => evolve(v0, h, dt),
        _ => Ok(v0.clone()),
    }
}

fn spectra_for(
    qarr: &QuantumArrangement,
) -> Result<BTreeMap<String, Spectrum>, ArrangementError> {
    let mut spectra = BTreeMap::new();
    for copy in &qarr.copies {
        for sym in copy {
            if spectra.contains_key(sym) {
                continue;
            }
            let op = qarr
                .binding
                .get(sym)
                .ok_or_else(|| SymbolicError::UnboundSymbol(sym.clone()))?;
            spectra.insert(sym.clone(), eigendecompose(op, op.default_degeneracy_tol())?);
        }
    }
    Ok(spectra)
}

/// One branch of the per-copy collapse chain: values measured so far and the
/// branch probability.
#[derive(Debug, Clone)]
struct Branch {
    values: BTreeMap<String, f64>,
    probability: f64,
}

fn copy_outcome_distribution(
    order: &[String],
    spectra: &BTreeMap<String, Spectrum>,
    state: &StateVector,
) -> Result<Vec<Branch>, ArrangementError> {
    let mut branches = vec![(state.clone(), Branch {
        values: BTreeMap::new(),
        probability: 1.0,
    })];
    for sym in order {
        let spectrum = &spectra[sym];
        let mut next = Vec::new();
        for (branch_state, branch) in &branches {
            let probs = spectrum.eigenspace_probabilities(branch_state);
            for (g, &p) in probs.iter().enumerate() {
                if p < 1e-15 {
                    continue;
                }
                let post = spectrum.project(g, branch_state)?;
                let mut values = branch.values.clone();
                values.insert(sym.clone(), spectrum.eigenspace_value(g));
                next.push((post, Branch {
                    values,
                    probability: branch.probability * p,
                }));
            }
        }
        branches = next;
    }
    Ok(branches.into_iter().map(|(_, b)| b).collect())
}

/// Expected output of the arrangement: the combine evaluated under the
/// product of per-copy outcome distributions, sequential same-copy
/// measurements expanded through the collapse chain.
pub fn analytic_expected_output(
    qarr: &QuantumArrangement,
    v0: &StateVector,
) -> Result<f64, ArrangementError> {
    let state_t1 = state_at(v0, qarr.evolution.as_ref(), qarr.t1 - qarr.t0)?;
    let spectra = spectra_for(qarr)?;
    let per_copy: Vec<Vec<Branch>> = qarr
        .copies
        .iter()
        .map(|copy| copy_outcome_distribution(copy, &spectra, &state_t1))
        .collect::<Result<_, _>>()?;

    let hbar = qarr.hbar();
    let mut mean = 0.0;
    let mut assignment: BTreeMap<String, f64> = BTreeMap::new();
    // Walk the cartesian product of per-copy branches.
    let mut indices = vec![0usize; per_copy.len()];
    loop {
        let mut probability = 1.0;
        assignment.clear();
        for (c, &idx) in indices.iter().enumerate() {
            let branch = &per_copy[c][idx];
            probability *= branch.probability;
            assignment.extend(branch.values.iter().map(|(k, v)| (k.clone(), *v)));
        }
        let value = qarr.combine.eval_numeric(&assignment, hbar);
        debug_assert!(value.im.abs() < 1e-9, "combine must be real-valued");
        mean += probability * value.re;

        // Advance the multi-index.
        let mut c = 0;
        loop {
            if c == indices.len() {
                return Ok(mean);
            }
            indices[c] += 1;
            if indices[c] < per_copy[c].len() {
                break;
            }
            indices[c] = 0;
            c += 1;
        }
        if per_copy.is_empty() {
            return Ok(mean);
        }
    }
}

/// Mean of the transcribed output measurement at t₂, for comparison against
/// the arrangement side.
pub fn operator_mean(
    qarr: &QuantumArrangement,
    v0: &StateVector,
) -> Result<Option<f64>, ArrangementError> {
    let Some(op) = &qarr.output_measurement else {
        return Ok(None);
    };
    let state_t2 = state_at(v0, qarr.evolution.as_ref(), qarr.t2 - qarr.t0)?;
    Ok(Some(expectation(op, &state_t2)?))
}

/// Monte Carlo estimate of the arrangement output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloResult {
    pub mean: f64,
    pub stderr: f64,
    pub n_runs: usize,
}

/// Simulates `n_runs` independent runs. Each run draws from its own ChaCha
/// substream of the master seed, so results are deterministic for a fixed
/// seed and identical under any later parallel split; the reduction is the
/// ordered run-index sum.
pub fn monte_carlo_output(
    qarr: &QuantumArrangement,
    v0: &StateVector,
    n_runs: usize,
    master_seed: u64,
) -> Result<MonteCarloResult, ArrangementError> {
    assert!(n_runs >= 1, "n_runs must be at least 1");
    let state_t1 = state_at(v0, qarr.evolution.as_ref(), qarr.t1 - qarr.t0)?;
    let spectra = spectra_for(qarr)?;
    let hbar = qarr.hbar();
    let base = ChaCha8Rng::seed_from_u64(master_seed);

    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    let mut assignment: BTreeMap<String, f64> = BTreeMap::new();
    for run in 0..n_runs {
        let mut rng = base.clone();
        rng.set_stream(run as u64);
        assignment.clear();
        for copy in &qarr.copies {
            let mut state = state_t1.clone();
            for sym in copy {
                let record = sample_outcome(&spectra[sym], &state, &mut rng)?;
                assignment.insert(sym.clone(), record.value);
                state = record.post_state;
            }
        }
        let value = qarr.combine.eval_numeric(&assignment, hbar);
        debug_assert!(value.im.abs() < 1e-9);
        sum += value.re;
        sumsq += value.re * value.re;
    }

    let n = n_runs as f64;
    let mean = sum / n;
    let variance = if n_runs > 1 {
        ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloResult {
        mean,
        stderr: (variance / n).sqrt(),
        n_runs,
    })
}

/// Verdict of the average-value condition for a state functional.
#[derive(Debug, Clone)]
pub enum Representability {
    Yes(Operator),
    No {
        worst_violation: f64,
        worst_state: StateVector,
    },
}

impl Representability {
    pub fn is_yes(&self) -> bool {
        matches!(self, Representability::Yes(_))
    }
}

/// Reconstructs the candidate Hermitian operator for a state functional by
/// polarization probing, then validates the average-value condition on
/// random states. Functionals that are not quadratic forms (such as the
/// squared mean) survive the probing but fail the validation.
pub fn representing_operator(
    expected_output: &dyn Fn(&StateVector) -> f64,
    dim: usize,
    hbar: f64,
    rng: &mut ChaCha8Rng,
) -> Representability {
    assert!(dim <= 64, "probe count is dim², capped at dim = 64");
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    let inv_sqrt2 = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let i_unit = Complex64::new(0.0, 1.0);

    for j in 0..dim {
        let e_j = StateVector::basis_state(dim, j);
        mat[(j, j)] = Complex64::new(expected_output(&e_j), 0.0);
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let half_trace = 0.5 * (mat[(j, j)].re + mat[(k, k)].re);

            let mut plus = DVector::<Complex64>::zeros(dim);
            plus[j] = inv_sqrt2;
            plus[k] = inv_sqrt2;
            let real_part =
                expected_output(&StateVector::new(plus).expect("unit probe")) - half_trace;

            let mut phased = DVector::<Complex64>::zeros(dim);
            phased[j] = inv_sqrt2;
            phased[k] = inv_sqrt2 * i_unit;
            // ⟨M⟩ on (e_j + i e_k)/√2 equals half_trace − Im M_jk.
            let imag_part =
                half_trace - expected_output(&StateVector::new(phased).expect("unit probe"));

            mat[(j, k)] = Complex64::new(real_part, imag_part);
            mat[(k, j)] = Complex64::new(real_part, -imag_part);
        }
    }

    let candidate =
        Operator::hermitian(mat, hbar).expect("polarization reconstruction is Hermitian");

    let mut worst_violation = 0.0;
    let mut worst_state = StateVector::basis_state(dim, 0);
    for _ in 0..200 {
        let v = random_state(dim, rng);
        let predicted = expectation(&candidate, &v).expect("candidate is Hermitian");
        let actual = expected_output(&v);
        let violation = (predicted - actual).abs();
        if violation > worst_violation {
            worst_violation = violation;
            worst_state = v;
        }
    }
    if worst_violation <= REPRESENTABILITY_TOL {
        Representability::Yes(candidate)
    } else {
        Representability::No {
            worst_violation,
            worst_state,
        }
    }
}

/// Analytic mean, sampled mean with its standard error, and the
/// representability verdict for one scenario run.
#[derive(Debug, Clone)]
pub struct ArrangementReport {
    pub analytic_mean: f64,
    pub sampled_mean: f64,
    pub sampled_stderr: f64,
    pub n_runs: usize,
    pub representable: Representability,
}

/// Runs the full pipeline for one arrangement and initial state.
pub fn run_arrangement(
    qarr: &QuantumArrangement,
    v0: &StateVector,
    n_runs: usize,
    master_seed: u64,
) -> Result<ArrangementReport, ArrangementError> {
    let analytic_mean = analytic_expected_output(qarr, v0)?;
    let mc = monte_carlo_output(qarr, v0, n_runs, master_seed)?;
    let dim = v0.dim();
    let functional = |state: &StateVector| {
        analytic_expected_output(qarr, state).expect("functional evaluation")
    };
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ 0x5eed_cafe);
    let representable = representing_operator(&functional, dim, qarr.hbar(), &mut rng);
    Ok(ArrangementReport {
        analytic_mean,
        sampled_mean: mc.mean,
        sampled_stderr: mc.stderr,
        n_runs,
        representable,
    })
}
