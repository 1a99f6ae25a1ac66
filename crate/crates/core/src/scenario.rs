//! Declarative scenario and config files.
//!
//! One TOML dialect serves every command: scenarios name symbols, operator
//! bindings (spin component, grid operator, or explicit matrix file), the
//! combine expression, times, seed, and run count. Matrix files are plain
//! text: the dimension followed by row-major `re im` pairs.

use crate::arrangement::{
    build_quantum_counterpart, ArrangementError, ClassicalArrangement, CounterpartOptions,
    QuantumArrangement,
};
use crate::operator::{Operator, OperatorError, StateVector};
use crate::repr::grid::grid_representation;
use crate::repr::spin::spin_operators;
use crate::repr::{Axis, ReprError};
use crate::scalar::Scalar;
use crate::symbolic::parse::{parse_polynomial, ParseError};
use crate::symbolic::transcribe::{transcribe, Binding};
use crate::symbolic::{
    is_simple, CommutationContext, ObservableSymbol, Simplicity, SymbolRole, SymbolicError,
};
use crate::verify::SuiteConfig;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Expression(#[from] ParseError),
    #[error("symbol '{0}' references unknown operator")]
    UnknownOperator(String),
    #[error("bad matrix file {path}: {message}")]
    BadMatrixFile { path: PathBuf, message: String },
    #[error("unknown axis or component '{0}'")]
    BadComponent(String),
    #[error("unknown grid operator '{0}' (expected x, p, or d)")]
    BadGridOperator(String),
    #[error("unknown role '{0}'")]
    BadRole(String),
    #[error("initial state: {0}")]
    BadInitialState(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

fn default_hbar() -> f64 {
    1.0
}

fn default_n_runs() -> usize {
    100_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioMeta,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub symbols: BTreeMap<String, SymbolSpec>,
    #[serde(default)]
    pub commutation: CommutationSpec,
    #[serde(default)]
    pub layout: Option<LayoutSpec>,
    pub initial_state: InitialStateSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub name: String,
    pub combine: String,
    /// Measurement order of the inputs; defaults to sorted symbol names.
    #[serde(default)]
    pub inputs: Option<Vec<String>>,
    #[serde(default = "default_n_runs")]
    pub n_runs: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub t1: f64,
    #[serde(default)]
    pub t2: f64,
    /// Name of the operator driving evolution between the times, if any.
    #[serde(default)]
    pub evolution: Option<String>,
    /// Place commuting subsystem measurements on separate copies.
    #[serde(default)]
    pub separate_commuting_subsystems: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// A spin component L_x, L_y, or L_z for quantum number `j`.
    Spin {
        j: f64,
        component: String,
        #[serde(default = "default_hbar")]
        hbar: f64,
    },
    /// A grid operator: position `x`, momentum `p`, or displacement `d`.
    Grid {
        n: usize,
        length: f64,
        which: String,
        #[serde(default = "default_hbar")]
        hbar: f64,
    },
    /// An explicit Hermitian matrix loaded from a text file.
    Matrix {
        path: String,
        #[serde(default = "default_hbar")]
        hbar: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub operator: String,
    #[serde(default)]
    pub role: Option<String>,
    #[serde(default)]
    pub subsystem_slot: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutationSpec {
    #[serde(default)]
    pub commuting: Vec<[String; 2]>,
    /// Pairs with canonical commutator i·ħ.
    #[serde(default)]
    pub canonical: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub copies: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    Random { seed: u64 },
    Basis { index: usize },
    Amplitudes { amplitudes: Vec<[f64; 2]> },
}

/// A scenario resolved into runnable pieces.
pub struct LoadedScenario {
    pub name: String,
    pub arrangement: QuantumArrangement,
    pub initial_state: StateVector,
    pub n_runs: usize,
    pub seed: Option<u64>,
    /// Dimension of the bound Hilbert space.
    pub dim: usize,
}

fn parse_role(role: &Option<String>) -> Result<SymbolRole, ScenarioError> {
    match role.as_deref() {
        None | Some("generic") => Ok(SymbolRole::Generic),
        Some("position") => Ok(SymbolRole::Position),
        Some("momentum") => Ok(SymbolRole::Momentum),
        Some("angular_momentum") => Ok(SymbolRole::AngularMomentum),
        Some(other) => Err(ScenarioError::BadRole(other.to_string())),
    }
}

fn build_operator(spec: &OperatorSpec, base_dir: &Path) -> Result<Operator, ScenarioError> {
    match spec {
        OperatorSpec::Spin { j, component, hbar } => {
            let rep = spin_operators(*j, *hbar)?;
            let axis: Axis = component.parse().map_err(|_| {
                ScenarioError::BadComponent(component.clone())
            })?;
            Ok(rep.component(axis).clone())
        }
        OperatorSpec::Grid {
            n,
            length,
            which,
            hbar,
        } => {
            let grid = grid_representation(*n, *length, *hbar)?;
            match which.as_str() {
                "x" => Ok(grid.position().clone()),
                "p" => Ok(grid.momentum().clone()),
                "d" => Ok(grid.displacement().clone()),
                other => Err(ScenarioError::BadGridOperator(other.to_string())),
            }
        }
        OperatorSpec::Matrix { path, hbar } => {
            let full = base_dir.join(path);
            let mat = read_matrix_file(&full)?;
            Ok(Operator::hermitian(mat, *hbar)?)
        }
    }
}

/// Loads and resolves a scenario file.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ScenarioFile = toml::from_str(&text)?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    resolve_scenario(&file, base_dir)
}

pub fn resolve_scenario(
    file: &ScenarioFile,
    base_dir: &Path,
) -> Result<LoadedScenario, ScenarioError> {
    let combine = parse_polynomial(&file.scenario.combine)?;

    let mut operators: BTreeMap<String, Operator> = BTreeMap::new();
    for (name, spec) in &file.operators {
        operators.insert(name.clone(), build_operator(spec, base_dir)?);
    }

    let mut ctx = CommutationContext::new();
    let mut binding = Binding::new();
    let mut options = CounterpartOptions {
        separate_commuting_subsystems: file.scenario.separate_commuting_subsystems,
        ..CounterpartOptions::default()
    };
    for (name, spec) in &file.symbols {
        let mut symbol = ObservableSymbol::new(name.clone(), parse_role(&spec.role)?);
        symbol.time_tag = Some(file.scenario.t1);
        ctx.declare(symbol);
        let op = operators
            .get(&spec.operator)
            .ok_or_else(|| ScenarioError::UnknownOperator(name.clone()))?;
        binding.insert(name.clone(), op.clone())?;
        if let Some(slot) = spec.subsystem_slot {
            options.subsystem_slots.insert(name.clone(), slot);
        }
    }
    for [a, b] in &file.commutation.commuting {
        ctx.declare_commuting(a, b)?;
    }
    for [a, b] in &file.commutation.canonical {
        ctx.declare_canonical(a, b, &Scalar::i() * &Scalar::hbar_pow(1))?;
    }

    let dim = binding
        .dim()
        .ok_or_else(|| ScenarioError::BadInitialState("no symbols bound".into()))?;

    let evolution = match &file.scenario.evolution {
        Some(name) => Some(
            operators
                .get(name)
                .cloned()
                .ok_or_else(|| ScenarioError::UnknownOperator(name.clone()))?,
        ),
        None => None,
    };

    let input_names: Vec<String> = match &file.scenario.inputs {
        Some(list) => list.clone(),
        None => combine.symbols().into_iter().collect(),
    };

    let arrangement = match &file.layout {
        Some(layout) => {
            // Explicit layout: transcribe when the combine admits it, so the
            // report can still compare against the operator mean.
            let output = match is_simple(&combine, &ctx)? {
                Simplicity::Simple => Some(transcribe(&combine, &ctx, &binding)?),
                Simplicity::NotSimple { .. } => None,
            };
            QuantumArrangement::manual(
                layout.copies.clone(),
                binding,
                combine,
                evolution,
                (file.scenario.t0, file.scenario.t1, file.scenario.t2),
                output,
            )?
        }
        None => {
            let inputs = input_names
                .iter()
                .map(|n| (ObservableSymbol::generic(n.clone()), file.scenario.t1))
                .collect();
            let classical = ClassicalArrangement::new(
                inputs,
                ObservableSymbol::generic(&file.scenario.name),
                file.scenario.t2,
                combine,
            )?;
            build_quantum_counterpart(
                &classical,
                &ctx,
                &binding,
                evolution,
                file.scenario.t0,
                &options,
            )?
        }
    };

    let initial_state = match &file.initial_state {
        InitialStateSpec::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            crate::operator::random_state(dim, &mut rng)
        }
        InitialStateSpec::Basis { index } => {
            if *index >= dim {
                return Err(ScenarioError::BadInitialState(format!(
                    "basis index {index} out of range for dimension {dim}"
                )));
            }
            StateVector::basis_state(dim, *index)
        }
        InitialStateSpec::Amplitudes { amplitudes } => {
            if amplitudes.len() != dim {
                return Err(ScenarioError::BadInitialState(format!(
                    "{} amplitudes for dimension {dim}",
                    amplitudes.len()
                )));
            }
            let v = DVector::from_iterator(
                dim,
                amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)),
            );
            StateVector::normalized(v)?
        }
    };

    Ok(LoadedScenario {
        name: file.scenario.name.clone(),
        arrangement,
        initial_state,
        n_runs: file.scenario.n_runs,
        seed: file.scenario.seed,
        dim,
    })
}

/// Reads a matrix file: the dimension, then row-major `re im` pairs.
pub fn read_matrix_file(path: &Path) -> Result<DMatrix<Complex64>, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |message: &str| ScenarioError::BadMatrixFile {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    let mut tokens = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split_whitespace());
    let n: usize = tokens
        .next()
        .ok_or_else(|| bad("empty file"))?
        .parse()
        .map_err(|_| bad("first token must be the dimension"))?;
    let mut values = Vec::with_capacity(2 * n * n);
    for tok in tokens {
        let v: f64 = tok
            .parse()
            .map_err(|_| bad(&format!("bad number '{tok}'")))?;
        values.push(v);
    }
    if values.len() != 2 * n * n {
        return Err(bad(&format!(
            "expected {} numbers after the dimension, found {}",
            2 * n * n,
            values.len()
        )));
    }
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = 2 * (i * n + j);
            mat[(i, j)] = Complex64::new(values[k], values[k + 1]);
        }
    }
    Ok(mat)
}

/// Writes the matrix file format read by [`read_matrix_file`].
pub fn write_matrix_file(path: &Path, mat: &DMatrix<Complex64>) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "{}", mat.nrows())?;
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols())
            .map(|j| format!("{:.17e} {:.17e}", mat[(i, j)].re, mat[(i, j)].im))
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Raw shape of the suite config file; keys mirror [`SuiteConfig`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    j: Option<f64>,
    hbar: Option<f64>,
    seed: Option<u64>,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    wavepacket: WavepacketSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n: Option<usize>,
    length: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WavepacketSection {
    center: Option<f64>,
    width: Option<f64>,
}

/// Loads a suite config, filling unset keys from the defaults.
pub fn load_suite_config(path: &Path) -> Result<SuiteConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: ConfigFile = toml::from_str(&text)?;
    let mut config = SuiteConfig::default();
    if let Some(j) = raw.j {
        config.j_max = j;
    }
    if let Some(hbar) = raw.hbar {
        config.hbar = hbar;
    }
    if let Some(seed) = raw.seed {
        config.seed = seed;
    }
    if let Some(n) = raw.grid.n {
        config.grid_n = n;
    }
    if let Some(length) = raw.grid.length {
        config.grid_length = length;
    }
    if let Some(center) = raw.wavepacket.center {
        config.wavepacket_center = center;
    }
    if let Some(width) = raw.wavepacket.width {
        config.wavepacket_width = width;
    }
    Ok(config)
}

/// A context file provides symbols, operators, and commutation facts for the
/// expression-transcription command; it is a scenario file without the
/// scenario/initial-state sections.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextFile {
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub symbols: BTreeMap<String, SymbolSpec>,
    #[serde(default)]
    pub commutation: CommutationSpec,
}

pub fn load_context(path: &Path) -> Result<(CommutationContext, Binding), ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ContextFile = toml::from_str(&text)?;
    let base_dir = path.parent().unwrap_or(Path::new("."));

    let mut operators: BTreeMap<String, Operator> = BTreeMap::new();
    for (name, spec) in &file.operators {
        operators.insert(name.clone(), build_operator(spec, base_dir)?);
    }
    let mut ctx = CommutationContext::new();
    let mut binding = Binding::new();
    for (name, spec) in &file.symbols {
        ctx.declare(ObservableSymbol::new(name.clone(), parse_role(&spec.role)?));
        let op = operators
            .get(&spec.operator)
            .ok_or_else(|| ScenarioError::UnknownOperator(name.clone()))?;
        binding.insert(name.clone(), op.clone())?;
    }
    for [a, b] in &file.commutation.commuting {
        ctx.declare_commuting(a, b)?;
    }
    for [a, b] in &file.commutation.canonical {
        ctx.declare_canonical(a, b, &Scalar::i() * &Scalar::hbar_pow(1))?;
    }
    Ok((ctx, binding))
}
