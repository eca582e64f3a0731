//! Named verification checks: symmetrization theorem, projector properties,
//! robustness of the residual control error, noise suppression, noiseless
//! subsystems and fidelity comparisons from joint simulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{validate_path, PathCheck};
use crate::dynamics::{q_map, residual_error, simulate_cycles, simulate_uncontrolled, DriftModel};
use crate::error::{Error, Result};
use crate::group::{
    algebra_basis, center_basis, commutant_basis, distance_from_span, pi_g, UnitaryRep,
};
use crate::irreps::{decompose_irreps, IrrepDecomposition, DEFAULT_CLUSTER_TOL};
use crate::linalg::{
    c, commutator, identity, kron, op_norm, random_complex, random_hermitian, random_state,
    random_traceless_hermitian, trace_env, CMat,
};
use crate::pulses::{apply_fault, eulerian_schedule, FaultModel};

use super::scenario::{single_qubit_operators, Scenario, ScenarioKind};

/// Relative threshold below which a block action counts as absent.
pub const PROTECTION_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum ResidualExpectation {
    Zero,
    /// Equal to the given operator and inside the center.
    Equals(CMat),
    Central,
    Commutant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suppression {
    /// Only the `D_J` factors are untouched.
    DFactor,
    /// Symmetrized noise is central: every `H_J` is a protected subspace.
    Central,
    /// Symmetrized noise vanishes.
    Full,
}

#[derive(Debug, Clone, Copy)]
pub enum FidelityFault {
    None,
    /// Random traceless constant error per generator with the given
    /// physical operator norm.
    RandomTraceless { norm: f64 },
}

#[derive(Debug, Clone)]
pub enum Check {
    PathLength { expected: usize },
    ReferencePath,
    Theorem { trials: usize, tol: f64 },
    Projector { trials: usize, tol: f64 },
    Robustness { fault: String, expect: ResidualExpectation, tol: f64 },
    RandomFaults { count: usize, amplitude: f64, tol: f64 },
    NoiseSuppression { expect: Suppression, tol: f64 },
    AbelianAlgebra { tol: f64 },
    NoiselessSubsystem { dimension: usize, trials: usize, tol: f64 },
    DecouplingFidelity {
        fault: FidelityFault,
        delta_t: f64,
        cycles: usize,
        states: usize,
        min_ratio: f64,
    },
    SubsystemFidelity {
        dimension: usize,
        delta_t: f64,
        cycles: usize,
        states: usize,
        min_ratio: f64,
    },
}

impl Check {
    pub fn name(&self) -> String {
        match self {
            Check::PathLength { .. } => "path-length".into(),
            Check::ReferencePath => "reference-path".into(),
            Check::Theorem { .. } => "theorem".into(),
            Check::Projector { .. } => "projector".into(),
            Check::Robustness { fault, .. } => format!("robustness:{fault}"),
            Check::RandomFaults { .. } => "random-faults".into(),
            Check::NoiseSuppression { .. } => "noise-suppression".into(),
            Check::AbelianAlgebra { .. } => "abelian-algebra".into(),
            Check::NoiselessSubsystem { .. } => "noiseless-subsystem".into(),
            Check::DecouplingFidelity { .. } => "decoupling-fidelity".into(),
            Check::SubsystemFidelity { .. } => "subsystem-fidelity".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub note: String,
}

/// Parameters shared by every check of one run.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub quad_points: usize,
    pub slices: usize,
    pub seed: u64,
    pub delta_t: Option<f64>,
    pub cycles: Option<usize>,
    pub random_faults: Option<usize>,
    pub fault_amplitude: Option<f64>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            quad_points: crate::dynamics::DEFAULT_QUAD_POINTS,
            slices: 64,
            seed: 0,
            delta_t: None,
            cycles: None,
            random_faults: None,
            fault_amplitude: None,
        }
    }
}

fn check_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64))
}

fn random_matrix<R: Rng>(rng: &mut R, d: usize) -> CMat {
    CMat::from_fn(d, d, |_, _| random_complex(rng))
}

fn max_commutator(rep: &UnitaryRep, y: &CMat) -> f64 {
    rep.matrices()
        .iter()
        .map(|g| commutator(g, y).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub hypothesis: bool,
    pub trials: usize,
    pub max_deviation: f64,
    pub tol: f64,
    /// `None` when the hypothesis fails and the check does not apply.
    pub passed: Option<bool>,
    pub notice: Option<String>,
}

/// Compare `Q(X)` with `Π(X)` on random Hermitian inputs.
pub fn verify_theorem(
    scenario: &Scenario,
    trials: usize,
    tol: f64,
    quad_points: usize,
    seed: u64,
) -> Result<TheoremReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = scenario.rep.dim();
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let x = random_hermitian(&mut rng, d);
        let q = q_map(&scenario.rep, &scenario.profiles, &x, quad_points)?;
        let p = pi_g(&scenario.rep, &x)?;
        max_deviation = max_deviation.max((q - p).norm());
    }
    let hypothesis = scenario.in_algebra();
    Ok(TheoremReport {
        hypothesis,
        trials,
        max_deviation,
        tol,
        passed: hypothesis.then_some(max_deviation <= tol),
        notice: (!hypothesis).then(|| {
            "hypothesis not met: some control Hamiltonian lies outside the group algebra".into()
        }),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectorReport {
    pub pi_idempotence: f64,
    pub pi_commutation: f64,
    pub q_idempotence: Option<f64>,
    pub q_commutation: f64,
}

impl ProjectorReport {
    pub fn worst(&self) -> f64 {
        [
            self.pi_idempotence,
            self.pi_commutation,
            self.q_idempotence.unwrap_or(0.0),
            self.q_commutation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Idempotence and commutant membership of `Π` and `Q` on random inputs.
/// `Q` idempotence is only measured when the profiles lie in the algebra.
pub fn projector_properties(
    scenario: &Scenario,
    trials: usize,
    quad_points: usize,
    seed: u64,
) -> Result<ProjectorReport> {
    let rep = &scenario.rep;
    let profiles = &scenario.profiles;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_alg = scenario.in_algebra();
    let mut r = ProjectorReport {
        pi_idempotence: 0.0,
        pi_commutation: 0.0,
        q_idempotence: in_alg.then_some(0.0),
        q_commutation: 0.0,
    };
    for _ in 0..trials {
        let x = random_matrix(&mut rng, rep.dim());
        let p = pi_g(rep, &x)?;
        r.pi_idempotence = r.pi_idempotence.max((pi_g(rep, &p)? - &p).norm());
        r.pi_commutation = r.pi_commutation.max(max_commutator(rep, &p));
        let q = q_map(rep, profiles, &x, quad_points)?;
        r.q_commutation = r.q_commutation.max(max_commutator(rep, &q));
        if let Some(v) = r.q_idempotence.as_mut() {
            let qq = q_map(rep, profiles, &q, quad_points)?;
            *v = v.max((qq - &q).norm());
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockClass {
    /// Every operator acts as a scalar on `H_J`.
    ProtectedSubspace,
    /// Every operator acts as `c ⊗ I`: the `D_J` factor is noiseless.
    NoiselessDFactor,
    /// Every operator acts as `I ⊗ a`: the `C_J` factor is untouched.
    ProtectedCFactor,
    Unprotected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustnessCase {
    /// Fault in the algebra, scalar center: residual is a multiple of I.
    PrimaryInAlgebra,
    /// Fault in the algebra: residual is central, diagonal per block.
    CentralInAlgebra,
    /// Arbitrary fault: residual only known to lie in the commutant.
    CommutantOnly,
}

#[derive(Debug, Clone)]
pub struct BlockReport {
    pub label: String,
    pub multiplicity: usize,
    pub dimension: usize,
    pub class: BlockClass,
    pub residual_norm: f64,
    pub residual_scalar_deviation: f64,
    pub noise_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SubsystemReport {
    pub decomposition: IrrepDecomposition,
    pub blocks: Vec<BlockReport>,
    pub residual: CMat,
    pub residual_norm: f64,
    pub commutant_distance: f64,
    pub center_distance: f64,
    pub fault_in_algebra: bool,
    pub primary: bool,
    pub case: RobustnessCase,
}

fn label_blocks(scenario: &Scenario, dec: &mut IrrepDecomposition) {
    if scenario.kind == ScenarioKind::SymmetricS3 {
        for b in &mut dec.blocks {
            b.label = match (b.multiplicity, b.dimension) {
                (_, 2) => "[2 1]".into(),
                (_, 1) => "[3]".into(),
                _ => b.label.clone(),
            };
        }
    }
}

pub fn decomposition(scenario: &Scenario, seed: u64) -> Result<IrrepDecomposition> {
    let mut dec = decompose_irreps(&scenario.rep, DEFAULT_CLUSTER_TOL, seed)?;
    label_blocks(scenario, &mut dec);
    Ok(dec)
}

fn classify(dec: &IrrepDecomposition, block: usize, ops: &[(CMat, f64)]) -> BlockClass {
    let mut scalar = true;
    let mut d_factor = true;
    let mut c_factor = true;
    for (op, scale) in ops {
        let thr = PROTECTION_THRESHOLD * scale.max(f64::MIN_POSITIVE);
        let act = dec.block_action(block, op);
        scalar &= act.scalar_deviation <= thr && act.leakage <= thr;
        d_factor &= act.d_factor_deviation <= thr && act.leakage <= thr;
        c_factor &= act.c_factor_deviation <= thr && act.leakage <= thr;
    }
    if scalar {
        BlockClass::ProtectedSubspace
    } else if d_factor {
        BlockClass::NoiselessDFactor
    } else if c_factor {
        BlockClass::ProtectedCFactor
    } else {
        BlockClass::Unprotected
    }
}

/// Residual control error of `fault`, located relative to the commutant,
/// the center and the irreducible blocks. Blocks are classified using the
/// residual together with the symmetrized noise couplings.
pub fn robustness_report(
    scenario: &Scenario,
    fault: &FaultModel,
    quad_points: usize,
    seed: u64,
) -> Result<SubsystemReport> {
    let rep = &scenario.rep;
    let residual = residual_error(rep, &scenario.profiles, fault, quad_points)?;
    let dec = decomposition(scenario, seed)?;
    let center = center_basis(rep);
    let commutant = commutant_basis(rep);
    let primary = center.len() == 1;
    let fault_scale = fault.max_norm();

    let mut ops = vec![(residual.clone(), fault_scale)];
    for (s, _) in scenario.noise.couplings() {
        ops.push((pi_g(rep, s)?, s.norm()));
    }
    let blocks = (0..dec.blocks.len())
        .map(|k| {
            let b = &dec.blocks[k];
            let act = dec.block_action(k, &residual);
            let noise_norm = scenario
                .noise
                .couplings()
                .iter()
                .map(|(s, _)| pi_g(rep, s).map(|p| dec.block_action(k, &p).norm))
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().fold(0.0, f64::max));
            Ok(BlockReport {
                label: b.label.clone(),
                multiplicity: b.multiplicity,
                dimension: b.dimension,
                class: classify(&dec, k, &ops),
                residual_norm: act.norm,
                residual_scalar_deviation: act.scalar_deviation,
                noise_norm: noise_norm?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let case = match (fault.in_algebra(), primary) {
        (true, true) => RobustnessCase::PrimaryInAlgebra,
        (true, false) => RobustnessCase::CentralInAlgebra,
        (false, _) => RobustnessCase::CommutantOnly,
    };
    Ok(SubsystemReport {
        blocks,
        residual_norm: residual.norm(),
        commutant_distance: distance_from_span(&commutant, &residual),
        center_distance: distance_from_span(&center, &residual),
        residual,
        decomposition: dec,
        fault_in_algebra: fault.in_algebra(),
        primary,
        case,
    })
}

#[derive(Debug, Clone)]
pub struct CouplingReport {
    pub index: usize,
    pub input_norm: f64,
    pub projected_norm: f64,
    pub center_distance: f64,
    pub d_factor_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct NoiseReport {
    pub couplings: Vec<CouplingReport>,
    /// Strongest suppression level that holds for every coupling.
    pub level: Option<Suppression>,
}

/// How far the symmetrized couplings `Π(S_α)` are suppressed.
pub fn noise_suppression_check(scenario: &Scenario, tol: f64, seed: u64) -> Result<NoiseReport> {
    let rep = &scenario.rep;
    let dec = decomposition(scenario, seed)?;
    let center = center_basis(rep);
    let mut couplings = Vec::new();
    for (index, (s, _)) in scenario.noise.couplings().iter().enumerate() {
        let p = pi_g(rep, s)?;
        let d_dev = (0..dec.blocks.len())
            .map(|k| {
                let a = dec.block_action(k, &p);
                a.d_factor_deviation.max(a.leakage)
            })
            .fold(0.0, f64::max);
        couplings.push(CouplingReport {
            index,
            input_norm: s.norm(),
            projected_norm: p.norm(),
            center_distance: distance_from_span(&center, &p),
            d_factor_deviation: d_dev,
        });
    }
    let all = |f: &dyn Fn(&CouplingReport) -> f64| {
        couplings.iter().all(|r| f(r) <= tol * r.input_norm.max(1.0))
    };
    let level = if all(&|r| r.projected_norm) {
        Some(Suppression::Full)
    } else if all(&|r| r.center_distance) {
        Some(Suppression::Central)
    } else if all(&|r| r.d_factor_deviation) {
        Some(Suppression::DFactor)
    } else {
        None
    };
    Ok(NoiseReport { couplings, level })
}

/// Random traceless constant error per generator with operator norm
/// `strength` (units of 1/Δt).
pub fn random_traceless_fault<R: Rng>(
    scenario: &Scenario,
    strength: f64,
    rng: &mut R,
) -> Result<FaultModel> {
    let d = scenario.rep.dim();
    let ops: Vec<CMat> = scenario
        .profiles
        .iter()
        .map(|_| {
            let h = random_traceless_hermitian(rng, d);
            let n = op_norm(&h);
            h * c(strength / n, 0.0)
        })
        .collect();
    FaultModel::constant(&scenario.rep, &scenario.profiles, &ops)
}

fn mixed_env(env_dim: usize) -> CMat {
    identity(env_dim) / c(env_dim as f64, 0.0)
}

fn evolve_system(u: &CMat, rho_s: &CMat, env_dim: usize) -> CMat {
    let rho = kron(rho_s, &mixed_env(env_dim));
    trace_env(&(u * rho * u.adjoint()), env_dim)
}

#[derive(Debug, Clone, Copy)]
pub struct FidelityComparison {
    /// Mean `1 − F` of the protected / decoupled evolution.
    pub protected: f64,
    /// Mean `1 − F` of the reference evolution.
    pub unprotected: f64,
}

impl FidelityComparison {
    pub fn ratio(&self) -> f64 {
        if self.protected > 0.0 {
            self.unprotected / self.protected
        } else if self.unprotected > 0.0 {
            f64::INFINITY
        } else {
            1.0
        }
    }
}

/// Stroboscopic state-fidelity error after `cycles` cycles with and without
/// the decoupling control, environment initially maximally mixed.
#[allow(clippy::too_many_arguments)]
pub fn decoupling_fidelity<R: Rng>(
    scenario: &Scenario,
    drift: &DriftModel,
    fault: Option<&FaultModel>,
    delta_t: f64,
    cycles: usize,
    slices: usize,
    states: usize,
    rng: &mut R,
) -> Result<FidelityComparison> {
    let mut schedule = eulerian_schedule(&scenario.path, scenario.profiles.clone(), delta_t)?;
    if let Some(f) = fault {
        schedule = apply_fault(&schedule, f)?;
    }
    let on = simulate_cycles(drift, &schedule, cycles, slices)?.unitary;
    let off = simulate_uncontrolled(drift, &schedule, cycles, slices)?.unitary;
    let de = drift.env_dim();
    let d = drift.system_dim();
    let (mut a, mut b) = (0.0, 0.0);
    for _ in 0..states.max(1) {
        let psi = random_state(rng, d);
        let rho = &psi * psi.adjoint();
        let fid = |u: &CMat| (psi.adjoint() * evolve_system(u, &rho, de) * &psi)[(0, 0)].re;
        a += 1.0 - fid(&on);
        b += 1.0 - fid(&off);
    }
    let n = states.max(1) as f64;
    Ok(FidelityComparison {
        protected: a / n,
        unprotected: b / n,
    })
}

/// Fidelity of states stored in the `D_J` factor (protected) against states
/// stored in the `C_J` factor (unprotected) of the block with `d_J = dimension`,
/// the other factor maximally mixed.
#[allow(clippy::too_many_arguments)]
pub fn subsystem_fidelity<R: Rng>(
    scenario: &Scenario,
    drift: &DriftModel,
    dimension: usize,
    delta_t: f64,
    cycles: usize,
    slices: usize,
    states: usize,
    seed: u64,
    rng: &mut R,
) -> Result<FidelityComparison> {
    let dec = decomposition(scenario, seed)?;
    let block = dec
        .blocks
        .iter()
        .find(|b| b.dimension == dimension && b.multiplicity > 1)
        .ok_or_else(|| {
            Error::Precondition(format!("no block with d_J = {dimension} and n_J > 1"))
        })?;
    let (n, dj) = (block.multiplicity, block.dimension);
    let cols = &block.columns;
    let schedule = eulerian_schedule(&scenario.path, scenario.profiles.clone(), delta_t)?;
    let u = simulate_cycles(drift, &schedule, cycles, slices)?.unitary;
    let de = drift.env_dim();
    let run = |rho_block: &CMat| -> CMat {
        let rho_s = cols * rho_block * cols.adjoint();
        cols.adjoint() * evolve_system(&u, &rho_s, de) * cols
    };
    let (mut prot, mut unprot) = (0.0, 0.0);
    for _ in 0..states.max(1) {
        let psi = random_state(rng, dj);
        let out = run(&kron(&mixed_env(n), &(&psi * psi.adjoint())));
        let mut rho_d = CMat::zeros(dj, dj);
        for k in 0..n {
            rho_d += out.view((k * dj, k * dj), (dj, dj));
        }
        prot += 1.0 - (psi.adjoint() * rho_d * &psi)[(0, 0)].re;

        let phi = random_state(rng, n);
        let out = run(&kron(&(&phi * phi.adjoint()), &mixed_env(dj)));
        let rho_c = CMat::from_fn(n, n, |k, l| out.view((k * dj, l * dj), (dj, dj)).trace());
        unprot += 1.0 - (phi.adjoint() * rho_c * &phi)[(0, 0)].re;
    }
    let m = states.max(1) as f64;
    Ok(FidelityComparison {
        protected: prot / m,
        unprotected: unprot / m,
    })
}

/// Random traceless operators typical of the scenario's noise: linear
/// combinations of single-qubit Paulis when the system is made of qubits.
fn random_noise_operator<R: Rng>(scenario: &Scenario, rng: &mut R) -> CMat {
    let d = scenario.rep.dim();
    let qubits = d.trailing_zeros() as usize;
    let op = if d.is_power_of_two() && d > 1 {
        single_qubit_operators(qubits)
            .iter()
            .fold(CMat::zeros(d, d), |acc, s| {
                acc + s * c(rng.sample::<f64, _>(rand_distr::StandardNormal), 0.0)
            })
    } else {
        random_traceless_hermitian(rng, d)
    };
    let n = op.norm();
    op / c(n, 0.0)
}

fn outcome(check: &Check, passed: bool, measured: f64, tolerance: f64, note: String) -> CheckOutcome {
    CheckOutcome {
        name: check.name(),
        passed,
        measured,
        tolerance,
        note,
    }
}

fn run_one(scenario: &Scenario, check: &Check, settings: &RunSettings, index: usize) -> Result<CheckOutcome> {
    let rep = &scenario.rep;
    let quad = settings.quad_points;
    let mut rng = check_rng(settings.seed, index);
    let sub_seed = rng.random::<u64>();
    Ok(match check {
        Check::PathLength { expected } => {
            let len = scenario.path.len();
            let graph_edges = scenario.graph.edges().len();
            let valid = validate_path(&scenario.graph, scenario.path.colors()).is_valid();
            outcome(
                check,
                len == *expected && len == graph_edges && valid,
                len as f64,
                *expected as f64,
                format!("L = {len}, |G||Γ| = {graph_edges}"),
            )
        }
        Check::ReferencePath => match &scenario.reference_path {
            Some(colors) => {
                let r = validate_path(&scenario.graph, colors);
                outcome(check, r == PathCheck::Valid, colors.len() as f64, 0.0, r.to_string())
            }
            None => outcome(check, true, 0.0, 0.0, "no reference path for this scenario".into()),
        },
        Check::Theorem { trials, tol } => {
            let r = verify_theorem(scenario, *trials, *tol, quad, sub_seed)?;
            outcome(
                check,
                r.passed.unwrap_or(true),
                r.max_deviation,
                *tol,
                r.notice.unwrap_or_else(|| format!("max over {trials} random Hermitian inputs")),
            )
        }
        Check::Projector { trials, tol } => {
            let r = projector_properties(scenario, *trials, quad, sub_seed)?;
            let note = if r.q_idempotence.is_some() {
                "Π and Q idempotent and commutant-valued"
            } else {
                "Q idempotence not checked: profiles outside the algebra"
            };
            outcome(check, r.worst() <= *tol, r.worst(), *tol, note.into())
        }
        Check::Robustness { fault, expect, tol } => {
            let model = scenario
                .fault(fault)
                .ok_or_else(|| Error::Config(format!("scenario has no fault named {fault:?}")))?;
            let r = robustness_report(scenario, model, quad, 0)?;
            let (measured, note) = match expect {
                ResidualExpectation::Zero => (r.residual_norm, "residual vanishes".to_string()),
                ResidualExpectation::Equals(target) => (
                    (&r.residual - target).norm().max(r.center_distance),
                    "residual equals the expected central operator".to_string(),
                ),
                ResidualExpectation::Central => (
                    r.center_distance,
                    format!("residual central (norm {:.3e})", r.residual_norm),
                ),
                ResidualExpectation::Commutant => (
                    r.commutant_distance,
                    format!("residual in commutant (norm {:.3e})", r.residual_norm),
                ),
            };
            outcome(check, measured <= *tol, measured, *tol, note)
        }
        Check::RandomFaults { count, amplitude, tol } => {
            let count = settings.random_faults.unwrap_or(*count);
            let amplitude = settings.fault_amplitude.unwrap_or(*amplitude);
            let mut worst: f64 = 0.0;
            for _ in 0..count {
                let f = random_traceless_fault(scenario, amplitude, &mut rng)?;
                worst = worst.max(residual_error(rep, &scenario.profiles, &f, quad)?.norm());
            }
            outcome(
                check,
                worst <= *tol,
                worst,
                *tol,
                format!("{count} random traceless faults of strength {amplitude}"),
            )
        }
        Check::NoiseSuppression { expect, tol } => {
            let r = noise_suppression_check(scenario, *tol, 0)?;
            let worst = r
                .couplings
                .iter()
                .map(|c| match expect {
                    Suppression::Full => c.projected_norm,
                    Suppression::Central => c.center_distance,
                    Suppression::DFactor => c.d_factor_deviation,
                })
                .fold(0.0, f64::max);
            let passed = r.level.is_some_and(|l| l >= *expect);
            let note = match r.level {
                Some(l) => format!("suppression level {l:?}, required {expect:?}"),
                None => format!("no suppression, required {expect:?}"),
            };
            outcome(check, passed, worst, *tol, note)
        }
        Check::AbelianAlgebra { tol } => {
            let worst = rep
                .matrices()
                .iter()
                .flat_map(|a| rep.matrices().iter().map(move |b| commutator(a, b).norm()))
                .fold(0.0, f64::max);
            outcome(check, worst <= *tol, worst, *tol, "all ĝ_i ĝ_j = ĝ_j ĝ_i".into())
        }
        Check::NoiselessSubsystem { dimension, trials, tol } => {
            let dec = decomposition(scenario, 0)?;
            let Some(k) = dec.blocks.iter().position(|b| b.dimension == *dimension) else {
                return Ok(outcome(
                    check,
                    false,
                    f64::INFINITY,
                    *tol,
                    format!("no block with d_J = {dimension}"),
                ));
            };
            let mut worst: f64 = 0.0;
            for _ in 0..*trials {
                let s = random_noise_operator(scenario, &mut rng);
                for y in [pi_g(rep, &s)?, q_map(rep, &scenario.profiles, &s, quad)?] {
                    let a = dec.block_action(k, &y);
                    worst = worst.max(a.d_factor_deviation).max(a.leakage);
                }
            }
            let b = &dec.blocks[k];
            outcome(
                check,
                worst <= *tol,
                worst,
                *tol,
                format!(
                    "block {} (n_J = {}, d_J = {}): symmetrized noise acts trivially on D_J",
                    b.label, b.multiplicity, b.dimension
                ),
            )
        }
        Check::DecouplingFidelity {
            fault,
            delta_t,
            cycles,
            states,
            min_ratio,
        } => {
            let dt = settings.delta_t.unwrap_or(*delta_t);
            let m = settings.cycles.unwrap_or(*cycles);
            let model = match fault {
                FidelityFault::None => None,
                FidelityFault::RandomTraceless { norm } => {
                    Some(random_traceless_fault(scenario, norm * dt, &mut rng)?)
                }
            };
            let r = decoupling_fidelity(
                scenario,
                &scenario.noise,
                model.as_ref(),
                dt,
                m,
                settings.slices,
                *states,
                &mut rng,
            )?;
            outcome(
                check,
                r.ratio() >= *min_ratio,
                r.ratio(),
                *min_ratio,
                format!(
                    "1-F decoupled {:.3e} vs free {:.3e} (Δt = {dt}, M = {m}); tolerance is a minimum ratio",
                    r.protected, r.unprotected
                ),
            )
        }
        Check::SubsystemFidelity {
            dimension,
            delta_t,
            cycles,
            states,
            min_ratio,
        } => {
            let dt = settings.delta_t.unwrap_or(*delta_t);
            let m = settings.cycles.unwrap_or(*cycles);
            let r = subsystem_fidelity(
                scenario,
                &scenario.noise,
                *dimension,
                dt,
                m,
                settings.slices,
                *states,
                0,
                &mut rng,
            )?;
            outcome(
                check,
                r.ratio() >= *min_ratio,
                r.ratio(),
                *min_ratio,
                format!(
                    "1-F on D_J {:.3e} vs C_J {:.3e} (Δt = {dt}, M = {m}); tolerance is a minimum ratio",
                    r.protected, r.unprotected
                ),
            )
        }
    })
}

/// Run every check of the scenario. Checks are independent and evaluated in
/// parallel; outcomes keep the scenario's order.
pub fn run_checks(scenario: &Scenario, settings: &RunSettings) -> Result<Vec<CheckOutcome>> {
    scenario
        .checks
        .par_iter()
        .enumerate()
        .map(|(k, check)| run_one(scenario, check, settings, k))
        .collect()
}

/// Basis sizes reported alongside the checks.
pub fn structure_summary(scenario: &Scenario) -> (usize, usize, usize) {
    let rep = &scenario.rep;
    (
        algebra_basis(rep).len(),
        commutant_basis(rep).len(),
        center_basis(rep).len(),
    )
}
