//! Built-in decoupling scenarios and the assembly of custom ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cayley::{build_cayley, eulerian_cycle, CayleyGraph, EulerPath};
use crate::dynamics::DriftModel;
use crate::error::{Error, Result};
use crate::group::{close_group, Group, UnitaryRep, DEFAULT_MAX_ORDER};
use crate::linalg::{
    c, embed_qubit, op_norm, pauli_x, pauli_y, pauli_z, paulis, random_hermitian,
    random_traceless_hermitian, tensor_power, CMat,
};
use crate::pulses::{constant_profile, piecewise_profile, FaultModel, PulseProfile, Segment};

use super::checks::{Check, FidelityFault, ResidualExpectation, Suppression};

pub const MAX_PAULI_QUBITS: usize = 3;
pub const MAX_SPIN_FLIP_QUBITS: usize = 4;
pub const BUILTIN_NAMES: [&str; 4] = ["carr-purcell", "pauli", "spin-flip", "symmetric-s3"];
const ENV_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    CarrPurcell,
    Pauli { qubits: usize },
    SpinFlip { qubits: usize },
    SymmetricS3,
    Custom,
}

#[derive(Debug, Clone)]
pub struct NamedFault {
    pub name: String,
    pub model: FaultModel,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub kind: ScenarioKind,
    pub group: Group,
    pub rep: UnitaryRep,
    pub graph: CayleyGraph,
    pub path: EulerPath,
    /// A hand-written path to validate alongside the computed one.
    pub reference_path: Option<Vec<usize>>,
    pub profiles: Vec<PulseProfile>,
    /// Noise model the scheme is meant to suppress.
    pub noise: DriftModel,
    /// Generic drift (all terms present) for convergence studies.
    pub generic_drift: DriftModel,
    pub faults: Vec<NamedFault>,
    pub checks: Vec<Check>,
    pub delta_t: f64,
}

pub struct ScenarioParts {
    pub name: String,
    pub description: String,
    pub generators: Vec<CMat>,
    pub path: Option<Vec<usize>>,
    pub profiles: Vec<Vec<Segment>>,
    pub noise: Option<DriftModel>,
    pub faults: Vec<(String, Vec<Vec<Segment>>)>,
    pub checks: Vec<Check>,
    pub delta_t: f64,
    pub seed: u64,
}

impl Scenario {
    /// Path length `|G|·|Γ|`.
    pub fn path_length(&self) -> usize {
        self.path.len()
    }

    pub fn in_algebra(&self) -> bool {
        self.profiles.iter().all(|p| p.in_algebra())
    }

    pub fn fault(&self, name: &str) -> Option<&FaultModel> {
        self.faults.iter().find(|f| f.name == name).map(|f| &f.model)
    }

    /// Build a scenario from explicit generators and segment lists.
    pub fn assemble(parts: ScenarioParts) -> Result<Scenario> {
        let (group, rep) = close_group(&parts.generators, DEFAULT_MAX_ORDER)?;
        let graph = build_cayley(&group)?;
        let path = match &parts.path {
            Some(colors) => EulerPath::from_colors(&graph, colors.clone())?,
            None => eulerian_cycle(&graph, 0)?,
        };
        let profiles = parts
            .profiles
            .into_iter()
            .enumerate()
            .map(|(k, segs)| piecewise_profile(k, &rep, segs))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(parts.seed);
        let noise = match parts.noise {
            Some(n) => n,
            None => DriftModel::zero(rep.dim(), 1),
        };
        let generic_drift = generic_drift(rep.dim(), &mut rng)?;
        let faults = parts
            .faults
            .into_iter()
            .map(|(name, per)| {
                Ok(NamedFault {
                    name,
                    model: FaultModel::new(&rep, per)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario {
            name: parts.name,
            description: parts.description,
            kind: ScenarioKind::Custom,
            group,
            rep,
            graph,
            path,
            reference_path: None,
            profiles,
            noise,
            generic_drift,
            faults,
            checks: parts.checks,
            delta_t: parts.delta_t,
        })
    }
}

/// Scale every term so that `‖H_0‖_op = 1`.
pub fn normalize_drift(drift: &DriftModel) -> DriftModel {
    let n = op_norm(&drift.total());
    if n > 0.0 {
        drift.scaled(1.0 / n)
    } else {
        drift.clone()
    }
}

/// Random `H_S`, `H_E` and three random traceless couplings, unit norm.
pub fn generic_drift(d: usize, rng: &mut ChaCha8Rng) -> Result<DriftModel> {
    let h_s = if d > 1 {
        random_traceless_hermitian(rng, d)
    } else {
        CMat::zeros(1, 1)
    };
    let couplings = if d > 1 {
        (0..3)
            .map(|_| {
                (
                    random_traceless_hermitian(rng, d),
                    random_hermitian(rng, ENV_DIM),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    let h_e = random_hermitian(rng, ENV_DIM);
    Ok(normalize_drift(&DriftModel::new(h_s, h_e, couplings)?))
}

/// `Σ_{k,u} σ_u^{(k)} ⊗ E_{k,u}` with random environment operators, unit norm.
pub fn linear_noise(qubits: usize, rng: &mut ChaCha8Rng) -> Result<DriftModel> {
    let d = 1 << qubits;
    let mut couplings = Vec::new();
    for k in 0..qubits {
        for p in paulis() {
            couplings.push((embed_qubit(&p, k, qubits), random_hermitian(rng, ENV_DIM)));
        }
    }
    let h_e = random_hermitian(rng, ENV_DIM);
    Ok(normalize_drift(&DriftModel::new(
        CMat::zeros(d, d),
        h_e,
        couplings,
    )?))
}

/// `σ_u^{(k)}` for every qubit and axis.
pub fn single_qubit_operators(qubits: usize) -> Vec<CMat> {
    (0..qubits)
        .flat_map(|k| paulis().into_iter().map(move |p| embed_qubit(&p, k, qubits)))
        .collect()
}

/// Heisenberg coupling `σ_k · σ_l` on `n` qubits (0-based sites).
pub fn heisenberg(k: usize, l: usize, n: usize) -> CMat {
    paulis()
        .iter()
        .map(|p| embed_qubit(p, k, n) * embed_qubit(p, l, n))
        .fold(CMat::zeros(1 << n, 1 << n), |acc, t| acc + t)
}

/// Exchange of qubits `k` and `l` on `n` qubits.
pub fn swap_gate(k: usize, l: usize, n: usize) -> CMat {
    let d = 1 << n;
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        let bk = (i >> (n - 1 - k)) & 1;
        let bl = (i >> (n - 1 - l)) & 1;
        let mut j = i & !(1 << (n - 1 - k)) & !(1 << (n - 1 - l));
        j |= bl << (n - 1 - k);
        j |= bk << (n - 1 - l);
        m[(j, i)] = c(1.0, 0.0);
    }
    m
}

pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "carr-purcell",
            "Z2 = {I, X} on one qubit, constant X pulses, dephasing noise",
        ),
        (
            "pauli",
            "Pauli group on n <= 3 qubits (default 1), X and Z pulses per qubit",
        ),
        (
            "spin-flip",
            "collective X and Z on n <= 4 qubits (default 2), linear noise",
        ),
        (
            "symmetric-s3",
            "S3 permuting three qubits via Heisenberg exchange pulses",
        ),
    ]
}

/// Built-in scenario by name. `qubits` applies to "pauli" and "spin-flip".
pub fn builtin(name: &str, qubits: Option<usize>, seed: u64) -> Result<Scenario> {
    match name {
        "carr-purcell" => carr_purcell(seed),
        "pauli" => pauli(qubits.unwrap_or(1), seed),
        "spin-flip" => spin_flip(qubits.unwrap_or(2), seed),
        "symmetric-s3" => symmetric_s3(seed),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

pub fn builtin_scenarios(seed: u64) -> Result<Vec<Scenario>> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n, None, seed))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    name: &str,
    description: String,
    kind: ScenarioKind,
    generators: Vec<CMat>,
    reference_path: Option<Vec<usize>>,
    profiles: impl FnOnce(&UnitaryRep) -> Result<Vec<PulseProfile>>,
    noise: DriftModel,
    faults: impl FnOnce(&UnitaryRep, &[PulseProfile]) -> Result<Vec<NamedFault>>,
    checks: Vec<Check>,
    rng: &mut ChaCha8Rng,
) -> Result<Scenario> {
    let (group, rep) = close_group(&generators, DEFAULT_MAX_ORDER)?;
    let graph = build_cayley(&group)?;
    let path = eulerian_cycle(&graph, 0)?;
    let profiles = profiles(&rep)?;
    let faults = faults(&rep, &profiles)?;
    let generic_drift = generic_drift(rep.dim(), rng)?;
    Ok(Scenario {
        name: name.to_string(),
        description,
        kind,
        group,
        rep,
        graph,
        path,
        reference_path,
        profiles,
        noise,
        generic_drift,
        faults,
        checks,
        delta_t: 0.01,
    })
}

const XZ_REFERENCE_PATH: [usize; 8] = [0, 1, 0, 1, 1, 0, 1, 0];
const S3_PATH: [usize; 12] = [1, 1, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0];

fn carr_purcell(seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = random_hermitian(&mut rng, ENV_DIM);
    let noise = normalize_drift(&DriftModel::new(
        CMat::zeros(2, 2),
        random_hermitian(&mut rng, ENV_DIM),
        vec![(pauli_z(), env)],
    )?);
    let eps = 0.1;
    let checks = vec![
        Check::PathLength { expected: 2 },
        Check::Theorem { trials: 100, tol: 1e-7 },
        Check::Projector { trials: 100, tol: 1e-9 },
        Check::Robustness {
            fault: "sigma-y".into(),
            expect: ResidualExpectation::Zero,
            tol: 1e-9,
        },
        Check::Robustness {
            fault: "sigma-z".into(),
            expect: ResidualExpectation::Zero,
            tol: 1e-9,
        },
        Check::Robustness {
            fault: "sigma-x".into(),
            expect: ResidualExpectation::Equals(pauli_x() * c(eps, 0.0)),
            tol: 1e-9,
        },
        Check::NoiseSuppression {
            expect: Suppression::Full,
            tol: 1e-12,
        },
        Check::DecouplingFidelity {
            fault: FidelityFault::None,
            delta_t: 0.01,
            cycles: 10,
            states: 8,
            min_ratio: 10.0,
        },
    ];
    finish(
        "carr-purcell",
        "Eulerian Carr-Purcell decoupling of a dephasing qubit".into(),
        ScenarioKind::CarrPurcell,
        vec![pauli_x()],
        None,
        |rep| Ok(vec![constant_profile(0, rep, "sx", &pauli_x())?]),
        noise,
        |rep, profiles| {
            [("sigma-x", pauli_x()), ("sigma-y", pauli_y()), ("sigma-z", pauli_z())]
                .into_iter()
                .map(|(name, op)| {
                    Ok(NamedFault {
                        name: name.into(),
                        model: FaultModel::uniform(rep, profiles, &(op * c(eps, 0.0)))?,
                    })
                })
                .collect()
        },
        checks,
        &mut rng,
    )
}

fn pauli(qubits: usize, seed: u64) -> Result<Scenario> {
    if qubits == 0 || qubits > MAX_PAULI_QUBITS {
        return Err(Error::Config(format!(
            "pauli scenario supports 1..={MAX_PAULI_QUBITS} qubits; n = {qubits} would need L = {} sub-intervals",
            pauli_path_length(qubits)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = linear_noise(qubits, &mut rng)?;
    let mut generators = Vec::new();
    let mut axes = Vec::new();
    for k in 0..qubits {
        for (id, p) in [("x", pauli_x()), ("z", pauli_z())] {
            let op = embed_qubit(&p, k, qubits);
            generators.push(op.clone());
            axes.push((format!("s{id}{}", k + 1), op));
        }
    }
    let checks = vec![
        Check::PathLength {
            expected: pauli_path_length(qubits),
        },
        Check::ReferencePath,
        Check::Theorem { trials: 100, tol: 1e-7 },
        Check::Projector { trials: 100, tol: 1e-9 },
        Check::RandomFaults {
            count: 20,
            amplitude: 0.1,
            tol: 1e-8,
        },
        Check::NoiseSuppression {
            expect: Suppression::Full,
            tol: 1e-12,
        },
        Check::DecouplingFidelity {
            fault: FidelityFault::RandomTraceless { norm: 1.0 },
            delta_t: 0.01,
            cycles: 10,
            states: 8,
            min_ratio: 10.0,
        },
    ];
    let reference = (qubits == 1).then(|| XZ_REFERENCE_PATH.to_vec());
    finish(
        "pauli",
        format!(
            "Eulerian Pauli decoupling on {qubits} qubit(s), L = {}",
            pauli_path_length(qubits)
        ),
        ScenarioKind::Pauli { qubits },
        generators,
        reference,
        |rep| {
            axes.iter()
                .enumerate()
                .map(|(k, (id, op))| constant_profile(k, rep, id, op))
                .collect()
        },
        noise,
        |_, _| Ok(Vec::new()),
        checks,
        &mut rng,
    )
}

/// `L = n · 2^{2n+1}`.
pub fn pauli_path_length(qubits: usize) -> usize {
    qubits.saturating_mul(1usize.checked_shl(2 * qubits as u32 + 1).unwrap_or(usize::MAX))
}

fn spin_flip(qubits: usize, seed: u64) -> Result<Scenario> {
    if qubits == 0 || qubits > MAX_SPIN_FLIP_QUBITS {
        return Err(Error::Config(format!(
            "spin-flip scenario supports 1..={MAX_SPIN_FLIP_QUBITS} qubits, got {qubits}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = linear_noise(qubits, &mut rng)?;
    let x = tensor_power(&pauli_x(), qubits);
    let z = tensor_power(&pauli_z(), qubits);
    let mut checks = vec![
        Check::PathLength { expected: 8 },
        Check::ReferencePath,
        Check::Theorem { trials: 100, tol: 1e-7 },
        Check::Projector { trials: 100, tol: 1e-9 },
        Check::NoiseSuppression {
            expect: Suppression::Full,
            tol: 1e-12,
        },
        Check::Robustness {
            fault: "collective-x".into(),
            expect: ResidualExpectation::Central,
            tol: 1e-9,
        },
        Check::DecouplingFidelity {
            fault: FidelityFault::None,
            delta_t: 0.01,
            cycles: 10,
            states: 8,
            min_ratio: 10.0,
        },
    ];
    if qubits.is_multiple_of(2) {
        checks.push(Check::AbelianAlgebra { tol: 1e-12 });
    }
    let (xc, zc) = (x.clone(), z.clone());
    finish(
        "spin-flip",
        format!("Eulerian collective spin-flip decoupling on {qubits} qubit(s)"),
        ScenarioKind::SpinFlip { qubits },
        vec![x, z],
        Some(XZ_REFERENCE_PATH.to_vec()),
        |rep| {
            Ok(vec![
                constant_profile(0, rep, "X", &xc)?,
                constant_profile(1, rep, "Z", &zc)?,
            ])
        },
        noise,
        |rep, profiles| {
            let d = rep.dim();
            let model = FaultModel::constant(
                rep,
                profiles,
                &[tensor_power(&pauli_x(), qubits) * c(0.1, 0.0), CMat::zeros(d, d)],
            )?;
            Ok(vec![NamedFault {
                name: "collective-x".into(),
                model,
            }])
        },
        checks,
        &mut rng,
    )
}

fn symmetric_s3(seed: u64) -> Result<Scenario> {
    use std::f64::consts::PI;
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = linear_noise(n, &mut rng)?;
    let s12 = swap_gate(0, 1, n);
    let s23 = swap_gate(1, 2, n);
    let h12 = heisenberg(0, 1, n);
    let h23 = heisenberg(1, 2, n);
    let checks = vec![
        Check::PathLength { expected: 12 },
        Check::ReferencePath,
        Check::Theorem { trials: 100, tol: 1e-7 },
        Check::Projector { trials: 100, tol: 1e-9 },
        Check::NoiselessSubsystem {
            dimension: 2,
            trials: 20,
            tol: 1e-8,
        },
        Check::NoiseSuppression {
            expect: Suppression::DFactor,
            tol: 1e-8,
        },
        Check::Robustness {
            fault: "exchange-12".into(),
            expect: ResidualExpectation::Central,
            tol: 1e-9,
        },
        Check::SubsystemFidelity {
            dimension: 2,
            delta_t: 0.005,
            cycles: 10,
            states: 8,
            min_ratio: 10.0,
        },
    ];
    let (h12c, h23c) = (h12.clone(), h23.clone());
    finish(
        "symmetric-s3",
        "Eulerian S3 symmetrization of three qubits with Heisenberg pulses".into(),
        ScenarioKind::SymmetricS3,
        vec![s12.clone(), &s12 * &s23],
        Some(S3_PATH.to_vec()),
        |rep| {
            Ok(vec![
                piecewise_profile(0, rep, vec![Segment::new(1.0, "h12", h12c.clone(), PI / 4.0)])?,
                piecewise_profile(
                    1,
                    rep,
                    vec![
                        Segment::new(0.5, "h23", h23c, PI / 2.0),
                        Segment::new(0.5, "h12", h12c, PI / 2.0),
                    ],
                )?,
            ])
        },
        noise,
        |rep, profiles| {
            let op = h12 * c(0.1, 0.0);
            Ok(vec![NamedFault {
                name: "exchange-12".into(),
                model: FaultModel::uniform(rep, profiles, &op)?,
            }])
        },
        checks,
        &mut rng,
    )
}
