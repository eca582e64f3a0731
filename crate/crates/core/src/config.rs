//! TOML run configuration and inline scenario definitions.
//!
//! Matrices are written row-major as a flat list of `[re, im]` pairs; the
//! dimension is inferred from the length.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::checks::{Check, FidelityFault, ResidualExpectation, Suppression};
use crate::analysis::scenario::{builtin, Scenario, ScenarioParts};
use crate::dynamics::{DriftModel, DEFAULT_QUAD_POINTS};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::pulses::Segment;

pub const DEFAULT_DELTA_T: f64 = 0.01;
pub const DEFAULT_CYCLES: usize = 10;
pub const DEFAULT_RUN_SLICES: usize = 64;
pub const MIN_QUAD_POINTS: usize = 8;
pub const MIN_SLICES: usize = 16;

pub type MatrixSpec = Vec<[f64; 2]>;

pub fn matrix_from_spec(spec: &MatrixSpec) -> Result<CMat> {
    let d = (spec.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != spec.len() {
        return Err(Error::Config(format!(
            "matrix with {} entries is not square",
            spec.len()
        )));
    }
    if spec.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Config("matrix entry is not finite".into()));
    }
    Ok(CMat::from_fn(d, d, |i, j| {
        let [re, im] = spec[i * d + j];
        c(re, im)
    }))
}

pub fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// Amplitude `a` means a physical Hamiltonian `(a/Δt)·H`.
    #[default]
    PerDeltaT,
    /// Amplitude is a physical angular frequency.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub fraction: f64,
    pub hamiltonian: MatrixSpec,
    #[serde(default)]
    pub id: Option<String>,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub generator: usize,
    #[serde(default)]
    pub units: Units,
    pub segments: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub s: MatrixSpec,
    pub e: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSpec {
    #[serde(default = "one")]
    pub env_dim: usize,
    #[serde(default)]
    pub h_s: Option<MatrixSpec>,
    #[serde(default)]
    pub h_e: Option<MatrixSpec>,
    #[serde(default)]
    pub couplings: Vec<CouplingSpec>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultGeneratorSpec {
    pub generator: usize,
    pub segments: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualExpect {
    Zero,
    Central,
    Commutant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    pub name: String,
    #[serde(default)]
    pub units: Units,
    pub generators: Vec<FaultGeneratorSpec>,
    #[serde(default)]
    pub expect: Option<ResidualExpect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineScenario {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub generators: Vec<MatrixSpec>,
    #[serde(default)]
    pub path: Option<Vec<usize>>,
    pub profiles: Vec<ProfileSpec>,
    #[serde(default)]
    pub drift: Option<DriftSpec>,
    #[serde(default)]
    pub faults: Vec<FaultSpec>,
    /// Required suppression of the drift couplings: "full", "central" or "d-factor".
    #[serde(default)]
    pub expect_suppression: Option<Suppression>,
    /// Minimum fidelity-error ratio (free / decoupled) for the drift.
    #[serde(default)]
    pub min_fidelity_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub qubits: Option<usize>,
    #[serde(default)]
    pub inline: Option<InlineScenario>,
    #[serde(default)]
    pub delta_t: Option<OneOrMany>,
    #[serde(default)]
    pub cycles: Option<usize>,
    #[serde(default)]
    pub quad_points: Option<usize>,
    #[serde(default)]
    pub slices: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub random_faults: Option<usize>,
    #[serde(default)]
    pub fault_amplitude: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub verbosity: Option<u8>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml_str(&text)
    }

    /// Fill unset fields from `other`.
    pub fn or(self, other: RunConfig) -> RunConfig {
        RunConfig {
            scenario: self.scenario.or(other.scenario),
            qubits: self.qubits.or(other.qubits),
            inline: self.inline.or(other.inline),
            delta_t: self.delta_t.or(other.delta_t),
            cycles: self.cycles.or(other.cycles),
            quad_points: self.quad_points.or(other.quad_points),
            slices: self.slices.or(other.slices),
            seed: self.seed.or(other.seed),
            random_faults: self.random_faults.or(other.random_faults),
            fault_amplitude: self.fault_amplitude.or(other.fault_amplitude),
            out: self.out.or(other.out),
            verbosity: self.verbosity.or(other.verbosity),
        }
    }

    pub fn delta_ts(&self) -> Vec<f64> {
        self.delta_t.as_ref().map(|d| d.values()).unwrap_or_default()
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points.unwrap_or(DEFAULT_QUAD_POINTS)
    }

    pub fn slices(&self) -> usize {
        self.slices.unwrap_or(DEFAULT_RUN_SLICES)
    }

    pub fn cycles(&self) -> usize {
        self.cycles.unwrap_or(DEFAULT_CYCLES)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Range checks on the overrides.
    pub fn validate(&self) -> Result<()> {
        for dt in self.delta_ts() {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(Error::Config(format!("delta_t must be positive, got {dt}")));
            }
        }
        if self.delta_t.as_ref().is_some_and(|d| d.values().is_empty()) {
            return Err(Error::Config("delta_t list is empty".into()));
        }
        if self.quad_points() < MIN_QUAD_POINTS {
            return Err(Error::Config(format!(
                "quad_points must be at least {MIN_QUAD_POINTS}"
            )));
        }
        if self.slices() < MIN_SLICES {
            return Err(Error::Config(format!("slices must be at least {MIN_SLICES}")));
        }
        if self.cycles() == 0 {
            return Err(Error::Config("cycles must be at least 1".into()));
        }
        if let Some(a) = self.fault_amplitude {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::Config(format!(
                    "fault_amplitude must be non-negative, got {a}"
                )));
            }
        }
        match (&self.scenario, &self.inline) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either a scenario name or an inline scenario, not both".into(),
            )),
            (None, None) => Err(Error::Config("no scenario given".into())),
            _ => Ok(()),
        }
    }

    /// Build the scenario named or defined by this configuration.
    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        match (&self.scenario, &self.inline) {
            (Some(name), None) => builtin(name, self.qubits, self.seed()),
            (None, Some(inline)) => {
                let dt = self.delta_ts().first().copied().unwrap_or(DEFAULT_DELTA_T);
                inline_scenario(inline, dt, self.seed())
            }
            _ => unreachable!("validated"),
        }
    }
}

fn strength(amplitude: f64, units: Units, delta_t: f64) -> f64 {
    match units {
        Units::PerDeltaT => amplitude,
        Units::Absolute => amplitude * delta_t,
    }
}

fn segments(specs: &[SegmentSpec], units: Units, delta_t: f64, prefix: &str) -> Result<Vec<Segment>> {
    specs
        .iter()
        .enumerate()
        .map(|(k, s)| {
            Ok(Segment::new(
                s.fraction,
                s.id.clone().unwrap_or_else(|| format!("{prefix}{k}")),
                matrix_from_spec(&s.hamiltonian)?,
                strength(s.amplitude, units, delta_t),
            ))
        })
        .collect()
}

fn drift_from_spec(spec: &DriftSpec, d: usize) -> Result<DriftModel> {
    let de = spec.env_dim.max(1);
    let h_s = match &spec.h_s {
        Some(m) => matrix_from_spec(m)?,
        None => CMat::zeros(d, d),
    };
    let h_e = match &spec.h_e {
        Some(m) => matrix_from_spec(m)?,
        None => CMat::zeros(de, de),
    };
    if h_s.nrows() != d || h_e.nrows() != de {
        return Err(Error::Config("drift matrices have the wrong dimension".into()));
    }
    let couplings = spec
        .couplings
        .iter()
        .map(|cs| Ok((matrix_from_spec(&cs.s)?, matrix_from_spec(&cs.e)?)))
        .collect::<Result<Vec<_>>>()?;
    DriftModel::new(h_s, h_e, couplings)
}

pub fn inline_scenario(spec: &InlineScenario, delta_t: f64, seed: u64) -> Result<Scenario> {
    let generators = spec
        .generators
        .iter()
        .map(matrix_from_spec)
        .collect::<Result<Vec<_>>>()?;
    let d = generators
        .first()
        .ok_or_else(|| Error::Config("inline scenario has no generators".into()))?
        .nrows();
    let mut profiles: Vec<Option<Vec<Segment>>> = vec![None; generators.len()];
    for p in &spec.profiles {
        let slot = profiles
            .get_mut(p.generator)
            .ok_or_else(|| Error::Config(format!("profile for unknown generator {}", p.generator)))?;
        *slot = Some(segments(&p.segments, p.units, delta_t, &format!("h{}_", p.generator))?);
    }
    let profiles = profiles
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or(Error::IncompleteProfileSet(k)))
        .collect::<Result<Vec<_>>>()?;

    let noise = spec.drift.as_ref().map(|s| drift_from_spec(s, d)).transpose()?;
    let mut faults = Vec::new();
    let mut checks = vec![
        Check::PathLength {
            expected: 0, // filled in below once the group order is known
        },
        Check::Theorem { trials: 100, tol: 1e-7 },
        Check::Projector { trials: 100, tol: 1e-9 },
    ];
    for f in &spec.faults {
        let mut per = vec![Vec::new(); generators.len()];
        for g in &f.generators {
            let slot = per
                .get_mut(g.generator)
                .ok_or_else(|| Error::Config(format!("fault {} names unknown generator", f.name)))?;
            *slot = segments(&g.segments, f.units, delta_t, "fault")?;
        }
        faults.push((f.name.clone(), per));
        if let Some(e) = f.expect {
            checks.push(Check::Robustness {
                fault: f.name.clone(),
                expect: match e {
                    ResidualExpect::Zero => ResidualExpectation::Zero,
                    ResidualExpect::Central => ResidualExpectation::Central,
                    ResidualExpect::Commutant => ResidualExpectation::Commutant,
                },
                tol: 1e-9,
            });
        }
    }
    if noise.is_some() {
        if let Some(expect) = spec.expect_suppression {
            checks.push(Check::NoiseSuppression { expect, tol: 1e-10 });
        }
        if let Some(min_ratio) = spec.min_fidelity_ratio {
            checks.push(Check::DecouplingFidelity {
                fault: FidelityFault::None,
                delta_t,
                cycles: DEFAULT_CYCLES,
                states: 8,
                min_ratio,
            });
        }
    }
    let mut scenario = Scenario::assemble(ScenarioParts {
        name: spec.name.clone(),
        description: spec.description.clone().unwrap_or_default(),
        generators,
        path: spec.path.clone(),
        profiles,
        noise,
        faults,
        checks,
        delta_t,
        seed,
    })?;
    let expected = scenario.group.order() * scenario.group.generators().len();
    scenario.checks[0] = Check::PathLength { expected };
    Ok(scenario)
}
