//! Segment-by-segment export of a control schedule as TOML, and the
//! matching import.
//!
//! Amplitudes are physical (1/time). Each segment names its Hamiltonian by
//! id; the matrices are listed once in the `hamiltonians` table.

use serde::{Deserialize, Serialize};

use crate::cayley::{build_cayley, EulerPath};
use crate::config::{matrix_from_spec, matrix_to_spec, MatrixSpec};
use crate::error::{Error, Result};
use crate::group::{close_group, UnitaryRep, DEFAULT_MAX_ORDER};
use crate::linalg::CMat;
use crate::pulses::{
    apply_fault, bangbang_schedule, eulerian_schedule, piecewise_profile, ControlSchedule,
    FaultModel, ScheduleKind, Segment,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub color: usize,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianEntry {
    pub id: String,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEntry {
    pub start: f64,
    pub duration: f64,
    pub hamiltonian: String,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEntry {
    pub index: usize,
    pub color: usize,
    pub start: f64,
    #[serde(default)]
    pub segments: Vec<SegmentEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fault_segments: Vec<SegmentEntry>,
    /// Bang-bang only: the kick applied at the end of the sub-interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kick: Option<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub kind: String,
    pub delta_t: f64,
    pub dim: usize,
    pub cycle_time: f64,
    pub sequence: Vec<usize>,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default)]
    pub hamiltonians: Vec<HamiltonianEntry>,
    pub intervals: Vec<IntervalEntry>,
}

#[derive(Default)]
struct IdTable {
    entries: Vec<(String, CMat)>,
}

impl IdTable {
    /// Id for `m`, reusing `wanted` when free or already bound to `m`.
    fn intern(&mut self, wanted: &str, m: &CMat) -> String {
        if let Some((id, _)) = self.entries.iter().find(|(_, e)| e == m) {
            return id.clone();
        }
        let mut id = wanted.to_string();
        let mut k = 1;
        while self.entries.iter().any(|(e, _)| *e == id) {
            id = format!("{wanted}#{k}");
            k += 1;
        }
        self.entries.push((id.clone(), m.clone()));
        id
    }
}

fn segment_entries(
    segments: &[Segment],
    interval_start: f64,
    delta_t: f64,
    table: &mut IdTable,
) -> Vec<SegmentEntry> {
    let mut t = 0.0;
    segments
        .iter()
        .map(|s| {
            let entry = SegmentEntry {
                start: interval_start + t * delta_t,
                duration: s.fraction * delta_t,
                hamiltonian: table.intern(&s.axis_id, &s.axis),
                amplitude: s.amplitude(delta_t),
            };
            t += s.fraction;
            entry
        })
        .collect()
}

/// Structured description of `schedule`; `rep` supplies the generator
/// matrices (the representation the schedule was built from).
pub fn schedule_file(schedule: &ControlSchedule, rep: &UnitaryRep) -> Result<ScheduleFile> {
    if rep.dim() != schedule.dim() {
        return Err(Error::Shape("representation and schedule dimensions differ".into()));
    }
    let dt = schedule.delta_t();
    let generators = (0..rep.group().generators().len())
        .map(|color| GeneratorEntry {
            color,
            matrix: matrix_to_spec(rep.generator_matrix(color)),
        })
        .collect();
    let mut table = IdTable::default();
    let mut intervals = Vec::with_capacity(schedule.interval_count());
    for (l, &color) in schedule.sequence().iter().enumerate() {
        let start = l as f64 * dt;
        let mut entry = IntervalEntry {
            index: l,
            color,
            start,
            segments: Vec::new(),
            fault_segments: Vec::new(),
            kick: None,
        };
        match schedule.kind() {
            ScheduleKind::Eulerian => {
                entry.segments =
                    segment_entries(schedule.profiles()[color].segments(), start, dt, &mut table);
                if let Some(f) = schedule.fault() {
                    entry.fault_segments =
                        segment_entries(&f.per_generator()[color], start, dt, &mut table);
                }
            }
            ScheduleKind::BangBang => {
                entry.kick = Some(matrix_to_spec(&schedule.kicks()[l]));
            }
        }
        intervals.push(entry);
    }
    Ok(ScheduleFile {
        kind: match schedule.kind() {
            ScheduleKind::Eulerian => "eulerian".into(),
            ScheduleKind::BangBang => "bangbang".into(),
        },
        delta_t: dt,
        dim: schedule.dim(),
        cycle_time: schedule.cycle_time(),
        sequence: schedule.sequence().to_vec(),
        generators,
        hamiltonians: table
            .entries
            .iter()
            .map(|(id, m)| HamiltonianEntry {
                id: id.clone(),
                matrix: matrix_to_spec(m),
            })
            .collect(),
        intervals,
    })
}

pub fn export_schedule(schedule: &ControlSchedule, rep: &UnitaryRep) -> Result<String> {
    let file = schedule_file(schedule, rep)?;
    toml::to_string(&file).map_err(|e| Error::Config(e.to_string()))
}

fn segments_from_entries(
    entries: &[SegmentEntry],
    file: &ScheduleFile,
    interval_start: f64,
) -> Result<Vec<Segment>> {
    let dt = file.delta_t;
    entries
        .iter()
        .map(|e| {
            let h = file
                .hamiltonians
                .iter()
                .find(|h| h.id == e.hamiltonian)
                .ok_or_else(|| Error::Config(format!("unknown Hamiltonian id {:?}", e.hamiltonian)))?;
            if e.start < interval_start - 1e-12 * dt.max(1.0) {
                return Err(Error::Config("segment starts before its sub-interval".into()));
            }
            Ok(Segment::new(
                e.duration / dt,
                e.hamiltonian.clone(),
                matrix_from_spec(&h.matrix)?,
                e.amplitude * dt,
            ))
        })
        .collect()
}

/// Rebuild a schedule from its exported form. Returns the schedule and the
/// representation closed from the exported generators.
pub fn import_schedule(text: &str) -> Result<(ControlSchedule, UnitaryRep)> {
    let file: ScheduleFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut gens: Vec<&GeneratorEntry> = file.generators.iter().collect();
    gens.sort_by_key(|g| g.color);
    if gens.iter().enumerate().any(|(k, g)| g.color != k) {
        return Err(Error::Config("generator colors must be 0..n without gaps".into()));
    }
    let matrices = gens
        .iter()
        .map(|g| matrix_from_spec(&g.matrix))
        .collect::<Result<Vec<_>>>()?;
    let (group, rep) = close_group(&matrices, DEFAULT_MAX_ORDER)?;
    if rep.dim() != file.dim {
        return Err(Error::Config("dim does not match the generator matrices".into()));
    }
    match file.kind.as_str() {
        "bangbang" => Ok((bangbang_schedule(&rep, file.delta_t)?, rep)),
        "eulerian" => {
            let graph = build_cayley(&group)?;
            let path = EulerPath::from_colors(&graph, file.sequence.clone())?;
            let colors = matrices.len();
            let mut profiles: Vec<Option<Vec<Segment>>> = vec![None; colors];
            let mut faults: Vec<Option<Vec<Segment>>> = vec![None; colors];
            for iv in &file.intervals {
                if iv.color >= colors {
                    return Err(Error::Config(format!("interval {} has unknown color", iv.index)));
                }
                let segs = segments_from_entries(&iv.segments, &file, iv.start)?;
                let fsegs = segments_from_entries(&iv.fault_segments, &file, iv.start)?;
                for (slot, new, what) in [
                    (&mut profiles[iv.color], segs, "control"),
                    (&mut faults[iv.color], fsegs, "fault"),
                ] {
                    match slot {
                        None => *slot = Some(new),
                        Some(old) if same_segments(old, &new) => {}
                        Some(_) => {
                            return Err(Error::InvalidSchedule(format!(
                                "{what} segments of color {} differ between sub-intervals",
                                iv.color
                            )))
                        }
                    }
                }
            }
            let profiles = profiles
                .into_iter()
                .enumerate()
                .map(|(k, p)| piecewise_profile(k, &rep, p.ok_or(Error::IncompleteProfileSet(k))?))
                .collect::<Result<Vec<_>>>()?;
            let schedule = eulerian_schedule(&path, profiles, file.delta_t)?;
            let fault: Vec<Vec<Segment>> = faults.into_iter().map(Option::unwrap_or_default).collect();
            if fault.iter().all(|f| f.is_empty()) {
                Ok((schedule, rep))
            } else {
                let model = FaultModel::new(&rep, fault)?;
                Ok((apply_fault(&schedule, &model)?, rep))
            }
        }
        other => Err(Error::Config(format!("unknown schedule kind {other:?}"))),
    }
}

fn same_segments(a: &[Segment], b: &[Segment]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            (x.fraction - y.fraction).abs() <= 1e-12
                && (x.strength - y.strength).abs() <= 1e-12 * x.strength.abs().max(1.0)
                && x.axis == y.axis
        })
}
