//! Bounded-strength pulse profiles realizing group generators, fault models,
//! and the Eulerian / bang-bang control schedules built from them.
//!
//! Profiles are stored in units of the sub-interval length: a segment with
//! `strength` σ and `axis` A over a fraction f of Δt applies the physical
//! Hamiltonian `(σ/Δt)·A` for a time `f·Δt`, so its propagator is
//! `exp(−i σ f A)` independently of Δt.

use std::f64::consts::PI;

use crate::cayley::EulerPath;
use crate::error::{Error, Result};
use crate::group::{algebra_basis, UnitaryRep};
use crate::linalg::{
    c, expm_hermitian, identity, is_hermitian, op_norm, phase_distance, span_residual, CMat,
    HermitianEigen,
};

/// Realization check: phase-aligned Frobenius distance to the target.
pub const REALIZATION_TOL: f64 = 1e-9;
/// Residual norm above which a Hamiltonian is outside the group algebra.
pub const ALGEBRA_TOL: f64 = 1e-10;
const GRID_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub fraction: f64,
    pub axis_id: String,
    pub axis: CMat,
    /// Dimensionless; the physical amplitude is `strength / Δt`.
    pub strength: f64,
}

impl Segment {
    pub fn new(fraction: f64, axis_id: impl Into<String>, axis: CMat, strength: f64) -> Self {
        Segment {
            fraction,
            axis_id: axis_id.into(),
            axis,
            strength,
        }
    }

    /// Hamiltonian in units of 1/Δt.
    pub fn hamiltonian(&self) -> CMat {
        &self.axis * c(self.strength, 0.0)
    }

    pub fn amplitude(&self, delta_t: f64) -> f64 {
        self.strength / delta_t
    }

    pub fn propagator(&self) -> CMat {
        expm_hermitian(&self.hamiltonian(), self.fraction)
    }
}

fn validate_segments(segments: &[Segment], dim: usize, what: &str) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::InvalidProfile(format!("{what}: no segments")));
    }
    for (k, s) in segments.iter().enumerate() {
        if !s.fraction.is_finite() || s.fraction <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "{what}: segment {k} has non-positive duration"
            )));
        }
        if !s.strength.is_finite() {
            return Err(Error::InvalidProfile(format!("{what}: segment {k} strength is not finite")));
        }
        if s.axis.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "{what}: segment {k} axis is {}x{}, expected {dim}x{dim}",
                s.axis.nrows(),
                s.axis.ncols()
            )));
        }
        if !is_hermitian(&s.axis, 1e-10) {
            return Err(Error::InvalidProfile(format!(
                "{what}: segment {k} axis is not Hermitian"
            )));
        }
    }
    let total: f64 = segments.iter().map(|s| s.fraction).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProfile(format!(
            "{what}: durations sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Time-ordered product, later segments on the left.
fn segments_product(segments: &[Segment], dim: usize) -> CMat {
    segments
        .iter()
        .fold(identity(dim), |acc, s| s.propagator() * acc)
}

fn in_algebra(basis: &[CMat], axes: impl Iterator<Item = CMat>) -> bool {
    axes.into_iter()
        .all(|a| span_residual(basis, &a) <= ALGEBRA_TOL * a.norm().max(1.0))
}

fn breakpoints(segments: &[Segment]) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut t = 0.0;
    for s in segments {
        t += s.fraction;
        out.push(t);
    }
    out
}

/// Piecewise-constant control `h_λ(t)` over one sub-interval that implements
/// generator `λ` up to a global phase.
#[derive(Debug, Clone)]
pub struct PulseProfile {
    generator: usize,
    target: CMat,
    segments: Vec<Segment>,
    realized: CMat,
    realization_error: f64,
    in_algebra: bool,
}

impl PulseProfile {
    pub fn generator(&self) -> usize {
        self.generator
    }

    pub fn target(&self) -> &CMat {
        &self.target
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `u_λ(Δt)` as actually produced by the segments.
    pub fn realized(&self) -> &CMat {
        &self.realized
    }

    pub fn realization_error(&self) -> f64 {
        self.realization_error
    }

    /// Every segment Hamiltonian lies in the span of the representation matrices.
    pub fn in_algebra(&self) -> bool {
        self.in_algebra
    }

    pub fn dim(&self) -> usize {
        self.target.nrows()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        breakpoints(&self.segments)
    }

    /// `u_λ(τ Δt)` for `τ ∈ [0, 1]`.
    pub fn propagator_at(&self, tau: f64) -> CMat {
        let mut u = identity(self.dim());
        let mut start = 0.0;
        for s in &self.segments {
            let end = start + s.fraction;
            if tau <= start {
                break;
            }
            let len = tau.min(end) - start;
            u = expm_hermitian(&s.hamiltonian(), len) * u;
            start = end;
        }
        u
    }
}

/// Single-segment profile `h = (θ/Δt)·axis` with the smallest `θ ≥ 0` such
/// that `exp(−iθ·axis)` equals the generator up to phase.
pub fn constant_profile(
    generator: usize,
    rep: &UnitaryRep,
    axis_id: &str,
    axis: &CMat,
) -> Result<PulseProfile> {
    let target = generator_target(rep, generator)?;
    let d = rep.dim();
    if axis.shape() != (d, d) || !is_hermitian(axis, 1e-10) {
        return Err(Error::UnreachableGenerator(format!(
            "axis {axis_id} is not a {d}x{d} Hermitian matrix"
        )));
    }
    let theta = solve_rotation_angle(axis, &target).ok_or_else(|| {
        Error::UnreachableGenerator(format!("generator {generator} along {axis_id}"))
    })?;
    piecewise_profile(
        generator,
        rep,
        vec![Segment::new(1.0, axis_id, axis.clone(), theta)],
    )
}

fn generator_target(rep: &UnitaryRep, generator: usize) -> Result<CMat> {
    if generator >= rep.group().generators().len() {
        return Err(Error::InvalidProfile(format!(
            "generator index {generator} out of range"
        )));
    }
    Ok(rep.generator_matrix(generator).clone())
}

fn solve_rotation_angle(axis: &CMat, target: &CMat) -> Option<f64> {
    let (vals, vecs) = HermitianEigen::new(axis).sorted();
    let t = vecs.adjoint() * target * &vecs;
    let d = vals.len();
    let off_diag: f64 = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|ij| t[ij].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if off_diag > REALIZATION_TOL {
        return None;
    }
    let spread = vals[d - 1] - vals[0];
    if spread <= 1e-12 {
        return (phase_distance(&identity(d), target) <= REALIZATION_TOL).then_some(0.0);
    }
    let ratio = t[(d - 1, d - 1)] / t[(0, 0)];
    let phi = ratio.arg();
    (0..4096)
        .map(|m| (-phi + 2.0 * PI * m as f64) / spread)
        .filter(|&theta| theta >= -1e-12)
        .map(|theta| theta.max(0.0))
        .find(|&theta| phase_distance(&expm_hermitian(axis, theta), target) <= REALIZATION_TOL)
}

/// Validate an explicit segment list against the generator it should implement.
pub fn piecewise_profile(
    generator: usize,
    rep: &UnitaryRep,
    segments: Vec<Segment>,
) -> Result<PulseProfile> {
    let target = generator_target(rep, generator)?;
    let d = rep.dim();
    validate_segments(&segments, d, &format!("profile {generator}"))?;
    let realized = segments_product(&segments, d);
    let distance = phase_distance(&realized, &target);
    if distance > REALIZATION_TOL {
        return Err(Error::ProfileMismatch {
            generator,
            distance,
        });
    }
    let basis = algebra_basis(rep);
    let in_alg = in_algebra(&basis, segments.iter().map(|s| s.axis.clone()));
    Ok(PulseProfile {
        generator,
        target,
        segments,
        realized,
        realization_error: distance,
        in_algebra: in_alg,
    })
}

/// Systematic control errors `Δh_λ(t)`, one segment list per generator
/// (empty list = no error for that generator). Strengths are in units of 1/Δt.
#[derive(Debug, Clone)]
pub struct FaultModel {
    per_generator: Vec<Vec<Segment>>,
    in_algebra: bool,
}

impl FaultModel {
    pub fn new(rep: &UnitaryRep, per_generator: Vec<Vec<Segment>>) -> Result<Self> {
        let d = rep.dim();
        for (k, segs) in per_generator.iter().enumerate() {
            if !segs.is_empty() {
                validate_segments(segs, d, &format!("fault for generator {k}"))?;
            }
        }
        let basis = algebra_basis(rep);
        let in_alg = in_algebra(
            &basis,
            per_generator.iter().flatten().map(|s| s.hamiltonian()),
        );
        Ok(FaultModel {
            per_generator,
            in_algebra: in_alg,
        })
    }

    pub fn zero(colors: usize) -> Self {
        FaultModel {
            per_generator: vec![Vec::new(); colors],
            in_algebra: true,
        }
    }

    /// Constant error `ops[λ]` (units of 1/Δt) on each profile's own grid.
    pub fn constant(rep: &UnitaryRep, profiles: &[PulseProfile], ops: &[CMat]) -> Result<Self> {
        if ops.len() != profiles.len() {
            return Err(Error::InvalidProfile(format!(
                "{} fault operators for {} generators",
                ops.len(),
                profiles.len()
            )));
        }
        let per = profiles
            .iter()
            .zip(ops)
            .map(|(p, op)| {
                p.segments()
                    .iter()
                    .map(|s| Segment::new(s.fraction, "fault", op.clone(), 1.0))
                    .collect()
            })
            .collect();
        FaultModel::new(rep, per)
    }

    /// Same constant error for every generator.
    pub fn uniform(rep: &UnitaryRep, profiles: &[PulseProfile], op: &CMat) -> Result<Self> {
        FaultModel::constant(rep, profiles, &vec![op.clone(); profiles.len()])
    }

    pub fn per_generator(&self) -> &[Vec<Segment>] {
        &self.per_generator
    }

    pub fn in_algebra(&self) -> bool {
        self.in_algebra
    }

    pub fn is_zero(&self) -> bool {
        self.per_generator
            .iter()
            .flatten()
            .all(|s| s.hamiltonian().norm() == 0.0)
    }

    /// Largest Frobenius norm of any error segment (units of 1/Δt).
    pub fn max_norm(&self) -> f64 {
        self.per_generator
            .iter()
            .flatten()
            .map(|s| s.hamiltonian().norm())
            .fold(0.0, f64::max)
    }
}

/// Constant stretch of a sub-interval: ideal control plus optional error,
/// both in units of 1/Δt, with `entry = u(start)` for the ideal control.
#[derive(Debug, Clone)]
pub struct Piece {
    pub start: f64,
    pub fraction: f64,
    pub control: CMat,
    pub error: Option<CMat>,
    pub entry: CMat,
}

impl Piece {
    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.control)
    }
}

/// Merge a profile with a fault segment list; the fault grid must contain
/// every profile breakpoint.
pub fn merge_pieces(profile: &PulseProfile, fault: &[Segment]) -> Result<Vec<Piece>> {
    let d = profile.dim();
    if fault.is_empty() {
        let mut entry = identity(d);
        let mut start = 0.0;
        let mut out = Vec::new();
        for s in profile.segments() {
            out.push(Piece {
                start,
                fraction: s.fraction,
                control: s.hamiltonian(),
                error: None,
                entry: entry.clone(),
            });
            entry = s.propagator() * entry;
            start += s.fraction;
        }
        return Ok(out);
    }
    let fault_grid = breakpoints(fault);
    for b in profile.breakpoints() {
        if !fault_grid.iter().any(|f| (f - b).abs() <= GRID_TOL) {
            return Err(Error::IncompatibleFaultGrid(format!(
                "profile breakpoint {b} missing from fault grid of generator {}",
                profile.generator()
            )));
        }
    }
    let profile_grid = profile.breakpoints();
    let mut out = Vec::new();
    let mut start = 0.0;
    for f in fault {
        let mid = start + f.fraction / 2.0;
        let k = (0..profile.segments().len())
            .find(|&k| mid < profile_grid[k + 1])
            .unwrap_or(profile.segments().len() - 1);
        let seg = &profile.segments()[k];
        let entry = expm_hermitian(&seg.hamiltonian(), start - profile_grid[k])
            * profile.propagator_at(profile_grid[k]);
        out.push(Piece {
            start,
            fraction: f.fraction,
            control: seg.hamiltonian(),
            error: Some(f.hamiltonian()),
            entry,
        });
        start += f.fraction;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Eulerian,
    BangBang,
}

/// Full cyclic control timeline.
#[derive(Debug, Clone)]
pub struct ControlSchedule {
    kind: ScheduleKind,
    delta_t: f64,
    dim: usize,
    /// Eulerian: path colors. Bang-bang: element visited in each sub-interval.
    sequence: Vec<usize>,
    profiles: Vec<PulseProfile>,
    pieces: Vec<Vec<Piece>>,
    /// `U_c` at the start of each sub-interval, plus `U_c(T_c)` at the end.
    frames: Vec<CMat>,
    /// Bang-bang kicks `p_ℓ = ĝ_ℓ ĝ_{ℓ−1}†`, applied at the end of sub-interval ℓ.
    kicks: Vec<CMat>,
    fault: Option<FaultModel>,
}

fn check_delta_t(delta_t: f64) -> Result<()> {
    if !delta_t.is_finite() || delta_t <= 0.0 {
        return Err(Error::InvalidSchedule(format!(
            "sub-interval length must be positive, got {delta_t}"
        )));
    }
    Ok(())
}

pub fn eulerian_schedule(
    path: &EulerPath,
    profiles: Vec<PulseProfile>,
    delta_t: f64,
) -> Result<ControlSchedule> {
    check_delta_t(delta_t)?;
    if path.is_empty() {
        return Err(Error::InvalidSchedule("empty path gives zero cycle time".into()));
    }
    for &col in path.colors() {
        match profiles.get(col) {
            Some(p) if p.generator() == col => {}
            _ => return Err(Error::IncompleteProfileSet(col)),
        }
    }
    let dim = profiles[path.colors()[0]].dim();
    if profiles.iter().any(|p| p.dim() != dim) {
        return Err(Error::Shape("profiles act on different dimensions".into()));
    }
    let mut frames = vec![identity(dim)];
    for &col in path.colors() {
        let next = profiles[col].realized() * frames.last().unwrap();
        frames.push(next);
    }
    let closing = phase_distance(frames.last().unwrap(), &identity(dim));
    if closing > 1e-8 * (dim as f64).sqrt() {
        return Err(Error::InvalidSchedule(format!(
            "control propagator does not close at the identity (distance {closing:.2e})"
        )));
    }
    let pieces = profiles
        .iter()
        .map(|p| merge_pieces(p, &[]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ControlSchedule {
        kind: ScheduleKind::Eulerian,
        delta_t,
        dim,
        sequence: path.colors().to_vec(),
        profiles,
        pieces,
        frames,
        kicks: Vec::new(),
        fault: None,
    })
}

pub fn bangbang_schedule(rep: &UnitaryRep, delta_t: f64) -> Result<ControlSchedule> {
    check_delta_t(delta_t)?;
    let order = rep.group().order();
    if order < 2 {
        return Err(Error::InvalidSchedule(
            "bang-bang decoupling needs a group of order > 1".into(),
        ));
    }
    let dim = rep.dim();
    let mut frames: Vec<CMat> = rep.matrices().to_vec();
    frames.push(identity(dim));
    let kicks = (1..=order)
        .map(|l| &frames[l] * frames[l - 1].adjoint())
        .collect();
    Ok(ControlSchedule {
        kind: ScheduleKind::BangBang,
        delta_t,
        dim,
        sequence: (0..order).collect(),
        profiles: Vec::new(),
        pieces: Vec::new(),
        frames,
        kicks,
        fault: None,
    })
}

/// Add systematic errors to an Eulerian schedule. The ideal control is kept
/// for frame transformations.
pub fn apply_fault(schedule: &ControlSchedule, fault: &FaultModel) -> Result<ControlSchedule> {
    if schedule.kind != ScheduleKind::Eulerian {
        return Err(Error::InvalidSchedule(
            "faults are defined for Eulerian schedules only".into(),
        ));
    }
    if fault.per_generator().len() != schedule.profiles.len() {
        return Err(Error::IncompatibleFaultGrid(format!(
            "{} fault entries for {} generators",
            fault.per_generator().len(),
            schedule.profiles.len()
        )));
    }
    let pieces = schedule
        .profiles
        .iter()
        .zip(fault.per_generator())
        .map(|(p, f)| merge_pieces(p, f))
        .collect::<Result<Vec<_>>>()?;
    let mut out = schedule.clone();
    out.pieces = pieces;
    out.fault = Some(fault.clone());
    Ok(out)
}

impl ControlSchedule {
    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval_count(&self) -> usize {
        self.sequence.len()
    }

    pub fn cycle_time(&self) -> f64 {
        self.sequence.len() as f64 * self.delta_t
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn profiles(&self) -> &[PulseProfile] {
        &self.profiles
    }

    pub fn fault(&self) -> Option<&FaultModel> {
        self.fault.as_ref()
    }

    /// `U_c((ℓ−1)Δt)` for ℓ = 1..=L, then `U_c(T_c)`.
    pub fn frames(&self) -> &[CMat] {
        &self.frames
    }

    pub fn kicks(&self) -> &[CMat] {
        &self.kicks
    }

    /// Pieces of the profile played with `color` (including errors if faulty).
    pub fn pieces(&self, color: usize) -> &[Piece] {
        &self.pieces[color]
    }

    /// Pieces of sub-interval `l` (0-based); empty for bang-bang schedules.
    pub fn interval_pieces(&self, l: usize) -> &[Piece] {
        match self.kind {
            ScheduleKind::Eulerian => &self.pieces[self.sequence[l]],
            ScheduleKind::BangBang => &[],
        }
    }

    /// Same schedule with a different sub-interval length.
    pub fn with_delta_t(&self, delta_t: f64) -> Result<ControlSchedule> {
        check_delta_t(delta_t)?;
        let mut out = self.clone();
        out.delta_t = delta_t;
        Ok(out)
    }

    /// Piecewise-constant physical control Hamiltonian over one cycle, as
    /// `(duration, H)` pairs. Bang-bang schedules have no finite-strength
    /// timeline and return an error.
    pub fn timeline(&self) -> Result<Vec<(f64, CMat)>> {
        if self.kind == ScheduleKind::BangBang {
            return Err(Error::InvalidSchedule(
                "bang-bang kicks have no finite control Hamiltonian".into(),
            ));
        }
        let scale = c(1.0 / self.delta_t, 0.0);
        Ok((0..self.interval_count())
            .flat_map(|l| {
                self.interval_pieces(l).iter().map(move |p| {
                    let h = match &p.error {
                        Some(e) => &p.control + e,
                        None => p.control.clone(),
                    };
                    (p.fraction * self.delta_t, h * scale)
                })
            })
            .collect())
    }

    /// Largest operator norm of the physical control Hamiltonian.
    pub fn max_control_norm(&self) -> f64 {
        match self.timeline() {
            Ok(tl) => tl.iter().map(|(_, h)| op_norm(h)).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{build_cayley, eulerian_cycle};
    use crate::group::close_group;
    use crate::linalg::{pauli_x, pauli_y, pauli_z};
    use std::f64::consts::FRAC_PI_2;

    fn z2() -> UnitaryRep {
        close_group(&[pauli_x()], 8).unwrap().1
    }

    #[test]
    fn constant_profile_sigma_x() {
        let rep = z2();
        let p = constant_profile(0, &rep, "sx", &pauli_x()).unwrap();
        let s = &p.segments()[0];
        assert!((s.strength - FRAC_PI_2).abs() < 1e-12);
        let dt = 0.01;
        assert!((s.amplitude(dt) - PI / (2.0 * dt)).abs() < 1e-9);
        assert!(p.in_algebra());
        assert!(p.realization_error() < 1e-12);
    }

    #[test]
    fn constant_profile_identity_target_has_zero_amplitude() {
        let (_, rep) = close_group(&[identity(2)], 2).unwrap();
        let p = constant_profile(0, &rep, "sz", &pauli_z()).unwrap();
        assert_eq!(p.segments()[0].strength, 0.0);
    }

    #[test]
    fn unreachable_axis() {
        let rep = z2();
        assert!(matches!(
            constant_profile(0, &rep, "sz", &pauli_z()),
            Err(Error::UnreachableGenerator(_))
        ));
    }

    #[test]
    fn two_half_segments_add_angles() {
        let rep = z2();
        let half = |_: ()| Segment::new(0.5, "sx", pauli_x(), FRAC_PI_2);
        let p = piecewise_profile(0, &rep, vec![half(()), half(())]).unwrap();
        // oracle: exp(−i π/4 σx)² = exp(−i π/2 σx) = −iσx
        let q = expm_hermitian(&pauli_x(), PI / 4.0);
        assert!((p.realized() - &q * &q).norm() < 1e-14);
        assert!(phase_distance(p.realized(), &pauli_x()) < 1e-12);
    }

    #[test]
    fn piecewise_mismatch_reports_distance() {
        let rep = z2();
        let err = piecewise_profile(0, &rep, vec![Segment::new(1.0, "sx", pauli_x(), 1.0)])
            .unwrap_err();
        assert!(matches!(err, Error::ProfileMismatch { distance, .. } if distance > 0.1));
    }

    #[test]
    fn piecewise_out_of_algebra_clears_flag() {
        let rep = z2();
        // (−iσz)(−iσy) = iσx
        let p = piecewise_profile(
            0,
            &rep,
            vec![
                Segment::new(0.5, "sy", pauli_y(), PI),
                Segment::new(0.5, "sz", pauli_z(), PI),
            ],
        )
        .unwrap();
        assert!(!p.in_algebra());
    }

    #[test]
    fn invalid_segments_rejected() {
        let rep = z2();
        assert!(piecewise_profile(0, &rep, vec![]).is_err());
        assert!(piecewise_profile(
            0,
            &rep,
            vec![Segment::new(0.7, "sx", pauli_x(), FRAC_PI_2 / 0.7)]
        )
        .is_err());
        assert!(piecewise_profile(0, &rep, vec![Segment::new(1.0, "bad", pauli_x() * IMAG, 1.0)]).is_err());
    }

    const IMAG: crate::linalg::C64 = crate::linalg::IM;

    #[test]
    fn carr_purcell_schedule() {
        let (group, rep) = close_group(&[pauli_x()], 8).unwrap();
        let graph = build_cayley(&group).unwrap();
        let path = eulerian_cycle(&graph, 0).unwrap();
        let p = constant_profile(0, &rep, "sx", &pauli_x()).unwrap();
        let dt = 0.1;
        let s = eulerian_schedule(&path, vec![p], dt).unwrap();
        assert_eq!(s.interval_count(), 2);
        assert!((s.cycle_time() - 0.2).abs() < 1e-15);
        assert!(phase_distance(&s.frames()[1], &pauli_x()) < 1e-12);
        assert!(phase_distance(&s.frames()[2], &identity(2)) < 1e-12);
        assert!((s.max_control_norm() - PI / (2.0 * dt)).abs() < 1e-9);
    }

    #[test]
    fn schedule_errors() {
        let (group, rep) = close_group(&[pauli_x(), pauli_z()], 8).unwrap();
        let graph = build_cayley(&group).unwrap();
        let path = eulerian_cycle(&graph, 0).unwrap();
        let px = constant_profile(0, &rep, "sx", &pauli_x()).unwrap();
        assert!(matches!(
            eulerian_schedule(&path, vec![px.clone()], 0.1),
            Err(Error::IncompleteProfileSet(1))
        ));
        let pz = constant_profile(1, &rep, "sz", &pauli_z()).unwrap();
        assert!(eulerian_schedule(&path, vec![px.clone(), pz.clone()], -1.0).is_err());
        let bb = bangbang_schedule(&rep, 0.1).unwrap();
        let fault = FaultModel::zero(2);
        assert!(apply_fault(&bb, &fault).is_err());
        let (_, trivial) = close_group(&[identity(2)], 2).unwrap();
        assert!(bangbang_schedule(&trivial, 0.1).is_err());
    }

    #[test]
    fn bangbang_kicks_are_consecutive_quotients() {
        let (_, rep) = close_group(&[pauli_x(), pauli_z()], 8).unwrap();
        let s = bangbang_schedule(&rep, 0.1).unwrap();
        assert_eq!(s.interval_count(), 4);
        assert!((s.frames()[0].clone() - identity(2)).norm() < 1e-15);
        let g = rep.matrices();
        assert!((&s.kicks()[0] - &g[1]).norm() < 1e-14);
        assert!((&s.kicks()[1] - &g[2] * g[1].adjoint()).norm() < 1e-14);
        assert!((&s.kicks()[3] - g[3].adjoint()).norm() < 1e-14);
    }

    #[test]
    fn fault_grid_must_refine_profile_grid() {
        let s12 = {
            let mut m = CMat::zeros(4, 4);
            for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[(i, j)] = c(1.0, 0.0);
            }
            m
        };
        let (_, rep) = close_group(std::slice::from_ref(&s12), 4).unwrap();
        let heis = {
            let [x, y, z] = crate::linalg::paulis();
            crate::linalg::kron(&x, &x) + crate::linalg::kron(&y, &y) + crate::linalg::kron(&z, &z)
        };
        let p = piecewise_profile(
            0,
            &rep,
            vec![
                Segment::new(0.5, "h", heis.clone(), PI / 4.0),
                Segment::new(0.5, "h", heis.clone(), PI / 4.0),
            ],
        )
        .unwrap();
        let coarse = vec![Segment::new(1.0, "f", identity(4), 0.1)];
        assert!(matches!(
            merge_pieces(&p, &coarse),
            Err(Error::IncompatibleFaultGrid(_))
        ));
        let fine: Vec<Segment> = (0..4)
            .map(|_| Segment::new(0.25, "f", identity(4), 0.1))
            .collect();
        let pieces = merge_pieces(&p, &fine).unwrap();
        assert_eq!(pieces.len(), 4);
        assert!((&pieces[3].entry - p.propagator_at(0.75)).norm() < 1e-13);
    }

    #[test]
    fn apply_fault_builds_faulty_pieces() {
        let (group, rep) = close_group(&[pauli_x()], 8).unwrap();
        let path = eulerian_cycle(&build_cayley(&group).unwrap(), 0).unwrap();
        let p = constant_profile(0, &rep, "sx", &pauli_x()).unwrap();
        let s = eulerian_schedule(&path, vec![p.clone()], 0.1).unwrap();
        let fault = FaultModel::uniform(&rep, &[p], &(pauli_y() * c(0.1, 0.0))).unwrap();
        assert!(!fault.in_algebra());
        let faulty = apply_fault(&s, &fault).unwrap();
        let piece = &faulty.interval_pieces(1)[0];
        assert!((piece.error.clone().unwrap() - pauli_y() * c(0.1, 0.0)).norm() < 1e-15);
        // ideal frames retained
        assert_eq!(faulty.frames(), s.frames());
    }
}
