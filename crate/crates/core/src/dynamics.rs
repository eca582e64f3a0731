//! Time-ordered propagators, toggling-frame averages and joint
//! system–environment simulation under a control schedule.
//!
//! Integrals over a sub-interval use composite Simpson quadrature on each
//! constant piece; the error estimate compares against the same rule on the
//! half-resolution grid (Richardson, `|S_n − S_{n/2}| / 15`).

use crate::error::{Error, Result};
use crate::group::{pi_g, UnitaryRep};
use crate::linalg::{
    c, expm_hermitian, identity, is_hermitian, kron, phase_distance, unitarity_defect, CMat,
    HermitianEigen,
};
use crate::pulses::{merge_pieces, ControlSchedule, FaultModel, Piece, PulseProfile, ScheduleKind};

pub const DEFAULT_QUAD_POINTS: usize = 64;
pub const DEFAULT_SLICES: usize = 256;
const UNITARITY_LIMIT: f64 = 1e-8;

/// `H_0 = H_S ⊗ I + I ⊗ H_E + Σ_α S_α ⊗ E_α`.
#[derive(Debug, Clone)]
pub struct DriftModel {
    system_dim: usize,
    env_dim: usize,
    h_s: CMat,
    h_e: CMat,
    couplings: Vec<(CMat, CMat)>,
}

impl DriftModel {
    pub fn new(h_s: CMat, h_e: CMat, couplings: Vec<(CMat, CMat)>) -> Result<Self> {
        let d = h_s.nrows();
        let de = h_e.nrows();
        if d == 0 || de == 0 {
            return Err(Error::InvalidDrift("empty system or environment".into()));
        }
        if !is_hermitian(&h_s, 1e-10) || !is_hermitian(&h_e, 1e-10) {
            return Err(Error::InvalidDrift("H_S and H_E must be Hermitian".into()));
        }
        for (k, (s, e)) in couplings.iter().enumerate() {
            if s.shape() != (d, d) || e.shape() != (de, de) {
                return Err(Error::InvalidDrift(format!("coupling {k} has wrong shape")));
            }
            if !is_hermitian(s, 1e-10) || !is_hermitian(e, 1e-10) {
                return Err(Error::InvalidDrift(format!("coupling {k} is not Hermitian")));
            }
            if s.trace().norm() > 1e-10 * s.norm().max(1.0) {
                return Err(Error::InvalidDrift(format!(
                    "noise generator {k} is not traceless"
                )));
            }
        }
        Ok(DriftModel {
            system_dim: d,
            env_dim: de,
            h_s,
            h_e,
            couplings,
        })
    }

    /// Closed system: `d_E = 1`, no couplings.
    pub fn closed(h_s: CMat) -> Result<Self> {
        DriftModel::new(h_s, identity(1) * c(0.0, 0.0), Vec::new())
    }

    pub fn zero(system_dim: usize, env_dim: usize) -> Self {
        DriftModel {
            system_dim,
            env_dim,
            h_s: CMat::zeros(system_dim, system_dim),
            h_e: CMat::zeros(env_dim, env_dim),
            couplings: Vec::new(),
        }
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn h_s(&self) -> &CMat {
        &self.h_s
    }

    pub fn h_e(&self) -> &CMat {
        &self.h_e
    }

    pub fn couplings(&self) -> &[(CMat, CMat)] {
        &self.couplings
    }

    pub fn total(&self) -> CMat {
        let mut h = kron(&self.h_s, &identity(self.env_dim))
            + kron(&identity(self.system_dim), &self.h_e);
        for (s, e) in &self.couplings {
            h += kron(s, e);
        }
        h
    }

    pub fn scaled(&self, factor: f64) -> DriftModel {
        let f = c(factor, 0.0);
        DriftModel {
            system_dim: self.system_dim,
            env_dim: self.env_dim,
            h_s: &self.h_s * f,
            h_e: &self.h_e * f,
            couplings: self
                .couplings
                .iter()
                .map(|(s, e)| (s * f, e.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropagatorResult {
    pub unitary: CMat,
    pub t0: f64,
    pub t1: f64,
    pub slices: usize,
    /// `‖U†U − I‖_F`; slicing is exact for piecewise-constant input, so this
    /// is the only error left.
    pub error_estimate: f64,
}

/// `T exp(−i ∫_{t0}^{t1} H(t) dt)` for a piecewise-constant timeline given
/// as `(duration, H)` pairs starting at t = 0.
pub fn time_ordered_exp(
    timeline: &[(f64, CMat)],
    t0: f64,
    t1: f64,
    slices_per_segment: usize,
) -> Result<PropagatorResult> {
    let total: f64 = timeline.iter().map(|(dt, _)| dt).sum();
    let eps = 1e-12 * total.max(1.0);
    if !(t0 >= -eps && t1 <= total + eps && t0 <= t1) {
        return Err(Error::TimeOutOfRange(format!(
            "[{t0}, {t1}] outside [0, {total}]"
        )));
    }
    let d = timeline.first().map_or(1, |(_, h)| h.nrows());
    let k = slices_per_segment.max(1);
    let mut u = identity(d);
    let mut start = 0.0;
    let mut slices = 0;
    for (dt, h) in timeline {
        let end = start + dt;
        let lo = t0.max(start);
        let hi = t1.min(end);
        if hi > lo {
            let slice = expm_hermitian(h, (hi - lo) / k as f64);
            for _ in 0..k {
                u = &slice * u;
            }
            slices += k;
        }
        start = end;
    }
    let error_estimate = unitarity_defect(&u);
    Ok(PropagatorResult {
        unitary: u,
        t0,
        t1,
        slices,
        error_estimate,
    })
}

fn ideal_unitary_in_piece(pieces: &[Piece], s: f64) -> CMat {
    let piece = pieces
        .iter()
        .find(|p| s < p.start + p.fraction)
        .unwrap_or_else(|| pieces.last().expect("non-empty profile"));
    expm_hermitian(&piece.control, s - piece.start) * &piece.entry
}

/// Ideal control propagator `U_c(t)`, with `t` reduced modulo the cycle time.
pub fn control_propagator(schedule: &ControlSchedule, t: f64) -> Result<CMat> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::TimeOutOfRange(format!("t = {t}")));
    }
    let tc = schedule.cycle_time();
    let dt = schedule.delta_t();
    let tau = t % tc;
    let mut l = (tau / dt).floor() as usize;
    l = l.min(schedule.interval_count() - 1);
    let s = (tau / dt - l as f64).clamp(0.0, 1.0);
    let frame = &schedule.frames()[l];
    Ok(match schedule.kind() {
        ScheduleKind::BangBang => frame.clone(),
        ScheduleKind::Eulerian => {
            let color = schedule.sequence()[l];
            ideal_unitary_in_piece(schedule.pieces(color), s) * frame
        }
    })
}

/// Composite Simpson weights on `[0, 1]` with `n` intervals, plus the
/// weights of the same rule on the half grid (every other node).
struct SimpsonRule {
    nodes: Vec<f64>,
    fine: Vec<f64>,
    coarse: Vec<f64>,
}

impl SimpsonRule {
    fn new(quad_points: usize) -> Self {
        let n = quad_points.max(4).div_ceil(4) * 4;
        let h = 1.0 / n as f64;
        let nodes = (0..=n).map(|i| i as f64 * h).collect();
        let simpson = |m: usize, h: f64| -> Vec<f64> {
            (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    w * h / 3.0
                })
                .collect()
        };
        let fine = simpson(n, h);
        let half = simpson(n / 2, 2.0 * h);
        let coarse = (0..=n)
            .map(|i| if i % 2 == 0 { half[i / 2] } else { 0.0 })
            .collect();
        SimpsonRule {
            nodes,
            fine,
            coarse,
        }
    }
}

/// Fine and coarse quadrature of `∫_0^1 f(piece, u(τ)) dτ` over the pieces
/// of one sub-interval, where `u(τ)` is the ideal control propagator.
fn integrate_pieces<F>(pieces: &[Piece], rule: &SimpsonRule, dim: usize, mut f: F) -> (CMat, CMat)
where
    F: FnMut(&Piece, &CMat) -> CMat,
{
    let mut fine = CMat::zeros(dim, dim);
    let mut coarse = CMat::zeros(dim, dim);
    for piece in pieces {
        let eig = HermitianEigen::new(&piece.control);
        for (i, &x) in rule.nodes.iter().enumerate() {
            let u = eig.propagator(piece.fraction * x) * &piece.entry;
            let val = f(piece, &u);
            fine += &val * c(rule.fine[i] * piece.fraction, 0.0);
            if rule.coarse[i] != 0.0 {
                coarse += &val * c(rule.coarse[i] * piece.fraction, 0.0);
            }
        }
    }
    (fine, coarse)
}

fn check_profiles(profiles: &[PulseProfile], x: &CMat) -> Result<usize> {
    let d = profiles
        .first()
        .ok_or_else(|| Error::InvalidProfile("no profiles".into()))?
        .dim();
    if profiles.iter().any(|p| p.dim() != d) || x.shape() != (d, d) {
        return Err(Error::Shape(format!(
            "operator is {}x{}, profiles act on dimension {d}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(d)
}

/// `(1/|Γ|) Σ_λ ∫_0^1 u_λ†(τ) X u_λ(τ) dτ`.
pub fn f_map(profiles: &[PulseProfile], x: &CMat, quad_points: usize) -> Result<CMat> {
    let d = check_profiles(profiles, x)?;
    let rule = SimpsonRule::new(quad_points);
    let mut acc = CMat::zeros(d, d);
    for p in profiles {
        let pieces = merge_pieces(p, &[])?;
        let (fine, _) = integrate_pieces(&pieces, &rule, d, |_, u| u.adjoint() * x * u);
        acc += fine;
    }
    Ok(acc / c(profiles.len() as f64, 0.0))
}

/// `Π(F(X))`: the first-order average produced by the Eulerian schedule.
pub fn q_map(rep: &UnitaryRep, profiles: &[PulseProfile], x: &CMat, quad_points: usize) -> Result<CMat> {
    pi_g(rep, &f_map(profiles, x, quad_points)?)
}

/// First-order control-error operator `Q(ΔH_c)`, in the units of the fault
/// strengths (1/Δt).
pub fn residual_error(
    rep: &UnitaryRep,
    profiles: &[PulseProfile],
    fault: &FaultModel,
    quad_points: usize,
) -> Result<CMat> {
    let d = check_profiles(profiles, &identity(rep.dim()))?;
    if fault.per_generator().len() != profiles.len() {
        return Err(Error::IncompatibleFaultGrid(format!(
            "{} fault entries for {} generators",
            fault.per_generator().len(),
            profiles.len()
        )));
    }
    let rule = SimpsonRule::new(quad_points);
    let mut acc = CMat::zeros(d, d);
    for (p, f) in profiles.iter().zip(fault.per_generator()) {
        if f.is_empty() {
            continue;
        }
        let pieces = merge_pieces(p, f)?;
        let (fine, _) = integrate_pieces(&pieces, &rule, d, |piece, u| {
            let err = piece.error.as_ref().expect("merged with fault");
            u.adjoint() * err * u
        });
        acc += fine;
    }
    pi_g(rep, &(acc / c(profiles.len() as f64, 0.0)))
}

#[derive(Debug, Clone)]
pub struct AverageHamiltonian {
    pub matrix: CMat,
    pub error_estimate: f64,
}

/// `(1/T_c) ∫_0^{T_c} U_c†(t) [H_0 + ΔH_c(t)] U_c(t) dt`, with `U_c ⊗ I_E`
/// acting on `h0` (system or system ⊗ environment). Control errors carried
/// by a faulty schedule enter through `ΔH_c`.
pub fn average_hamiltonian(
    schedule: &ControlSchedule,
    h0: &CMat,
    quad_points: usize,
) -> Result<AverageHamiltonian> {
    let d = schedule.dim();
    if !h0.is_square() || !h0.nrows().is_multiple_of(d) {
        return Err(Error::Shape(format!(
            "drift is {}x{}, control acts on dimension {d}",
            h0.nrows(),
            h0.ncols()
        )));
    }
    if !is_hermitian(h0, 1e-10) {
        return Err(Error::InvalidDrift("drift Hamiltonian is not Hermitian".into()));
    }
    let de = h0.nrows() / d;
    let id_e = identity(de);
    let lift = |m: &CMat| if de == 1 { m.clone() } else { kron(m, &id_e) };
    let big = h0.nrows();
    let l_count = schedule.interval_count();

    let (fine, coarse) = match schedule.kind() {
        ScheduleKind::BangBang => {
            let mut acc = CMat::zeros(big, big);
            for g in &schedule.frames()[..l_count] {
                let w = lift(g);
                acc += w.adjoint() * h0 * &w;
            }
            (acc.clone(), acc)
        }
        ScheduleKind::Eulerian => {
            let rule = SimpsonRule::new(quad_points);
            let inv_dt = c(1.0 / schedule.delta_t(), 0.0);
            let mut fine = CMat::zeros(big, big);
            let mut coarse = CMat::zeros(big, big);
            for l in 0..l_count {
                let frame = &schedule.frames()[l];
                let (f, cc) = integrate_pieces(schedule.interval_pieces(l), &rule, big, |piece, u| {
                    let w = lift(&(u * frame));
                    let h = match &piece.error {
                        Some(e) => h0 + lift(e) * inv_dt,
                        None => h0.clone(),
                    };
                    w.adjoint() * h * &w
                });
                fine += f;
                coarse += cc;
            }
            (fine, coarse)
        }
    };
    let n = c(l_count as f64, 0.0);
    let fine = fine / n;
    let coarse = coarse / n;
    Ok(AverageHamiltonian {
        error_estimate: (&fine - &coarse).norm() / 15.0,
        matrix: crate::linalg::hermitian_part(&fine),
    })
}

#[derive(Debug, Clone)]
pub struct Simulation {
    /// `U(M T_c)` on system ⊗ environment.
    pub unitary: CMat,
    /// `U(T_c)`.
    pub cycle: CMat,
    pub unitarity_defect: f64,
}

fn simulate(
    drift: &DriftModel,
    schedule: &ControlSchedule,
    cycles: usize,
    slices: usize,
    include_control: bool,
) -> Result<Simulation> {
    if cycles == 0 {
        return Err(Error::InvalidSchedule("at least one cycle is required".into()));
    }
    if drift.system_dim() != schedule.dim() {
        return Err(Error::Shape(format!(
            "drift acts on dimension {}, control on {}",
            drift.system_dim(),
            schedule.dim()
        )));
    }
    let de = drift.env_dim();
    let id_e = identity(de);
    let h0 = drift.total();
    let big = h0.nrows();
    let dt = schedule.delta_t();
    let slices = slices.max(1);

    let mut cycle = identity(big);
    let evolve = |h: &CMat, duration: f64, k: usize, u: &mut CMat| {
        let slice = expm_hermitian(h, duration / k as f64);
        for _ in 0..k {
            *u = &slice * &*u;
        }
    };
    for l in 0..schedule.interval_count() {
        match schedule.kind() {
            ScheduleKind::BangBang => {
                evolve(&h0, dt, slices, &mut cycle);
                if include_control {
                    cycle = kron(&schedule.kicks()[l], &id_e) * cycle;
                }
            }
            ScheduleKind::Eulerian => {
                for piece in schedule.interval_pieces(l) {
                    let mut hc = CMat::zeros(schedule.dim(), schedule.dim());
                    if include_control {
                        hc += &piece.control;
                    }
                    if let Some(e) = &piece.error {
                        hc += e;
                    }
                    let h = &h0 + kron(&(hc / c(dt, 0.0)), &id_e);
                    let k = ((slices as f64 * piece.fraction).round() as usize).max(1);
                    evolve(&h, piece.fraction * dt, k, &mut cycle);
                }
            }
        }
    }
    let mut unitary = cycle.clone();
    for _ in 1..cycles {
        unitary = &cycle * unitary;
    }
    let defect = unitarity_defect(&unitary);
    if defect > UNITARITY_LIMIT {
        return Err(Error::SlicesTooCoarse { defect });
    }
    Ok(Simulation {
        unitary,
        cycle,
        unitarity_defect: defect,
    })
}

/// Full propagator of `H_0 + H_c(t) ⊗ I` (plus any control errors) over
/// `M` cycles.
pub fn simulate_cycles(
    drift: &DriftModel,
    schedule: &ControlSchedule,
    cycles: usize,
    slices: usize,
) -> Result<Simulation> {
    simulate(drift, schedule, cycles, slices, true)
}

/// Same time span and control errors as [`simulate_cycles`], but with the
/// intended control switched off.
pub fn simulate_uncontrolled(
    drift: &DriftModel,
    schedule: &ControlSchedule,
    cycles: usize,
    slices: usize,
) -> Result<Simulation> {
    simulate(drift, schedule, cycles, slices, false)
}

#[derive(Debug, Clone, Copy)]
pub struct DecouplingDistance {
    pub distance: f64,
    pub quad_error: f64,
    pub unitarity_defect: f64,
}

/// Phase-aligned distance between `U(M T_c)` and `exp(−i H̄ M T_c)`.
pub fn decoupling_distance(
    drift: &DriftModel,
    schedule: &ControlSchedule,
    cycles: usize,
    slices: usize,
    quad_points: usize,
) -> Result<DecouplingDistance> {
    let sim = simulate_cycles(drift, schedule, cycles, slices)?;
    let avg = average_hamiltonian(schedule, &drift.total(), quad_points)?;
    let target = expm_hermitian(&avg.matrix, cycles as f64 * schedule.cycle_time());
    Ok(DecouplingDistance {
        distance: phase_distance(&sim.unitary, &target),
        quad_error: avg.error_estimate,
        unitarity_defect: sim.unitarity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{build_cayley, eulerian_cycle, EulerPath};
    use crate::group::close_group;
    use crate::linalg::{pauli_x, pauli_y, pauli_z};
    use crate::pulses::{apply_fault, bangbang_schedule, constant_profile, eulerian_schedule};
    use std::f64::consts::PI;

    fn carr_purcell(dt: f64) -> (UnitaryRep, ControlSchedule) {
        let (group, rep) = close_group(&[pauli_x()], 8).unwrap();
        let path = eulerian_cycle(&build_cayley(&group).unwrap(), 0).unwrap();
        let p = constant_profile(0, &rep, "sx", &pauli_x()).unwrap();
        (rep, eulerian_schedule(&path, vec![p], dt).unwrap())
    }

    #[test]
    fn simpson_rule_weights_sum_to_one() {
        for n in [2, 8, 64, 65] {
            let r = SimpsonRule::new(n);
            assert!((r.fine.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!((r.coarse.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn time_ordered_exp_examples() {
        let a = 3.0;
        let tl = vec![(PI / (2.0 * a), pauli_x() * c(a, 0.0))];
        let r = time_ordered_exp(&tl, 0.0, PI / (2.0 * a), 16).unwrap();
        assert!(phase_distance(&r.unitary, &pauli_x()) < 1e-12);
        assert!(r.error_estimate < 1e-12);

        let zero = vec![(1.0, CMat::zeros(2, 2))];
        let r = time_ordered_exp(&zero, 0.0, 1.0, 4).unwrap();
        assert!((r.unitary - identity(2)).norm() < 1e-15);

        assert!(matches!(
            time_ordered_exp(&zero, 0.0, 2.0, 4),
            Err(Error::TimeOutOfRange(_))
        ));
    }

    #[test]
    fn control_propagator_examples() {
        let (_, s) = carr_purcell(0.1);
        assert!((control_propagator(&s, 0.0).unwrap() - identity(2)).norm() < 1e-15);
        assert!(phase_distance(&control_propagator(&s, 0.1).unwrap(), &pauli_x()) < 1e-12);
        // U_c(Δt + s) = u_x(s) U_c(Δt)
        let s_val = 0.03;
        let expected = expm_hermitian(&pauli_x(), PI / 2.0 * s_val / 0.1) * &s.frames()[1];
        assert!((control_propagator(&s, 0.1 + s_val).unwrap() - expected).norm() < 1e-13);
        // cyclic
        let a = control_propagator(&s, 0.05).unwrap();
        let b = control_propagator(&s, 0.25).unwrap();
        assert!(phase_distance(&a, &b) < 1e-12);
        assert!(control_propagator(&s, -1.0).is_err());
    }

    #[test]
    fn control_propagator_matches_time_ordered_timeline() {
        let (_, s) = carr_purcell(0.1);
        let tl = s.timeline().unwrap();
        for t in [0.02, 0.1, 0.13, 0.19] {
            let a = control_propagator(&s, t).unwrap();
            let b = time_ordered_exp(&tl, 0.0, t, 8).unwrap().unitary;
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn average_hamiltonian_vanishes_for_sigma_z() {
        let (rep, s) = carr_purcell(0.1);
        let avg = average_hamiltonian(&s, &pauli_z(), 64).unwrap();
        assert!(avg.matrix.norm() < 1e-12);
        let bb = bangbang_schedule(&rep, 0.1).unwrap();
        let avg = average_hamiltonian(&bb, &pauli_z(), 64).unwrap();
        assert!(avg.matrix.norm() < 1e-15);
        // invariant operator passes through
        let avg = average_hamiltonian(&s, &pauli_x(), 64).unwrap();
        assert!((avg.matrix - pauli_x()).norm() < 1e-12);
        assert!(average_hamiltonian(&s, &(pauli_x() * crate::linalg::IM), 64).is_err());
    }

    #[test]
    fn f_map_basic_properties() {
        let (rep, s) = carr_purcell(0.1);
        let profiles = s.profiles();
        assert!((f_map(profiles, &identity(2), 64).unwrap() - identity(2)).norm() < 1e-13);
        assert!((f_map(profiles, &pauli_x(), 64).unwrap() - pauli_x()).norm() < 1e-13);
        assert!(q_map(&rep, profiles, &pauli_z(), 64).unwrap().norm() < 1e-14);
        assert!(f_map(profiles, &identity(3), 64).is_err());
    }

    #[test]
    fn residual_error_examples() {
        let (rep, s) = carr_purcell(0.1);
        let profiles = s.profiles();
        let eps = 0.1;
        for op in [pauli_y(), pauli_z()] {
            let f = FaultModel::uniform(&rep, profiles, &(op * c(eps, 0.0))).unwrap();
            assert!(residual_error(&rep, profiles, &f, 64).unwrap().norm() < 1e-12);
        }
        let f = FaultModel::uniform(&rep, profiles, &(pauli_x() * c(eps, 0.0))).unwrap();
        let r = residual_error(&rep, profiles, &f, 64).unwrap();
        assert!((r - pauli_x() * c(eps, 0.0)).norm() < 1e-12);
        let zero = FaultModel::zero(1);
        assert!(residual_error(&rep, profiles, &zero, 64).unwrap().norm() == 0.0);
    }

    #[test]
    fn simulation_with_zero_drift_is_cyclic() {
        let (_, s) = carr_purcell(0.1);
        let drift = DriftModel::zero(2, 2);
        let sim = simulate_cycles(&drift, &s, 3, 64).unwrap();
        assert!(phase_distance(&sim.unitary, &identity(4)) < 1e-12);
        let d = decoupling_distance(&drift, &s, 3, 64, 64).unwrap();
        assert!(d.distance < 1e-12);
    }

    #[test]
    fn invariant_drift_is_untouched() {
        let (_, s) = carr_purcell(0.1);
        let drift = DriftModel::closed(pauli_x() * c(0.7, 0.0)).unwrap();
        let sim = simulate_cycles(&drift, &s, 4, 64).unwrap();
        let expected = expm_hermitian(&(pauli_x() * c(0.7, 0.0)), 4.0 * s.cycle_time());
        assert!(phase_distance(&sim.unitary, &expected) < 1e-12);
        assert!(decoupling_distance(&drift, &s, 4, 64, 64).unwrap().distance < 1e-12);
    }

    #[test]
    fn drift_validation() {
        assert!(DriftModel::new(
            CMat::zeros(2, 2),
            CMat::zeros(2, 2),
            vec![(identity(2), pauli_z())]
        )
        .is_err());
        assert!(DriftModel::new(
            CMat::zeros(2, 2),
            CMat::zeros(2, 2),
            vec![(pauli_z(), pauli_x())]
        )
        .is_ok());
    }

    #[test]
    fn faulty_average_includes_residual() {
        let (rep, s) = carr_purcell(0.1);
        let eps = 0.1;
        let f = FaultModel::uniform(&rep, s.profiles(), &(pauli_x() * c(eps, 0.0))).unwrap();
        let faulty = apply_fault(&s, &f).unwrap();
        let avg = average_hamiltonian(&faulty, &CMat::zeros(2, 2), 64).unwrap();
        // residual in physical units: ε/Δt σx
        assert!((avg.matrix - pauli_x() * c(eps / 0.1, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn pauli_path_closes() {
        let (group, rep) = close_group(&[pauli_x(), pauli_z()], 8).unwrap();
        let graph = build_cayley(&group).unwrap();
        let path = EulerPath::from_colors(&graph, vec![0, 1, 0, 1, 1, 0, 1, 0]).unwrap();
        let profiles = vec![
            constant_profile(0, &rep, "sx", &pauli_x()).unwrap(),
            constant_profile(1, &rep, "sz", &pauli_z()).unwrap(),
        ];
        let s = eulerian_schedule(&path, profiles, 0.1).unwrap();
        let u = control_propagator(&s, 0.8 - 1e-15).unwrap();
        assert!(phase_distance(&u, &identity(2)) < 1e-9);
        assert!(phase_distance(&s.frames()[8], &identity(2)) < 1e-12);
    }
}
