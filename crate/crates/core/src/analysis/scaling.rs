//! Convergence of the stroboscopic evolution to the first-order average as
//! the cycle time shrinks.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{decoupling_distance, DriftModel};
use crate::error::Result;
use crate::pulses::{bangbang_schedule, eulerian_schedule};

use super::scenario::Scenario;

/// Distances below this are treated as round-off.
const DISTANCE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleChoice {
    Eulerian,
    BangBang,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub delta_t: f64,
    pub cycle_time: f64,
    pub cycles: usize,
    pub distance: f64,
    pub quad_error: f64,
}

impl ScalingRow {
    pub fn per_cycle(&self) -> f64 {
        self.distance / self.cycles as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    /// Log-log slope of per-cycle distance against cycle time.
    pub slope: Option<f64>,
    pub flags: Vec<String>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0 && sxy.is_finite()).then(|| sxy / sxx)
}

/// Decoupling distance for each `Δt`, evaluated in parallel and returned in
/// input order.
pub fn scaling_study(
    scenario: &Scenario,
    drift: &DriftModel,
    delta_ts: &[f64],
    cycles: usize,
    slices: usize,
    quad_points: usize,
    choice: ScheduleChoice,
) -> Result<ScalingStudy> {
    let rows = delta_ts
        .par_iter()
        .map(|&dt| {
            let schedule = match choice {
                ScheduleChoice::Eulerian => {
                    eulerian_schedule(&scenario.path, scenario.profiles.clone(), dt)?
                }
                ScheduleChoice::BangBang => bangbang_schedule(&scenario.rep, dt)?,
            };
            let d = decoupling_distance(drift, &schedule, cycles, slices, quad_points)?;
            Ok(ScalingRow {
                delta_t: dt,
                cycle_time: schedule.cycle_time(),
                cycles,
                distance: d.distance,
                quad_error: d.quad_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut flags = Vec::new();
    if rows.len() < 3 {
        flags.push(format!("{} point(s): at least 3 are needed for a slope fit", rows.len()));
    }
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.cycle_time), hi.max(r.cycle_time))
    });
    if rows.len() >= 2 && hi < 10.0 * lo * (1.0 - 1e-9) {
        flags.push("cycle times span less than a decade".into());
    }
    let at_floor = rows.iter().any(|r| r.distance <= DISTANCE_FLOOR);
    if at_floor {
        flags.push("distances at round-off level: slope undefined".into());
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.cycle_time.total_cmp(&b.cycle_time));
    if !at_floor && sorted.windows(2).any(|w| w[1].per_cycle() < w[0].per_cycle()) {
        flags.push("per-cycle error is not monotonic in cycle time (quadrature or slicing too coarse?)".into());
    }
    let slope = if rows.len() >= 2 && !at_floor {
        let xs: Vec<f64> = rows.iter().map(|r| r.cycle_time).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.per_cycle()).collect();
        fit_slope(&xs, &ys)
    } else {
        None
    };
    Ok(ScalingStudy { rows, slope, flags })
}
