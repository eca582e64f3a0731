//! Command implementations behind the `eulerdd` binary.

use std::fmt::Write as _;
use std::path::Path;

use eulerdd::analysis::{
    catalog, run_checks, scaling_study, structure_summary, CheckOutcome, RunSettings,
    ScheduleChoice,
};
use eulerdd::config::{RunConfig, Units, DEFAULT_DELTA_T};
use eulerdd::pulses::{apply_fault, eulerian_schedule};
use eulerdd::schedule_io::export_schedule;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] eulerdd::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Serialize)]
struct CatalogEntry {
    name: &'static str,
    description: &'static str,
}

/// Built-in scenario names with one-line descriptions.
pub fn cmd_list(json: bool) -> String {
    let entries: Vec<CatalogEntry> = catalog()
        .into_iter()
        .map(|(name, description)| CatalogEntry { name, description })
        .collect();
    if json {
        let mut s = serde_json::to_string_pretty(&entries).expect("catalog serializes");
        s.push('\n');
        return s;
    }
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    entries
        .iter()
        .map(|e| format!("{:width$}  {}\n", e.name, e.description))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Structure {
    pub dimension: usize,
    pub group_order: usize,
    pub generators: usize,
    pub path_length: usize,
    pub path: String,
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    pub center_dim: usize,
    pub profiles_in_algebra: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub seed: u64,
    pub quad_points: usize,
    pub slices: usize,
    pub structure: Structure,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self, verbose: bool) -> String {
        let st = &self.structure;
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {})", self.scenario, self.seed);
        let _ = writeln!(
            out,
            "  d = {}, |G| = {}, |Γ| = {}, L = {}",
            st.dimension, st.group_order, st.generators, st.path_length
        );
        let _ = writeln!(
            out,
            "  dim algebra = {}, dim commutant = {}, dim center = {}",
            st.algebra_dim, st.commutant_dim, st.center_dim
        );
        if verbose {
            let _ = writeln!(out, "  path {}", st.path);
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:width$}  measured {:.3e}  tolerance {:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            );
            if verbose && !c.note.is_empty() {
                let _ = writeln!(out, "     {}", c.note);
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "{}: {} of {} checks passed",
            if self.passed { "ok" } else { "FAILED" },
            self.checks.len() - failed,
            self.checks.len()
        );
        out
    }
}

fn settings(config: &RunConfig) -> RunSettings {
    RunSettings {
        quad_points: config.quad_points(),
        slices: config.slices(),
        seed: config.seed(),
        delta_t: config.delta_ts().first().copied(),
        cycles: config.cycles,
        random_faults: config.random_faults,
        fault_amplitude: config.fault_amplitude,
    }
}

/// Build the scenario and run all of its checks.
pub fn cmd_verify(config: &RunConfig) -> CliResult<VerifyReport> {
    let scenario = config.scenario()?;
    let settings = settings(config);
    let checks = run_checks(&scenario, &settings)?;
    let (algebra_dim, commutant_dim, center_dim) = structure_summary(&scenario);
    Ok(VerifyReport {
        scenario: scenario.name.clone(),
        seed: settings.seed,
        quad_points: settings.quad_points,
        slices: settings.slices,
        structure: Structure {
            dimension: scenario.rep.dim(),
            group_order: scenario.group.order(),
            generators: scenario.profiles.len(),
            path_length: scenario.path_length(),
            path: scenario.path.to_line(),
            algebra_dim,
            commutant_dim,
            center_dim,
            profiles_in_algebra: scenario.in_algebra(),
        },
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

pub const SWEEP_HEADER: &str = "delta_t,cycle_time,cycles,distance,quad_error";

/// Decoupling distance against the scenario's generic drift for each Δt.
pub fn cmd_sweep(config: &RunConfig) -> CliResult<String> {
    config.validate()?;
    let dts = config.delta_ts();
    if dts.is_empty() {
        return Err(eulerdd::Error::Config("sweep needs a delta_t list".into()).into());
    }
    if dts.len() > 1 {
        if let Some(inline) = &config.inline {
            if inline.profiles.iter().any(|p| p.units == Units::Absolute) {
                return Err(eulerdd::Error::Config(
                    "profiles in absolute units fix a single delta_t; use per-delta-t units to sweep"
                        .into(),
                )
                .into());
            }
        }
    }
    let scenario = config.scenario()?;
    let study = scaling_study(
        &scenario,
        &scenario.generic_drift,
        &dts,
        config.cycles(),
        config.slices(),
        config.quad_points(),
        ScheduleChoice::Eulerian,
    )?;
    let mut out = String::new();
    let _ = writeln!(out, "{SWEEP_HEADER}");
    for r in &study.rows {
        let _ = writeln!(
            out,
            "{:e},{:e},{},{:e},{:e}",
            r.delta_t, r.cycle_time, r.cycles, r.distance, r.quad_error
        );
    }
    for flag in &study.flags {
        let _ = writeln!(out, "# note: {flag}");
    }
    match study.slope {
        Some(s) => {
            let _ = writeln!(out, "# slope {s:.6}");
        }
        None => {
            let _ = writeln!(out, "# slope omitted: not enough usable points");
        }
    }
    Ok(out)
}

/// Segment-by-segment schedule of the scenario at the first Δt, optionally
/// with one of its named faults applied.
pub fn cmd_export_schedule(config: &RunConfig, fault: Option<&str>) -> CliResult<String> {
    let scenario = config.scenario()?;
    let dt = config.delta_ts().first().copied().unwrap_or(DEFAULT_DELTA_T);
    let mut schedule = eulerian_schedule(&scenario.path, scenario.profiles.clone(), dt)?;
    if let Some(name) = fault {
        let model = scenario.fault(name).ok_or_else(|| {
            let known: Vec<&str> = scenario.faults.iter().map(|f| f.name.as_str()).collect();
            eulerdd::Error::Config(format!(
                "scenario {} has no fault {name:?} (known: {})",
                scenario.name,
                known.join(", ")
            ))
        })?;
        schedule = apply_fault(&schedule, model)?;
    }
    Ok(export_schedule(&schedule, &scenario.rep)?)
}

pub fn write_output(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
