//! Scenario-level verification built on the core modules.

pub mod checks;
pub mod scaling;
pub mod scenario;

pub use checks::{
    decoupling_fidelity, noise_suppression_check, projector_properties, robustness_report,
    run_checks, structure_summary, subsystem_fidelity, verify_theorem, BlockClass, Check, CheckOutcome,
    FidelityComparison, FidelityFault, ResidualExpectation, RunSettings, SubsystemReport,
    Suppression,
};
pub use scaling::{fit_slope, scaling_study, ScalingRow, ScalingStudy, ScheduleChoice};
pub use scenario::{builtin, builtin_scenarios, catalog, NamedFault, Scenario, ScenarioKind};
