use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("group too large or not closed (more than {max_order} elements)")]
    GroupTooLarge { max_order: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("not a normal subgroup: {0}")]
    NotNormalSubgroup(String),

    #[error("precondition violation: {0}")]
    Precondition(String),

    #[error("degenerate decomposition; tighten tolerance or reseed ({0})")]
    DegenerateDecomposition(String),

    #[error("no Eulerian cycle: {0}")]
    NoEulerianCycle(String),

    #[error("unreachable generator along axis: {0}")]
    UnreachableGenerator(String),

    #[error("profile does not implement generator {generator}: achieved-vs-target distance {distance:.3e}")]
    ProfileMismatch { generator: usize, distance: f64 },

    #[error("invalid pulse profile: {0}")]
    InvalidProfile(String),

    #[error("incomplete profile set: no profile for color {0}")]
    IncompleteProfileSet(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("incompatible fault grid: {0}")]
    IncompatibleFaultGrid(String),

    #[error("time out of range: {0}")]
    TimeOutOfRange(String),

    #[error("invalid drift: {0}")]
    InvalidDrift(String),

    #[error("slices too coarse: unitarity defect {defect:.3e} exceeds 1e-8")]
    SlicesTooCoarse { defect: f64 },

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    #[error("configuration error: {0}")]
    Config(String),
}
