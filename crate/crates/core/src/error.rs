use thiserror::Error;

use crate::network::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("network failed validation:\n{0}")]
    Invalid(ValidationReport),

    #[error("regulation graph has a cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("unknown reaction `{0}`")]
    UnknownReaction(String),

    #[error("`{0}` is an input signal and cannot be intervened on")]
    InterventionOnInput(String),

    #[error("degenerate theta for `{species}`: activation and deactivation mass are both zero")]
    DegenerateTheta { species: String },

    #[error("theta for `{species}` too close to the boundary for the Gaussian transform (T*theta*(1-theta) = {variance:.4} < 1)")]
    BoundaryTheta { species: String, variance: f64 },

    #[error("step dt = {dt} exceeds the stability limit {limit:.6}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("rate assignments cover {left} and {right} reactions, network has {expected}")]
    RateSetMismatch {
        left: usize,
        right: usize,
        expected: usize,
    },

    #[error("observed value {value} for `{species}` is outside the support of its assignment")]
    ObservationOutOfRange { species: String, value: f64 },

    #[error("observation has no value for: {}", .0.join(", "))]
    IncompleteObservation(Vec<String>),

    #[error("observed value {value} for `{species}` has no representable probability mass")]
    ZeroMassObservation { species: String, value: f64 },

    #[error("transform {transform} does not match the equilibrium family {family}")]
    FamilyMismatch {
        transform: &'static str,
        family: &'static str,
    },

    #[error("infeasible soft intervention: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
