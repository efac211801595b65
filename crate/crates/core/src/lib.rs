pub mod builtin;
pub mod dist;
pub mod dsl;
pub mod equilibrium;
pub mod error;
pub mod network;
pub mod rng;
pub mod ssa;
pub mod scm;
pub mod eval;
pub mod io;

pub use dsl::{load, parse, serialize, ModelSource, ParseDiagnostic};
pub use equilibrium::{derive_equilibrium, equilibrium_means, mean_trajectory, EquilibriumModel};
pub use error::{Error, Result};
pub use eval::{eval_deterministic, eval_misspecification, eval_stochastic, EffectSample, EffectSource, Query};
pub use network::{RateAssignment, ReactionId, ReactionNetwork, SpeciesId};
pub use scm::{build_scm, soft_intervention_rates, NoiseTransform, Scm};
pub use ssa::{simulate_coupled_pair, simulate_ssa, SimConfig, Trajectory};
