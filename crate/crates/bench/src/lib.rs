//! Shared fixtures for the criterion benchmarks in `benches/`.

use eq_scm::builtin;
use eq_scm::ReactionNetwork;

pub fn builtin_model(name: &str) -> ReactionNetwork {
    builtin::load(name).unwrap_or_else(|d| panic!("builtin {name}: {d:?}"))
}

/// `rates` with one reaction scaled, looked up by key.
pub fn scaled(network: &ReactionNetwork, key: &str, factor: f64) -> eq_scm::RateAssignment {
    let id = network.find_reaction(key).expect("reaction key");
    network.rates().scaled(id, factor)
}
