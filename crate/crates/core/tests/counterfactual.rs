mod common;

use std::collections::BTreeMap;

use common::{binomial_chi2_p, mean, root_theta, std_err};
use eq_scm::builtin;
use eq_scm::equilibrium::derive_equilibrium;
use eq_scm::scm::{build_scm, soft_intervention_rates, NoiseTransform};
use eq_scm::ssa::{SimConfig, Simulator};
use eq_scm::{eval_stochastic, simulate_coupled_pair, Query, SpeciesId};

fn mapk() -> eq_scm::ReactionNetwork {
    builtin::load("mapk-exp1").unwrap()
}

/// K effect of dividing the K3 activation rate by 3, from hand-evaluated
/// mean chains.
fn mapk_exp1_delta() -> f64 {
    let chain = |v3: f64| {
        let k3 = 100.0 * root_theta(v3, 1.0, 0.1);
        let k2 = 100.0 * root_theta(0.1, k3, 2.0);
        100.0 * root_theta(0.1, k2, 1.0)
    };
    chain(0.1 / 3.0) - chain(0.1)
}

#[test]
fn coupled_pairs_center_on_mean_chain_effect() {
    let net = mapk();
    let id = net.find_reaction("act:K3:E1").unwrap();
    let prime = net.rates().scaled(id, 1.0 / 3.0);
    let k = net.species_index("K").unwrap();
    let deltas: Vec<f64> = (0..300)
        .map(|seed| {
            let (a, b) = simulate_coupled_pair(&net, &net.rates(), &prime, &SimConfig::end_state(100.0, seed)).unwrap();
            b.end_state()[k] - a.end_state()[k]
        })
        .collect();
    let delta = mapk_exp1_delta();
    assert!((delta + 2.97).abs() < 0.01);
    assert!((mean(&deltas) - delta).abs() < 1.0, "{} vs {delta}", mean(&deltas));
}

#[test]
fn binomial_scm_entails_root_law() {
    let scm = build_scm(&derive_equilibrium(&mapk()).unwrap(), NoiseTransform::BinomialInverseCdf).unwrap();
    let k3: Vec<u32> = scm.sample(10_000, 3).unwrap().iter().map(|x| x[0] as u32).collect();
    assert!(binomial_chi2_p(&k3, 100, 0.5) > 0.01);
}

#[test]
fn gaussian_scm_entails_root_moments() {
    let scm = build_scm(&derive_equilibrium(&mapk()).unwrap(), NoiseTransform::GaussianReparam).unwrap();
    let k3: Vec<f64> = scm.sample(10_000, 4).unwrap().iter().map(|x| x[0]).collect();
    assert!((mean(&k3) - 50.0).abs() < 3.0 * std_err(&k3));
}

#[test]
fn counterfactual_on_mean_observation_matches_mean_chain() {
    let scm = build_scm(&derive_equilibrium(&mapk()).unwrap(), NoiseTransform::GaussianReparam).unwrap();
    let obs: BTreeMap<SpeciesId, f64> = [("K3", 50.0), ("K2", 71.0), ("K", 88.0)]
        .into_iter()
        .map(|(k, v)| (SpeciesId::new(k), v))
        .collect();
    let draws = scm.counterfactual(&obs, ("K3", 25.0), "K", 1000, 7).unwrap();
    let k2 = 100.0 * root_theta(0.1, 25.0, 2.0);
    let k = 100.0 * root_theta(0.1, k2, 1.0);
    assert!((mean(&draws) - k).abs() < 0.5, "{} vs {k}", mean(&draws));
}

#[test]
fn soft_intervention_holds_under_simulation() {
    let net = mapk();
    let knob = net.find_reaction("act:K3:E1").unwrap();
    let rates = soft_intervention_rates(&net, "K3", 25.0, knob).unwrap();
    let sim = Simulator::new(&net).unwrap().with_rates(&rates).unwrap();
    let seeds: Vec<u64> = (0..400).collect();
    let k3: Vec<f64> = sim.end_states(100.0, &seeds).iter().map(|s| f64::from(s[0])).collect();
    assert!((mean(&k3) - 25.0).abs() < 3.5 * std_err(&k3));
}

#[test]
fn stochastic_protocol_histograms_overlap() {
    let net = mapk();
    let prime = net.rates().scaled(net.find_reaction("act:K3:E1").unwrap(), 1.0 / 3.0);
    let seeds: Vec<u64> = (0..200).collect();
    let r = eval_stochastic(&net, &net.rates(), &prime, 100.0, &Query::new("K3", "K"), &seeds, 9).unwrap();
    let ssa: Vec<f64> = r.effects_ssa.iter().map(|e| e.value).collect();
    let scm: Vec<f64> = r.effects_scm.iter().map(|e| e.value).collect();
    assert!((mean(&ssa) - mean(&scm)).abs() < 1.5);
    assert_eq!(r.effects_ssa.len(), 200);
}
