//! Evaluation protocols: counterfactuals from the SCM against deterministic
//! and coupled stochastic ground truth, and the misspecification study.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{derive_equilibrium, mean_chain_under};
use crate::error::{Error, Result};
use crate::network::{RateAssignment, ReactionId, ReactionNetwork};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scm::{build_scm, soft_intervention_rates, NoiseTransform};
use crate::ssa::{check_rate_pair, Simulator, DEFAULT_T_END};

const REP_STREAM: u64 = 0x5245_5053;
const OBSERVATION_STREAM: u64 = 0x4f42_5356;
const TRUE_STREAM: u64 = 0x5452_5545;
const SIM_BASE_STREAM: u64 = 0x5349_4d41;
const SIM_PRIME_STREAM: u64 = 0x5349_4d42;
const SCM_STREAM: u64 = 0x5343_4d43;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EffectSource {
    ScmCounterfactual,
    CoupledSsa,
    DeterministicTruth,
    /// Uncoupled runs of a misspecified model.
    DirectSimulation,
}

impl EffectSource {
    pub fn name(self) -> &'static str {
        match self {
            EffectSource::ScmCounterfactual => "scm",
            EffectSource::CoupledSsa => "ssa",
            EffectSource::DeterministicTruth => "truth",
            EffectSource::DirectSimulation => "direct",
        }
    }
}

/// One causal-effect value: counterfactual minus observed query value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSample {
    pub value: f64,
    pub source: EffectSource,
    /// SSA seed for stochastic sources, draw index otherwise.
    pub index: u64,
}

/// Intervention target, query species and SCM transform shared by the
/// protocols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub intervene: String,
    pub query: String,
    pub transform: NoiseTransform,
}

impl Query {
    pub fn new(intervene: &str, query: &str) -> Self {
        Query {
            intervene: intervene.to_owned(),
            query: query.to_owned(),
            transform: NoiseTransform::GaussianReparam,
        }
    }

    pub fn with_transform(mut self, transform: NoiseTransform) -> Self {
        self.transform = transform;
        self
    }

    fn indices(&self, network: &ReactionNetwork) -> Result<(usize, usize)> {
        let find = |id: &str| {
            network
                .species_index(id)
                .ok_or_else(|| Error::UnknownSpecies(id.to_owned()))
        };
        Ok((find(&self.intervene)?, find(&self.query)?))
    }
}

/// Fixed-width bin counts over the sample range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if values.is_empty() {
            return Histogram {
                lo: 0.0,
                width: 1.0,
                counts: vec![0; bins],
            };
        }
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let mut counts = vec![0; bins];
        for v in values {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Histogram { lo, width, counts }
    }
}

pub mod stats {
    pub fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(xs: &[f64]) -> f64 {
        let m = mean(xs);
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
    }

    /// Midpoint of the two central order statistics for even lengths.
    pub fn median(xs: &[f64]) -> f64 {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            f64::NAN
        } else if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }
}

fn values(samples: &[EffectSample]) -> Vec<f64> {
    samples.iter().map(|s| s.value).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicEval {
    pub delta_true: f64,
    /// Mean chain under `rates` (the observation).
    pub observation: Vec<f64>,
    /// Mean chain under `rates_prime`.
    pub counterfactual_means: Vec<f64>,
    pub effects: Vec<EffectSample>,
}

impl DeterministicEval {
    pub fn effect_values(&self) -> Vec<f64> {
        values(&self.effects)
    }

    /// SCM effects followed by the single ground-truth sample.
    pub fn all_samples(&self) -> Vec<EffectSample> {
        let mut out = self.effects.clone();
        out.push(EffectSample {
            value: self.delta_true,
            source: EffectSource::DeterministicTruth,
            index: 0,
        });
        out
    }
}

/// Deterministic ground truth from the mean chains under both rate sets;
/// SCM counterfactuals conditioned on the first chain under
/// `do(intervene = x'_intervene)`.
///
/// Inverse-CDF transforms need integer observations, so the mean-chain
/// observation is rounded for them.
pub fn eval_deterministic(
    network: &ReactionNetwork,
    rates: &RateAssignment,
    rates_prime: &RateAssignment,
    query: &Query,
    n_draws: usize,
    seed: u64,
) -> Result<DeterministicEval> {
    check_rate_pair(network, rates, rates_prime)?;
    let (i, j) = query.indices(network)?;
    let x = mean_chain_under(network, rates)?;
    let x_prime = mean_chain_under(network, rates_prime)?;
    let delta_true = x_prime[j] - x[j];
    let model = derive_equilibrium(&network.with_rates(rates)?)?;
    let scm = build_scm(&model, query.transform)?;
    let observed: Vec<f64> = match query.transform {
        NoiseTransform::GaussianReparam => x.clone(),
        _ => x.iter().map(|v| v.round()).collect(),
    };
    let draws = scm.counterfactual_vector(&observed, (&query.intervene, x_prime[i]), &query.query, n_draws, seed)?;
    let effects = draws
        .iter()
        .enumerate()
        .map(|(k, d)| EffectSample {
            value: d - observed[j],
            source: EffectSource::ScmCounterfactual,
            index: k as u64,
        })
        .collect();
    Ok(DeterministicEval {
        delta_true,
        observation: x,
        counterfactual_means: x_prime,
        effects,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticEval {
    /// Mean chain under `rates_prime`; supplies the intervention value.
    pub counterfactual_means: Vec<f64>,
    pub effects_ssa: Vec<EffectSample>,
    pub effects_scm: Vec<EffectSample>,
}

impl StochasticEval {
    pub fn all_samples(&self) -> Vec<EffectSample> {
        self.effects_ssa.iter().chain(&self.effects_scm).copied().collect()
    }
}

/// Per seed: a coupled SSA pair gives `Δ_M = x^{s'}_q − x^s_q`; the SCM
/// conditioned on `x^s` under `do(intervene = x^{d'}_intervene)` gives
/// `Δ_C = x*_q − x^s_q`, with `x^{d'}` the mean chain under `rates_prime`.
pub fn eval_stochastic(
    network: &ReactionNetwork,
    rates: &RateAssignment,
    rates_prime: &RateAssignment,
    t_end: f64,
    query: &Query,
    seeds: &[u64],
    scm_seed: u64,
) -> Result<StochasticEval> {
    check_rate_pair(network, rates, rates_prime)?;
    let (i, j) = query.indices(network)?;
    let x_d_prime = mean_chain_under(network, rates_prime)?;
    let scm = build_scm(&derive_equilibrium(&network.with_rates(rates)?)?, query.transform)?;
    let base = Simulator::new(network)?;
    let sim = base.with_rates(rates)?;
    let sim_prime = base.with_rates(rates_prime)?;
    let pairs: Vec<(EffectSample, EffectSample)> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &seed)| {
            let xs: Vec<f64> = sim.end_state(t_end, seed).iter().map(|&v| f64::from(v)).collect();
            let xs_prime = f64::from(sim_prime.end_state(t_end, seed)[j]);
            let draw = scm.counterfactual_vector(
                &xs,
                (&query.intervene, x_d_prime[i]),
                &query.query,
                1,
                derive_seed(scm_seed, SCM_STREAM, k as u64),
            )?[0];
            Ok((
                EffectSample {
                    value: xs_prime - xs[j],
                    source: EffectSource::CoupledSsa,
                    index: seed,
                },
                EffectSample {
                    value: draw - xs[j],
                    source: EffectSource::ScmCounterfactual,
                    index: seed,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (effects_ssa, effects_scm) = pairs.into_iter().unzip();
    Ok(StochasticEval {
        counterfactual_means: x_d_prime,
        effects_ssa,
        effects_scm,
    })
}

/// How the counterfactual rate set is obtained from a (possibly
/// misspecified) rate set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RatesPrimeRule {
    Scale { reaction: ReactionId, factor: f64 },
    SoftTarget { target: String, desired_mean: f64, knob: ReactionId },
}

impl RatesPrimeRule {
    pub fn apply(&self, network: &ReactionNetwork, rates: &RateAssignment) -> Result<RateAssignment> {
        match self {
            RatesPrimeRule::Scale { reaction, factor } => {
                if reaction.0 >= rates.len() {
                    return Err(Error::UnknownReaction(format!("#{}", reaction.0)));
                }
                Ok(rates.scaled(*reaction, *factor))
            }
            RatesPrimeRule::SoftTarget {
                target,
                desired_mean,
                knob,
            } => soft_intervention_rates(&network.with_rates(rates)?, target, *desired_mean, *knob),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisspecConfig {
    /// Rate receiving the additive `Uniform(lo, hi)` perturbation.
    pub perturbed: ReactionId,
    pub lo: f64,
    pub hi: f64,
    pub repetitions: usize,
    /// SSA seeds for the true (coupled) effect distribution per repetition.
    pub seeds_per_rep: usize,
    /// Seeds for the misspecified direct simulation per repetition.
    pub sim_seeds: usize,
    pub t_end: f64,
    /// Every per-repetition stream is derived from this.
    pub seed: u64,
}

impl MisspecConfig {
    pub fn new(perturbed: ReactionId, lo: f64, hi: f64, seed: u64) -> Self {
        MisspecConfig {
            perturbed,
            lo,
            hi,
            repetitions: 50,
            seeds_per_rep: 500,
            sim_seeds: 500,
            t_end: DEFAULT_T_END,
            seed,
        }
    }

    pub fn check(&self, network: &ReactionNetwork) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Config(format!(
                "perturbation interval needs lo < hi, got ({}, {})",
                self.lo, self.hi
            )));
        }
        if self.repetitions == 0 || self.seeds_per_rep == 0 || self.sim_seeds == 0 {
            return Err(Error::Config("repetition and seed counts must be at least 1".into()));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        let rate = network
            .reactions
            .get(self.perturbed.0)
            .map(|r| r.rate)
            .ok_or_else(|| Error::UnknownReaction(format!("#{}", self.perturbed.0)))?;
        if rate + self.lo <= 0.0 {
            return Err(Error::Config(format!(
                "perturbation ({}, {}) can make rate {rate} non-positive",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepReport {
    pub rep: usize,
    pub seed: u64,
    /// Additive perturbation applied to the misspecified rate.
    pub perturbation: f64,
    pub observation: Vec<f64>,
    pub median_true: f64,
    pub median_scm: f64,
    pub median_sim: f64,
}

impl RepReport {
    pub fn gap_scm(&self) -> f64 {
        (self.median_true - self.median_scm).abs()
    }

    pub fn gap_sim(&self) -> f64 {
        (self.median_true - self.median_sim).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisspecReport {
    pub reps: Vec<RepReport>,
    pub avg_gap_scm: f64,
    pub avg_gap_sim: f64,
    /// Repetitions whose SCM gap is strictly below the direct-simulation gap.
    pub scm_closer: usize,
}

/// Per repetition:
/// 1. observe `x`, one SSA end state of the true model;
/// 2. true effects from coupled SSA pairs under the true rates and their
///    counterfactual rates;
/// 3. perturb one rate by `Uniform(lo, hi)` to get the misspecified model;
/// 4. SCM effects from the misspecified SCM conditioned on `x` under
///    `do(intervene = x')`, `x'` the misspecified counterfactual mean chain;
/// 5. direct-simulation effects from uncoupled SSA runs of the misspecified
///    model under its two rate sets, differenced seed by seed.
pub fn eval_misspecification(
    network: &ReactionNetwork,
    config: &MisspecConfig,
    rule: &RatesPrimeRule,
    query: &Query,
) -> Result<MisspecReport> {
    config.check(network)?;
    let (i, j) = query.indices(network)?;
    let rates = network.rates();
    let rates_prime = rule.apply(network, &rates)?;
    let base = Simulator::new(network)?;
    let sim_true = base.with_rates(&rates)?;
    let sim_true_prime = base.with_rates(&rates_prime)?;
    let t_end = config.t_end;

    let run_rep = |rep: usize| -> Result<RepReport> {
        let seed = derive_seed(config.seed, REP_STREAM, rep as u64);
        let perturbation = rng_from_seed(seed).random_range(config.lo..config.hi);
        let x: Vec<f64> = sim_true
            .end_state(t_end, derive_seed(seed, OBSERVATION_STREAM, 0))
            .iter()
            .map(|&v| f64::from(v))
            .collect();

        let true_effects: Vec<f64> = (0..config.seeds_per_rep)
            .into_par_iter()
            .map(|k| {
                let s = derive_seed(seed, TRUE_STREAM, k as u64);
                f64::from(sim_true_prime.end_state(t_end, s)[j]) - f64::from(sim_true.end_state(t_end, s)[j])
            })
            .collect();

        let mut m = rates.clone();
        m.set(config.perturbed, m.get(config.perturbed) + perturbation);
        let misspecified = network.with_rates(&m)?;
        let m_prime = rule.apply(&misspecified, &m)?;
        let x_prime = mean_chain_under(network, &m_prime)?;
        let scm = build_scm(&derive_equilibrium(&misspecified)?, query.transform)?;
        let scm_effects: Vec<f64> = scm
            .counterfactual_vector(
                &x,
                (&query.intervene, x_prime[i]),
                &query.query,
                config.seeds_per_rep,
                derive_seed(seed, SCM_STREAM, 0),
            )?
            .iter()
            .map(|d| d - x[j])
            .collect();

        let sim_m = base.with_rates(&m)?;
        let sim_m_prime = base.with_rates(&m_prime)?;
        let sim_effects: Vec<f64> = (0..config.sim_seeds)
            .into_par_iter()
            .map(|k| {
                let a = sim_m.end_state(t_end, derive_seed(seed, SIM_BASE_STREAM, k as u64))[j];
                let b = sim_m_prime.end_state(t_end, derive_seed(seed, SIM_PRIME_STREAM, k as u64))[j];
                f64::from(b) - f64::from(a)
            })
            .collect();

        Ok(RepReport {
            rep,
            seed,
            perturbation,
            observation: x,
            median_true: stats::median(&true_effects),
            median_scm: stats::median(&scm_effects),
            median_sim: stats::median(&sim_effects),
        })
    };

    let reps: Vec<RepReport> = (0..config.repetitions)
        .into_par_iter()
        .map(run_rep)
        .collect::<Result<_>>()?;
    let gaps_scm: Vec<f64> = reps.iter().map(RepReport::gap_scm).collect();
    let gaps_sim: Vec<f64> = reps.iter().map(RepReport::gap_sim).collect();
    Ok(MisspecReport {
        avg_gap_scm: stats::mean(&gaps_scm),
        avg_gap_sim: stats::mean(&gaps_sim),
        scm_closer: reps.iter().filter(|r| r.gap_scm() < r.gap_sim()).count(),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn mapk() -> ReactionNetwork {
        builtin::load("mapk-exp1").unwrap()
    }

    #[test]
    fn deterministic_mapk_centres_on_truth() {
        let n = mapk();
        let slow = n.rates().scaled(ReactionId(0), 1.0 / 3.0);
        let out = eval_deterministic(&n, &n.rates(), &slow, &Query::new("K3", "K"), 500, 1).unwrap();
        assert!((out.delta_true + 2.97).abs() < 0.01, "{}", out.delta_true);
        let mean = stats::mean(&out.effect_values());
        assert!((mean - out.delta_true).abs() < 0.5, "{mean}");
        assert_eq!(out.all_samples().iter().filter(|s| s.source == EffectSource::DeterministicTruth).count(), 1);
    }

    #[test]
    fn deterministic_null_intervention() {
        let n = mapk();
        let out = eval_deterministic(&n, &n.rates(), &n.rates(), &Query::new("K3", "K"), 200, 1).unwrap();
        assert_eq!(out.delta_true, 0.0);
        assert!(stats::mean(&out.effect_values()).abs() < 0.1);
    }

    #[test]
    fn deterministic_is_reproducible() {
        let n = mapk();
        let slow = n.rates().scaled(ReactionId(0), 1.0 / 3.0);
        let q = Query::new("K3", "K").with_transform(NoiseTransform::BinomialInverseCdf);
        let a = eval_deterministic(&n, &n.rates(), &slow, &q, 100, 5).unwrap();
        let b = eval_deterministic(&n, &n.rates(), &slow, &q, 100, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stochastic_null_intervention_centres_at_zero() {
        let n = mapk();
        let seeds: Vec<u64> = (0..40).collect();
        let out = eval_stochastic(&n, &n.rates(), &n.rates(), 100.0, &Query::new("K3", "K"), &seeds, 3).unwrap();
        assert!(out.effects_ssa.iter().all(|e| e.value == 0.0));
        assert!(stats::mean(&values(&out.effects_scm)).abs() < 0.5);
        assert_eq!(out.effects_ssa.iter().map(|e| e.index).collect::<Vec<_>>(), seeds);
    }

    #[test]
    fn misspec_rejects_empty_interval() {
        let n = mapk();
        let cfg = MisspecConfig::new(ReactionId(2), 0.3, 0.3, 1);
        let rule = RatesPrimeRule::Scale {
            reaction: ReactionId(0),
            factor: 1.0 / 3.0,
        };
        assert!(matches!(
            eval_misspecification(&n, &cfg, &rule, &Query::new("K3", "K")),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn misspec_small_run_is_reproducible() {
        let n = mapk();
        let mut cfg = MisspecConfig::new(ReactionId(2), 0.1, 0.5, 11);
        cfg.repetitions = 2;
        cfg.seeds_per_rep = 20;
        cfg.sim_seeds = 20;
        let rule = RatesPrimeRule::Scale {
            reaction: ReactionId(0),
            factor: 1.0 / 3.0,
        };
        let q = Query::new("K3", "K");
        let a = eval_misspecification(&n, &cfg, &rule, &q).unwrap();
        let b = eval_misspecification(&n, &cfg, &rule, &q).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.reps.len(), 2);
        assert!(a.reps.iter().all(|r| (0.1..0.5).contains(&r.perturbation)));
    }

    #[test]
    fn soft_target_rule_matches_scale_rule_on_root() {
        let n = mapk();
        let scale = RatesPrimeRule::Scale {
            reaction: ReactionId(0),
            factor: 1.0 / 3.0,
        };
        let soft = RatesPrimeRule::SoftTarget {
            target: "K3".into(),
            desired_mean: 25.0,
            knob: ReactionId(0),
        };
        let a = scale.apply(&n, &n.rates()).unwrap();
        let b = soft.apply(&n, &n.rates()).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn median_and_histogram() {
        assert_eq!(stats::median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(stats::median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let h = Histogram::new(&[0.0, 1.0, 2.0, 3.0], 3);
        assert_eq!(h.counts, vec![1, 1, 2]);
        assert_eq!(Histogram::new(&[5.0, 5.0], 4).counts, vec![2, 0, 0, 0]);
    }
}
