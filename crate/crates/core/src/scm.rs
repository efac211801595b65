//! Structural causal model over an equilibrium model.
//!
//! Every species gets one exogenous noise variable and one structural
//! assignment `X_i = f(N_i; T_i, θ_i(parents))`. The inverse-CDF transforms
//! are monotone in both the noise and θ, so the noise posterior given a full
//! observation is available in closed form: a point for the Gaussian
//! transform, a sub-interval of (0, 1) for the inverse-CDF transforms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{BinomialCdf, PoissonCdf};
use crate::equilibrium::{derive_equilibrium, EquilibriumModel, Family};
use crate::error::{Error, Result};
use crate::network::{
    NodeRef, RateAssignment, ReactionId, ReactionKind, ReactionNetwork, Regulator, SpeciesId,
};
use crate::rng::{derive_seed, open01, rng_from_seed, SimRng};

const SAMPLE_STREAM: u64 = 0x5343_4d5f_5341_4d50;
const COUNTERFACTUAL_STREAM: u64 = 0x5343_4d5f_4346_5f5f;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseTransform {
    /// `X = F⁻¹_Binom(N; T, θ)`, `N ~ U(0,1)`.
    BinomialInverseCdf,
    /// `X = N·√(Tθ(1−θ)) + Tθ`, `N ~ N(0,1)`. Real-valued.
    GaussianReparam,
    /// `X = F⁻¹_Pois(N; λθ)`, `N ~ U(0,1)`.
    PoissonInverseCdf,
}

impl NoiseTransform {
    pub fn name(self) -> &'static str {
        match self {
            NoiseTransform::BinomialInverseCdf => "binomial",
            NoiseTransform::GaussianReparam => "gaussian",
            NoiseTransform::PoissonInverseCdf => "poisson",
        }
    }

    fn uniform_noise(self) -> bool {
        !matches!(self, NoiseTransform::GaussianReparam)
    }
}

impl fmt::Display for NoiseTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binomial" => Ok(NoiseTransform::BinomialInverseCdf),
            "gaussian" => Ok(NoiseTransform::GaussianReparam),
            "poisson" => Ok(NoiseTransform::PoissonInverseCdf),
            other => Err(Error::Config(format!(
                "unknown transform `{other}` (expected binomial, gaussian or poisson)"
            ))),
        }
    }
}

/// Posterior over one species' noise variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NoiseBelief {
    PointMass { value: f64 },
    /// `N ~ U(lo, hi]`.
    UniformInterval { lo: f64, hi: f64 },
    SampleBag { values: Vec<f64> },
}

impl NoiseBelief {
    fn draw(&self, rng: &mut SimRng) -> f64 {
        match self {
            NoiseBelief::PointMass { value } => *value,
            NoiseBelief::UniformInterval { lo, hi } => {
                let u = lo + (hi - lo) * open01(rng);
                // F⁻¹(lo) would give x − 1; the interval is open there
                if u <= *lo {
                    *hi
                } else {
                    u.min(*hi)
                }
            }
            NoiseBelief::SampleBag { values } => values[rng.random_range(0..values.len())],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePosterior {
    pub species: Vec<SpeciesId>,
    pub beliefs: Vec<NoiseBelief>,
}

impl NoisePosterior {
    pub fn get(&self, species: &str) -> Option<&NoiseBelief> {
        let i = self.species.iter().position(|s| s.as_str() == species)?;
        Some(&self.beliefs[i])
    }

    /// `{"<species>": {"kind": "...", ...}, ...}`
    pub fn to_json(&self) -> serde_json::Value {
        let map: BTreeMap<&str, &NoiseBelief> = self
            .species
            .iter()
            .map(SpeciesId::as_str)
            .zip(&self.beliefs)
            .collect();
        serde_json::to_value(map).expect("noise posterior serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scm {
    model: Arc<EquilibriumModel>,
    transform: NoiseTransform,
    /// Indexed like the model's species.
    interventions: Vec<Option<f64>>,
}

pub fn build_scm(model: &EquilibriumModel, transform: NoiseTransform) -> Result<Scm> {
    let family_ok = match transform {
        NoiseTransform::PoissonInverseCdf => matches!(model.family, Family::Poisson(_)),
        _ => matches!(model.family, Family::Binomial),
    };
    if !family_ok {
        return Err(Error::FamilyMismatch {
            transform: match transform {
                NoiseTransform::BinomialInverseCdf => "BinomialInverseCdf",
                NoiseTransform::GaussianReparam => "GaussianReparam",
                NoiseTransform::PoissonInverseCdf => "PoissonInverseCdf",
            },
            family: model.family.name(),
        });
    }
    let (_, thetas) = model.mean_chain()?;
    if transform == NoiseTransform::GaussianReparam {
        for (theta_fn, theta) in model.thetas.iter().zip(&thetas) {
            let variance = f64::from(theta_fn.total) * theta * (1.0 - theta);
            if variance < 1.0 {
                return Err(Error::BoundaryTheta {
                    species: theta_fn.target.to_string(),
                    variance,
                });
            }
        }
    }
    Ok(Scm {
        model: Arc::new(model.clone()),
        transform,
        interventions: vec![None; model.thetas.len()],
    })
}

impl Scm {
    pub fn model(&self) -> &EquilibriumModel {
        &self.model
    }

    pub fn transform(&self) -> NoiseTransform {
        self.transform
    }

    pub fn species(&self) -> Vec<SpeciesId> {
        self.model.network.species.iter().map(|s| s.id.clone()).collect()
    }

    pub fn interventions(&self) -> BTreeMap<SpeciesId, f64> {
        self.model
            .network
            .species
            .iter()
            .zip(&self.interventions)
            .filter_map(|(s, v)| v.map(|v| (s.id.clone(), v)))
            .collect()
    }

    /// The do-operator: a copy whose assignment for `target` is the constant
    /// `value`. A later intervention on the same target replaces an earlier
    /// one.
    pub fn intervene(&self, target: &str, value: f64) -> Result<Scm> {
        let i = match self.model.network.resolve(target) {
            Some(NodeRef::Species(i)) => i,
            Some(NodeRef::Input(_)) => return Err(Error::InterventionOnInput(target.to_owned())),
            None => return Err(Error::UnknownSpecies(target.to_owned())),
        };
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Config(format!(
                "intervention value for `{target}` must be finite and non-negative, got {value}"
            )));
        }
        let mut out = self.clone();
        out.interventions[i] = Some(value);
        Ok(out)
    }

    /// Structural assignment of species `i` at parent values `values`.
    fn assign(&self, i: usize, values: &[f64], noise: f64) -> Result<f64> {
        let theta_fn = &self.model.thetas[i];
        let theta = theta_fn.evaluate(values)?;
        let total = theta_fn.total;
        Ok(match self.transform {
            NoiseTransform::BinomialInverseCdf => {
                f64::from(BinomialCdf::new(total, theta).quantile(noise))
            }
            NoiseTransform::GaussianReparam => {
                let t = f64::from(total);
                noise * (t * theta * (1.0 - theta)).sqrt() + theta * t
            }
            NoiseTransform::PoissonInverseCdf => {
                PoissonCdf::new(self.model.scale(i) * theta).quantile(noise) as f64
            }
        })
    }

    /// Propagates a full noise vector (species order) through the
    /// assignments in topological order.
    pub fn predict(&self, noise: &[f64]) -> Result<Vec<f64>> {
        let mut values = vec![0.0; noise.len()];
        for &i in &self.model.order {
            values[i] = match self.interventions[i] {
                Some(v) => v,
                None => self.assign(i, &values, noise[i])?,
            };
        }
        Ok(values)
    }

    fn prior_noise(&self, rng: &mut SimRng) -> Vec<f64> {
        // Drawn for every species, intervened or not, so ancestors of an
        // intervened node see the same stream as without the intervention.
        (0..self.interventions.len())
            .map(|_| {
                if self.transform.uniform_noise() {
                    open01(rng)
                } else {
                    rng.sample(StandardNormal)
                }
            })
            .collect()
    }

    /// `n` ancestral samples in species order; draw `k` uses its own stream.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        (0..n)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_from_seed(derive_seed(seed, SAMPLE_STREAM, k as u64));
                self.predict(&self.prior_noise(&mut rng))
            })
            .collect()
    }

    /// Observation keyed by species id, as a vector in species order.
    pub fn observation_vector(&self, observation: &BTreeMap<SpeciesId, f64>) -> Result<Vec<f64>> {
        for id in observation.keys() {
            if self.model.network.species_index(id.as_str()).is_none() {
                return Err(Error::UnknownSpecies(id.to_string()));
            }
        }
        let missing: Vec<String> = self
            .model
            .network
            .species
            .iter()
            .filter(|s| !observation.contains_key(&s.id))
            .map(|s| s.id.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::IncompleteObservation(missing));
        }
        Ok(self
            .model
            .network
            .species
            .iter()
            .map(|s| observation[&s.id])
            .collect())
    }

    pub fn abduct(&self, observation: &BTreeMap<SpeciesId, f64>) -> Result<NoisePosterior> {
        self.abduct_vector(&self.observation_vector(observation)?)
    }

    /// Exact noise posterior given every species' value (species order),
    /// under the factual (unintervened) assignments.
    pub fn abduct_vector(&self, x: &[f64]) -> Result<NoisePosterior> {
        let species = self.species();
        if x.len() != species.len() {
            return Err(Error::IncompleteObservation(
                species.iter().skip(x.len()).map(|s| s.to_string()).collect(),
            ));
        }
        let mut beliefs = Vec::with_capacity(x.len());
        for (i, theta_fn) in self.model.thetas.iter().enumerate() {
            let name = || theta_fn.target.to_string();
            let value = x[i];
            if !value.is_finite() {
                return Err(Error::ObservationOutOfRange {
                    species: name(),
                    value,
                });
            }
            let theta = theta_fn.evaluate(x)?;
            let total = theta_fn.total;
            let belief = match self.transform {
                NoiseTransform::GaussianReparam => {
                    let t = f64::from(total);
                    let variance = t * theta * (1.0 - theta);
                    if !(variance > 0.0) {
                        return Err(Error::BoundaryTheta {
                            species: name(),
                            variance,
                        });
                    }
                    NoiseBelief::PointMass {
                        value: (value - theta * t) / variance.sqrt(),
                    }
                }
                NoiseTransform::BinomialInverseCdf | NoiseTransform::PoissonInverseCdf => {
                    let upper = match self.transform {
                        NoiseTransform::BinomialInverseCdf => f64::from(total),
                        _ => f64::INFINITY,
                    };
                    if value < 0.0 || value > upper || value.fract() != 0.0 {
                        return Err(Error::ObservationOutOfRange {
                            species: name(),
                            value,
                        });
                    }
                    let k = value as i64;
                    let (lo, hi) = match self.transform {
                        NoiseTransform::BinomialInverseCdf => {
                            let cdf = BinomialCdf::new(total, theta);
                            (cdf.cdf(k - 1), cdf.cdf(k))
                        }
                        _ => {
                            let cdf = PoissonCdf::new(self.model.scale(i) * theta);
                            (cdf.cdf(k - 1), cdf.cdf(k))
                        }
                    };
                    if !(hi > lo) {
                        return Err(Error::ZeroMassObservation {
                            species: name(),
                            value,
                        });
                    }
                    NoiseBelief::UniformInterval { lo, hi }
                }
            };
            beliefs.push(belief);
        }
        Ok(NoisePosterior { species, beliefs })
    }

    /// Noise vector drawn from a posterior (species order).
    pub fn posterior_noise(&self, posterior: &NoisePosterior, rng: &mut SimRng) -> Vec<f64> {
        posterior.beliefs.iter().map(|b| b.draw(rng)).collect()
    }

    /// Abduction, action, prediction: `n` draws of `query` from the
    /// counterfactual distribution given `observation` and `do(target = value)`.
    pub fn counterfactual(
        &self,
        observation: &BTreeMap<SpeciesId, f64>,
        intervention: (&str, f64),
        query: &str,
        n: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let x = self.observation_vector(observation)?;
        self.counterfactual_vector(&x, intervention, query, n, seed)
    }

    pub fn counterfactual_vector(
        &self,
        x: &[f64],
        intervention: (&str, f64),
        query: &str,
        n: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let q = self.model.species_index(query)?;
        let posterior = self.abduct_vector(x)?;
        let world = self.intervene(intervention.0, intervention.1)?;
        (0..n)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_from_seed(derive_seed(seed, COUNTERFACTUAL_STREAM, k as u64));
                let noise = world.posterior_noise(&posterior, &mut rng);
                Ok(world.predict(&noise)?[q])
            })
            .collect()
    }
}

/// Rates under which `target`'s equilibrium mean equals `desired_mean`,
/// changing only the activation reaction `knob`.
///
/// With `a` the knob's regulator level, `A` the remaining activation mass and
/// `B` the deactivation mass (all at the parents' equilibrium means), the
/// knob rate is `(θ·B − (1−θ)·A) / ((1−θ)·a)` for `θ = desired_mean / T`.
pub fn soft_intervention_rates(
    network: &ReactionNetwork,
    target: &str,
    desired_mean: f64,
    knob: ReactionId,
) -> Result<RateAssignment> {
    let model = derive_equilibrium(network)?;
    let t_idx = model.species_index(target)?;
    let reaction = network
        .reactions
        .get(knob.0)
        .ok_or_else(|| Error::UnknownReaction(format!("#{}", knob.0)))?;
    if reaction.kind != ReactionKind::Activate || reaction.target.as_str() != target {
        return Err(Error::Config(format!(
            "knob `{}` is not an activation of `{target}`",
            reaction.key()
        )));
    }
    let total = f64::from(network.species[t_idx].total);
    if !(desired_mean > 0.0 && desired_mean < total) {
        return Err(Error::Infeasible(format!(
            "desired mean {desired_mean} for `{target}` is outside (0, {total})"
        )));
    }
    let means = model.mean_vector()?;
    let level = |reg: &Regulator| match reg {
        Regulator::Auto => 1.0,
        Regulator::Node(id) => match network.resolve(id.as_str()) {
            Some(NodeRef::Species(i)) => means[i],
            Some(NodeRef::Input(i)) => f64::from(network.inputs[i].value),
            None => 0.0,
        },
    };
    let mut others = 0.0;
    let mut inhibition = 0.0;
    for (idx, r) in network.reactions.iter().enumerate() {
        if idx == knob.0 || r.target.as_str() != target {
            continue;
        }
        match r.kind {
            ReactionKind::Activate => others += r.rate * level(&r.regulator),
            ReactionKind::Deactivate => inhibition += r.rate * level(&r.regulator),
        }
    }
    let a = level(&reaction.regulator);
    if a <= 0.0 {
        return Err(Error::Infeasible(format!(
            "regulator of `{}` has zero equilibrium level",
            reaction.key()
        )));
    }
    let theta = desired_mean / total;
    let rate = (theta * inhibition - (1.0 - theta) * others) / ((1.0 - theta) * a);
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Infeasible(format!(
            "mean {desired_mean} for `{target}` needs knob rate {rate}"
        )));
    }
    let mut rates = network.rates();
    rates.set(knob, rate);
    Ok(rates)
}
