//! Exact stochastic simulation (Gillespie direct method).
//!
//! At state `x` the total hazard `H(x)` sets an exponential waiting time and
//! reaction `r` fires with probability `h_r(x) / H(x)`. Every firing moves
//! one particle of the target species. Hazards are refreshed only for the
//! reactions that depend on the species that changed.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{NodeRef, RateAssignment, ReactionKind, ReactionNetwork, Regulator, SpeciesId};
use crate::rng::{open01, rng_from_seed, SimRng};

/// Time at which the builtin models are treated as equilibrated.
pub const DEFAULT_T_END: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Record {
    FullPath,
    EndStateOnly,
    GridSampled(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_end: f64,
    pub record: Record,
    pub seed: u64,
}

impl SimConfig {
    pub fn end_state(t_end: f64, seed: u64) -> Self {
        SimConfig {
            t_end,
            record: Record::EndStateOnly,
            seed,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if let Record::GridSampled(dt) = self.record {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("grid dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryMode {
    Stochastic,
    DeterministicMean,
}

/// Active counts per species (inputs excluded) over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub species: Vec<SpeciesId>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub seed: Option<u64>,
    pub mode: TrajectoryMode,
}

impl Trajectory {
    pub fn end_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one time")
    }

    pub fn column(&self, species: &str) -> Option<Vec<f64>> {
        let i = self.species.iter().position(|s| s.as_str() == species)?;
        Some(self.states.iter().map(|row| row[i]).collect())
    }
}

#[derive(Debug, Clone, Copy)]
enum Source {
    Species(usize),
    Constant(f64),
}

#[derive(Debug, Clone, Copy)]
struct Channel {
    target: usize,
    delta: i32,
    source: Source,
    rate: f64,
}

/// A network compiled to index form for repeated simulation.
#[derive(Debug, Clone)]
pub struct Simulator {
    species: Vec<SpeciesId>,
    totals: Vec<u32>,
    init: Vec<u32>,
    channels: Vec<Channel>,
    /// Channels whose hazard changes when species `i` changes.
    dependents: Vec<Vec<usize>>,
}

impl Simulator {
    pub fn new(network: &ReactionNetwork) -> Result<Self> {
        network.ensure_valid()?;
        let channels: Vec<Channel> = network
            .reactions
            .iter()
            .map(|r| {
                let target = network.species_index(r.target.as_str()).unwrap();
                let source = match &r.regulator {
                    Regulator::Auto => Source::Constant(1.0),
                    Regulator::Node(id) => match network.resolve(id.as_str()).unwrap() {
                        NodeRef::Species(i) => Source::Species(i),
                        NodeRef::Input(i) => Source::Constant(f64::from(network.inputs[i].value)),
                    },
                };
                Channel {
                    target,
                    delta: match r.kind {
                        ReactionKind::Activate => 1,
                        ReactionKind::Deactivate => -1,
                    },
                    source,
                    rate: r.rate,
                }
            })
            .collect();
        let mut dependents = vec![Vec::new(); network.species.len()];
        for (c, ch) in channels.iter().enumerate() {
            dependents[ch.target].push(c);
            if let Source::Species(s) = ch.source {
                if s != ch.target {
                    dependents[s].push(c);
                }
            }
        }
        Ok(Simulator {
            species: network.species.iter().map(|s| s.id.clone()).collect(),
            totals: network.species.iter().map(|s| s.total).collect(),
            init: network.init_state(),
            channels,
            dependents,
        })
    }

    /// Same structure with different rates.
    pub fn with_rates(&self, rates: &RateAssignment) -> Result<Self> {
        if rates.len() != self.channels.len() {
            return Err(Error::RateSetMismatch {
                left: rates.len(),
                right: rates.len(),
                expected: self.channels.len(),
            });
        }
        if let Some(bad) = rates.as_slice().iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::Config(format!("rates must be positive, got {bad}")));
        }
        let mut out = self.clone();
        for (ch, &rate) in out.channels.iter_mut().zip(rates.as_slice()) {
            ch.rate = rate;
        }
        Ok(out)
    }

    fn hazard(&self, c: usize, state: &[u32]) -> f64 {
        let ch = &self.channels[c];
        let level = match ch.source {
            Source::Species(s) => f64::from(state[s]),
            Source::Constant(v) => v,
        };
        let x = state[ch.target];
        let occupied = if ch.delta > 0 {
            self.totals[ch.target] - x
        } else {
            x
        };
        ch.rate * level * f64::from(occupied)
    }

    /// Runs the jump process from the initial state, calling `on_event`
    /// after every firing with the new time and state.
    fn run_with<F: FnMut(f64, &[u32])>(&self, t_end: f64, rng: &mut SimRng, mut on_event: F) -> Vec<u32> {
        let mut state = self.init.clone();
        let mut hazards: Vec<f64> = (0..self.channels.len()).map(|c| self.hazard(c, &state)).collect();
        let mut t = 0.0;
        loop {
            let total: f64 = hazards.iter().sum();
            if total <= 0.0 {
                // absorbing
                break;
            }
            let tau = -open01(rng).ln() / total;
            if t + tau > t_end {
                break;
            }
            t += tau;
            let pick = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (c, &h) in hazards.iter().enumerate() {
                if h > 0.0 {
                    chosen = Some(c);
                    acc += h;
                    if pick < acc {
                        break;
                    }
                }
            }
            let ch = self.channels[chosen.expect("positive total hazard")];
            state[ch.target] = state[ch.target].wrapping_add_signed(ch.delta);
            for &d in &self.dependents[ch.target] {
                hazards[d] = self.hazard(d, &state);
            }
            on_event(t, &state);
        }
        state
    }

    pub fn end_state(&self, t_end: f64, seed: u64) -> Vec<u32> {
        let mut rng = rng_from_seed(seed);
        self.run_with(t_end, &mut rng, |_, _| {})
    }

    pub fn run(&self, config: &SimConfig) -> Result<Trajectory> {
        config.check()?;
        let mut rng = rng_from_seed(config.seed);
        let as_row = |s: &[u32]| s.iter().map(|&v| f64::from(v)).collect::<Vec<f64>>();
        let mut times = vec![0.0];
        let mut states = vec![as_row(&self.init)];
        let t_end = config.t_end;
        match config.record {
            Record::EndStateOnly => {
                let end = self.run_with(t_end, &mut rng, |_, _| {});
                times.push(t_end);
                states.push(as_row(&end));
            }
            Record::FullPath => {
                let end = self.run_with(t_end, &mut rng, |t, s| {
                    times.push(t);
                    states.push(as_row(s));
                });
                if *times.last().unwrap() < t_end {
                    times.push(t_end);
                    states.push(as_row(&end));
                }
            }
            Record::GridSampled(dt) => {
                let n_points = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
                let mut current = as_row(&self.init);
                let mut next_k = 1usize;
                let end = self.run_with(t_end, &mut rng, |t, s| {
                    while next_k <= n_points && (next_k as f64) * dt < t {
                        times.push(next_k as f64 * dt);
                        states.push(current.clone());
                        next_k += 1;
                    }
                    current = as_row(s);
                });
                let end = as_row(&end);
                while next_k <= n_points {
                    times.push(next_k as f64 * dt);
                    states.push(end.clone());
                    next_k += 1;
                }
            }
        }
        Ok(Trajectory {
            species: self.species.clone(),
            times,
            states,
            seed: Some(config.seed),
            mode: TrajectoryMode::Stochastic,
        })
    }

    pub fn species(&self) -> &[SpeciesId] {
        &self.species
    }

    /// End states for each seed, in seed order.
    pub fn end_states(&self, t_end: f64, seeds: &[u64]) -> Vec<Vec<u32>> {
        seeds.par_iter().map(|&s| self.end_state(t_end, s)).collect()
    }
}

pub fn simulate_ssa(network: &ReactionNetwork, config: &SimConfig) -> Result<Trajectory> {
    Simulator::new(network)?.run(config)
}

/// Two runs from the same seed under two rate sets. The generators are
/// distinct instances initialised identically; events are not aligned.
pub fn simulate_coupled_pair(
    network: &ReactionNetwork,
    rates_a: &RateAssignment,
    rates_b: &RateAssignment,
    config: &SimConfig,
) -> Result<(Trajectory, Trajectory)> {
    check_rate_pair(network, rates_a, rates_b)?;
    let base = Simulator::new(network)?;
    let a = base.with_rates(rates_a)?.run(config)?;
    let b = base.with_rates(rates_b)?.run(config)?;
    Ok((a, b))
}

pub(crate) fn check_rate_pair(
    network: &ReactionNetwork,
    rates_a: &RateAssignment,
    rates_b: &RateAssignment,
) -> Result<()> {
    let expected = network.reactions.len();
    if rates_a.len() != expected || rates_b.len() != expected {
        return Err(Error::RateSetMismatch {
            left: rates_a.len(),
            right: rates_b.len(),
            expected,
        });
    }
    Ok(())
}
