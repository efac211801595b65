//! Closed-form equilibrium of a validated network.
//!
//! At equilibrium each species is `Binomial(T_i, θ_i(parents))` with
//!
//! ```text
//! θ_i = Σ_a v_a·pa_a / (Σ_a v_a·pa_a + Σ_b v_b·pa_b)
//! ```
//!
//! over activator terms `a` and deactivator terms `b` (auto-deactivation has
//! `pa_b = 1`). The mean ODE and the plug-in mean chain live here as well.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{NodeRef, RateAssignment, ReactionKind, ReactionNetwork, Regulator, SpeciesId};
use crate::ssa::{Trajectory, TrajectoryMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaParent {
    Species { id: SpeciesId, index: usize },
    Input { id: SpeciesId, value: f64 },
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTerm {
    pub rate: f64,
    pub parent: ThetaParent,
}

impl ThetaTerm {
    /// `rate * parent level`, reading species levels from `values`.
    pub fn mass(&self, values: &[f64]) -> f64 {
        let level = match &self.parent {
            ThetaParent::Species { index, .. } => values[*index],
            ThetaParent::Input { value, .. } => *value,
            ThetaParent::Constant => 1.0,
        };
        self.rate * level
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFunction {
    pub target: SpeciesId,
    pub index: usize,
    pub total: u32,
    pub activator_terms: Vec<ThetaTerm>,
    pub inhibitor_terms: Vec<ThetaTerm>,
}

impl ThetaFunction {
    /// Total activation and deactivation mass at the given species levels.
    pub fn masses(&self, values: &[f64]) -> (f64, f64) {
        let a = self.activator_terms.iter().map(|t| t.mass(values)).sum();
        let b = self.inhibitor_terms.iter().map(|t| t.mass(values)).sum();
        (a, b)
    }

    pub fn evaluate(&self, values: &[f64]) -> Result<f64> {
        let (a, b) = self.masses(values);
        let denom = a + b;
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(Error::DegenerateTheta {
                species: self.target.to_string(),
            });
        }
        Ok(a / denom)
    }

    /// Species and inputs appearing in any term.
    pub fn parents(&self) -> BTreeSet<&SpeciesId> {
        self.activator_terms
            .iter()
            .chain(&self.inhibitor_terms)
            .filter_map(|t| match &t.parent {
                ThetaParent::Species { id, .. } | ThetaParent::Input { id, .. } => Some(id),
                ThetaParent::Constant => None,
            })
            .collect()
    }

    /// Upper bound of `a + b` over the reachable state space.
    fn max_rate(&self, totals: &[u32]) -> f64 {
        let full: Vec<f64> = totals.iter().map(|&t| f64::from(t)).collect();
        let (a, b) = self.masses(&full);
        a + b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Binomial,
    /// Per-species Poisson scale `λ_i`; the count is `Poisson(λ_i·θ_i)`.
    Poisson(Vec<f64>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Binomial => "Binomial",
            Family::Poisson(_) => "Poisson",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumModel {
    pub network: ReactionNetwork,
    /// Species indices in topological order.
    pub order: Vec<usize>,
    /// Indexed like `network.species`.
    pub thetas: Vec<ThetaFunction>,
    pub family: Family,
}

impl EquilibriumModel {
    pub fn species_index(&self, id: &str) -> Result<usize> {
        self.network
            .species_index(id)
            .ok_or_else(|| Error::UnknownSpecies(id.to_owned()))
    }

    pub fn theta(&self, id: &str) -> Result<&ThetaFunction> {
        Ok(&self.thetas[self.species_index(id)?])
    }

    pub fn totals(&self) -> Vec<u32> {
        self.network.species.iter().map(|s| s.total).collect()
    }

    /// Poisson family with `λ_i = T_i`, so means match the Binomial family.
    pub fn poisson(mut self) -> Self {
        let lambdas = self.network.species.iter().map(|s| f64::from(s.total)).collect();
        self.family = Family::Poisson(lambdas);
        self
    }

    pub fn with_family(mut self, family: Family) -> Result<Self> {
        if let Family::Poisson(l) = &family {
            if l.len() != self.thetas.len() {
                return Err(Error::Config(format!(
                    "{} Poisson scales for {} species",
                    l.len(),
                    self.thetas.len()
                )));
            }
            if let Some(bad) = l.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::Config(format!("Poisson scale must be positive, got {bad}")));
            }
        }
        self.family = family;
        Ok(self)
    }

    /// Mean scale of species `i`: `T_i` for Binomial, `λ_i` for Poisson.
    pub fn scale(&self, i: usize) -> f64 {
        match &self.family {
            Family::Binomial => f64::from(self.thetas[i].total),
            Family::Poisson(l) => l[i],
        }
    }

    /// Plug-in mean chain and the θ values it passes through, both in
    /// species order.
    pub fn mean_chain(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.thetas.len();
        let mut means = vec![0.0; n];
        let mut thetas = vec![0.0; n];
        for &i in &self.order {
            let theta = self.thetas[i].evaluate(&means)?;
            thetas[i] = theta;
            means[i] = self.scale(i) * theta;
        }
        Ok((means, thetas))
    }

    pub fn mean_vector(&self) -> Result<Vec<f64>> {
        Ok(self.mean_chain()?.0)
    }
}

pub fn derive_equilibrium(network: &ReactionNetwork) -> Result<EquilibriumModel> {
    network.ensure_valid()?;
    let dag = network.regulation_dag()?;
    let order = dag
        .order
        .iter()
        .filter_map(|id| network.species_index(id.as_str()))
        .collect();
    let mut thetas: Vec<ThetaFunction> = network
        .species
        .iter()
        .enumerate()
        .map(|(index, s)| ThetaFunction {
            target: s.id.clone(),
            index,
            total: s.total,
            activator_terms: Vec::new(),
            inhibitor_terms: Vec::new(),
        })
        .collect();
    for r in &network.reactions {
        let parent = match &r.regulator {
            Regulator::Auto => ThetaParent::Constant,
            Regulator::Node(id) => match network.resolve(id.as_str()) {
                Some(NodeRef::Species(index)) => ThetaParent::Species {
                    id: id.clone(),
                    index,
                },
                Some(NodeRef::Input(i)) => ThetaParent::Input {
                    id: id.clone(),
                    value: f64::from(network.inputs[i].value),
                },
                None => return Err(Error::UnknownSpecies(id.to_string())),
            },
        };
        let term = ThetaTerm {
            rate: r.rate,
            parent,
        };
        let theta = &mut thetas[network.species_index(r.target.as_str()).unwrap()];
        match r.kind {
            ReactionKind::Activate => theta.activator_terms.push(term),
            ReactionKind::Deactivate => theta.inhibitor_terms.push(term),
        }
    }
    Ok(EquilibriumModel {
        network: network.clone(),
        order,
        thetas,
        family: Family::Binomial,
    })
}

pub fn equilibrium_means(model: &EquilibriumModel) -> Result<BTreeMap<SpeciesId, f64>> {
    let means = model.mean_vector()?;
    Ok(model
        .network
        .species
        .iter()
        .map(|s| s.id.clone())
        .zip(means)
        .collect())
}

/// Mean chain of `network` with its rates replaced by `rates`.
pub fn mean_chain_under(network: &ReactionNetwork, rates: &RateAssignment) -> Result<Vec<f64>> {
    derive_equilibrium(&network.with_rates(rates)?)?.mean_vector()
}

/// Largest RK4 step accepted for `network`.
pub fn max_stable_step(model: &EquilibriumModel) -> f64 {
    let totals = model.totals();
    let rate = model
        .thetas
        .iter()
        .map(|t| t.max_rate(&totals))
        .fold(0.0, f64::max);
    if rate > 0.0 {
        1.0 / rate
    } else {
        f64::INFINITY
    }
}

/// Mean ODE from the network's initial state.
pub fn mean_trajectory(network: &ReactionNetwork, t_end: f64, dt: f64) -> Result<Trajectory> {
    let init: Vec<f64> = network.init_state().iter().map(|&v| f64::from(v)).collect();
    mean_trajectory_from(network, &init, t_end, dt)
}

/// Fixed-step RK4 on
/// `dE_i/dt = Σ_a v_a·E(pa_a)·(T_i − E_i) − Σ_b v_b·E(pa_b)·E_i`,
/// recording every step.
pub fn mean_trajectory_from(
    network: &ReactionNetwork,
    init: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let model = derive_equilibrium(network)?;
    if init.len() != model.thetas.len() {
        return Err(Error::Config(format!(
            "initial state has {} values for {} species",
            init.len(),
            model.thetas.len()
        )));
    }
    let limit = max_stable_step(&model);
    if dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }

    let totals: Vec<f64> = model.totals().iter().map(|&t| f64::from(t)).collect();
    let rhs = |e: &[f64], out: &mut [f64]| {
        for (i, theta) in model.thetas.iter().enumerate() {
            let (a, b) = theta.masses(e);
            out[i] = a * (totals[i] - e[i]) - b * e[i];
        }
    };

    let n = init.len();
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut e = init.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    times.push(0.0);
    states.push(e.clone());
    for step in 1..=steps {
        let t0 = (step - 1) as f64 * dt;
        let t1 = if step == steps { t_end } else { step as f64 * dt };
        let h = t1 - t0;
        rhs(&e, &mut k1);
        for i in 0..n {
            tmp[i] = e[i] + 0.5 * h * k1[i];
        }
        rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = e[i] + 0.5 * h * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = e[i] + h * k3[i];
        }
        rhs(&tmp, &mut k4);
        for i in 0..n {
            e[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push(t1);
        states.push(e.clone());
    }
    Ok(Trajectory {
        species: network.species.iter().map(|s| s.id.clone()).collect(),
        times,
        states,
        seed: None,
        mode: TrajectoryMode::DeterministicMean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::network::{InputSignal, Reaction, ReactionId, Species};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn mapk_exp1_thetas_and_means() {
        let m = derive_equilibrium(&builtin::load("mapk-exp1").unwrap()).unwrap();
        let (means, thetas) = m.mean_chain().unwrap();
        // θ_K3 = 0.1/(0.1+0.1); θ_K2 = 5/(5+2); θ_K = 7.143/(7.143+1)
        assert!(close(thetas[0], 0.5, 1e-12));
        assert!(close(thetas[1], 5.0 / 7.0, 1e-12));
        let k2 = 500.0 / 7.0;
        assert!(close(thetas[2], 0.1 * k2 / (0.1 * k2 + 1.0), 1e-12));
        assert!(close(means[0], 50.0, 0.01));
        assert!(close(means[1], 71.43, 0.01));
        assert!(close(means[2], 87.72, 0.01));
    }

    #[test]
    fn mapk_exp1_slowed_root() {
        let n = builtin::load("mapk-exp1").unwrap();
        let rates = n.rates().scaled(ReactionId(0), 1.0 / 3.0);
        let means = mean_chain_under(&n, &rates).unwrap();
        assert!(close(means[0], 25.0, 0.01));
        assert!(close(means[1], 55.56, 0.01));
        assert!(close(means[2], 84.75, 0.01));
    }

    #[test]
    fn igf_sos_theta() {
        let m = derive_equilibrium(&builtin::load("igf").unwrap()).unwrap();
        let (means, thetas) = m.mean_chain().unwrap();
        let sos = m.species_index("SOS").unwrap();
        assert!(close(thetas[sos], 0.42 / 0.92, 1e-12));
        assert!(close(means[sos], 45.65, 0.01));
        let raf = m.theta("Raf").unwrap();
        assert_eq!(raf.activator_terms.len(), 2);
        assert_eq!(raf.inhibitor_terms.len(), 2);
    }

    #[test]
    fn symmetric_motivating_example() {
        let mut n = ReactionNetwork::new("sym");
        n.inputs.push(InputSignal::new("U", 1));
        n.species = vec![Species::new("X1", 100, 0), Species::new("X2", 100, 0), Species::new("Y", 100, 0)];
        n.reactions = vec![
            Reaction::activate("X1", "U", 0.05),
            Reaction::auto_deactivate("X1", 0.05),
            Reaction::activate("X2", "U", 0.05),
            Reaction::auto_deactivate("X2", 0.05),
            Reaction::activate("Y", "X1", 0.01),
            Reaction::deactivate("Y", "X2", 0.01),
        ];
        let (_, thetas) = derive_equilibrium(&n).unwrap().mean_chain().unwrap();
        assert!(close(thetas[2], 0.5, 1e-15));
    }

    #[test]
    fn silent_activator_gives_zero_mean() {
        let mut n = builtin::load("mapk-exp1").unwrap();
        n.inputs[0].value = 0;
        let means = derive_equilibrium(&n).unwrap().mean_vector().unwrap();
        assert_eq!(means, vec![0.0; 3]);
    }

    #[test]
    fn degenerate_theta_reported() {
        let mut n = builtin::load("toy").unwrap();
        n.inputs[0].value = 0;
        let m = derive_equilibrium(&n).unwrap();
        // Y: activator X1 is silent, inhibitor X2 at zero
        let y = m.theta("Y").unwrap();
        assert!(matches!(y.evaluate(&[0.0, 0.0, 0.0]), Err(Error::DegenerateTheta { .. })));
    }

    #[test]
    fn parents_match_dag() {
        for name in builtin::NAMES {
            let n = builtin::load(name).unwrap();
            let dag = n.regulation_dag().unwrap();
            let m = derive_equilibrium(&n).unwrap();
            for t in &m.thetas {
                assert_eq!(t.parents(), dag.parents(t.target.as_str()), "{name} {}", t.target);
            }
        }
    }

    #[test]
    fn rk4_root_matches_closed_form() {
        let n = builtin::load("mapk-exp1").unwrap();
        let tr = mean_trajectory(&n, 100.0, 0.01).unwrap();
        // E(t) = Tθ + (x0 − Tθ)·exp(−(v_act·E1 + v_inh)·t)
        let k = 0.1 * 1.0 + 0.1;
        let max_err = tr
            .times
            .iter()
            .zip(&tr.states)
            .map(|(t, row)| (row[0] - 50.0 * (1.0 - (-k * t).exp())).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-6, "{max_err}");
        assert_eq!(tr.times.len(), 10_001);
        assert_eq!(tr.end_time(), 100.0);
    }

    #[test]
    fn ode_reaches_mean_chain() {
        // the toy roots relax at 0.1/s and need longer than 100 s
        for (name, t_end) in [("mapk-exp1", 100.0), ("mapk-exp2", 100.0), ("mapk-exp3", 100.0), ("igf", 100.0), ("toy", 300.0)] {
            let n = builtin::load(name).unwrap();
            let chain = derive_equilibrium(&n).unwrap().mean_vector().unwrap();
            let tr = mean_trajectory(&n, t_end, 0.01).unwrap();
            for (i, (a, b)) in tr.end_state().iter().zip(&chain).enumerate() {
                assert!(close(*a, *b, 1e-3), "{name} species {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fixed_point_is_constant() {
        let n = builtin::load("igf").unwrap();
        let chain = derive_equilibrium(&n).unwrap().mean_vector().unwrap();
        let tr = mean_trajectory_from(&n, &chain, 10.0, 0.05).unwrap();
        for row in &tr.states {
            for (a, b) in row.iter().zip(&chain) {
                assert!(close(*a, *b, 1e-9));
            }
        }
    }

    #[test]
    fn step_guard() {
        let n = builtin::load("mapk-exp1").unwrap();
        let m = derive_equilibrium(&n).unwrap();
        // K2: 0.1·100 + 2.0
        assert!(close(max_stable_step(&m), 1.0 / 12.0, 1e-12));
        assert!(matches!(mean_trajectory(&n, 10.0, 0.1), Err(Error::StepTooLarge { .. })));
        assert!(mean_trajectory(&n, 10.0, 0.08).is_ok());
    }

    #[test]
    fn poisson_family_keeps_means_with_default_scale() {
        let m = derive_equilibrium(&builtin::load("mapk-exp1").unwrap()).unwrap();
        let a = m.mean_vector().unwrap();
        let b = m.clone().poisson().mean_vector().unwrap();
        assert_eq!(a, b);
        assert!(m.clone().with_family(Family::Poisson(vec![1.0])).is_err());
        let scaled = m.with_family(Family::Poisson(vec![200.0, 100.0, 100.0])).unwrap();
        assert!(close(scaled.mean_vector().unwrap()[0], 100.0, 1e-9));
    }

    proptest! {
        #[test]
        fn theta_monotone_in_parents(
            x in proptest::collection::vec(0.01f64..100.0, 7),
            which in 0usize..7,
            bump in 0.01f64..50.0,
        ) {
            let m = derive_equilibrium(&builtin::load("igf").unwrap()).unwrap();
            for theta in &m.thetas {
                let base = theta.evaluate(&x).unwrap();
                let mut up = x.clone();
                up[which] += bump;
                let moved = theta.evaluate(&up).unwrap();
                let act = theta.activator_terms.iter().any(|t| matches!(t.parent, ThetaParent::Species { index, .. } if index == which));
                let inh = theta.inhibitor_terms.iter().any(|t| matches!(t.parent, ThetaParent::Species { index, .. } if index == which));
                prop_assert!(base > 0.0 && base < 1.0);
                match (act, inh) {
                    (true, false) => prop_assert!(moved > base),
                    (false, true) => prop_assert!(moved < base),
                    (false, false) => prop_assert_eq!(moved, base),
                    (true, true) => {}
                }
            }
        }
    }
}
