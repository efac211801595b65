//! Reaction-network domain types, structural validation, the regulation DAG
//! and mass-action hazard terms.
//!
//! A network is a set of two-state species (each a place invariant with a
//! fixed `total`), constant input signals, and first-order activation and
//! deactivation reactions. Every reaction moves one particle of its target
//! between the inactive and active pools.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeciesId(String);

impl SpeciesId {
    pub fn new(name: impl Into<String>) -> Self {
        SpeciesId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpeciesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SpeciesId {
    fn from(s: &str) -> Self {
        SpeciesId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Species {
    pub id: SpeciesId,
    pub total: u32,
    pub init_active: u32,
}

impl Species {
    pub fn new(id: impl Into<String>, total: u32, init_active: u32) -> Self {
        Species {
            id: SpeciesId::new(id),
            total,
            init_active,
        }
    }
}

/// A constant particle count that regulates species but is never a target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSignal {
    pub id: SpeciesId,
    pub value: u32,
}

impl InputSignal {
    pub fn new(id: impl Into<String>, value: u32) -> Self {
        InputSignal {
            id: SpeciesId::new(id),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReactionKind {
    Activate,
    Deactivate,
}

impl ReactionKind {
    /// Change applied to the target's active count.
    pub fn stoichiometry(self) -> i32 {
        match self {
            ReactionKind::Activate => 1,
            ReactionKind::Deactivate => -1,
        }
    }
}

/// `Auto` sorts before every named regulator, which fixes the canonical
/// reaction order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regulator {
    Auto,
    Node(SpeciesId),
}

impl Regulator {
    pub fn node(name: impl Into<String>) -> Self {
        Regulator::Node(SpeciesId::new(name))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub kind: ReactionKind,
    pub target: SpeciesId,
    pub regulator: Regulator,
    /// Per-particle, per-second rate constant.
    pub rate: f64,
}

impl Reaction {
    pub fn activate(target: &str, regulator: &str, rate: f64) -> Self {
        Reaction {
            kind: ReactionKind::Activate,
            target: target.into(),
            regulator: Regulator::node(regulator),
            rate,
        }
    }

    pub fn deactivate(target: &str, regulator: &str, rate: f64) -> Self {
        Reaction {
            kind: ReactionKind::Deactivate,
            target: target.into(),
            regulator: Regulator::node(regulator),
            rate,
        }
    }

    pub fn auto_deactivate(target: &str, rate: f64) -> Self {
        Reaction {
            kind: ReactionKind::Deactivate,
            target: target.into(),
            regulator: Regulator::Auto,
            rate,
        }
    }

    /// Short textual handle: `act:<target>:<regulator>` or
    /// `deact:<target>:<regulator|auto>`.
    pub fn key(&self) -> String {
        let kind = match self.kind {
            ReactionKind::Activate => "act",
            ReactionKind::Deactivate => "deact",
        };
        let regulator = match &self.regulator {
            Regulator::Auto => "auto",
            Regulator::Node(id) => id.as_str(),
        };
        format!("{kind}:{}:{regulator}", self.target)
    }

    fn sort_key(&self) -> (&SpeciesId, ReactionKind, &Regulator) {
        (&self.target, self.kind, &self.regulator)
    }
}

/// Index of a reaction in its network's `reactions` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReactionId(pub usize);

/// One rate per reaction, aligned with a network's reaction order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateAssignment(Vec<f64>);

impl RateAssignment {
    pub fn new(rates: Vec<f64>) -> Self {
        RateAssignment(rates)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, id: ReactionId) -> f64 {
        self.0[id.0]
    }

    pub fn set(&mut self, id: ReactionId, rate: f64) {
        self.0[id.0] = rate;
    }

    pub fn scaled(&self, id: ReactionId, factor: f64) -> Self {
        let mut out = self.clone();
        out.0[id.0] *= factor;
        out
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Resolved reference to a node of the regulation graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Species(usize),
    Input(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    pub name: String,
    pub species: Vec<Species>,
    pub inputs: Vec<InputSignal>,
    pub reactions: Vec<Reaction>,
}

impl ReactionNetwork {
    pub fn new(name: impl Into<String>) -> Self {
        ReactionNetwork {
            name: name.into(),
            species: Vec::new(),
            inputs: Vec::new(),
            reactions: Vec::new(),
        }
    }

    pub fn species_index(&self, id: &str) -> Option<usize> {
        self.species.iter().position(|s| s.id.as_str() == id)
    }

    pub fn input_index(&self, id: &str) -> Option<usize> {
        self.inputs.iter().position(|s| s.id.as_str() == id)
    }

    pub fn resolve(&self, id: &str) -> Option<NodeRef> {
        self.species_index(id)
            .map(NodeRef::Species)
            .or_else(|| self.input_index(id).map(NodeRef::Input))
    }

    pub fn species_ids(&self) -> impl Iterator<Item = &SpeciesId> {
        self.species.iter().map(|s| &s.id)
    }

    pub fn init_state(&self) -> Vec<u32> {
        self.species.iter().map(|s| s.init_active).collect()
    }

    pub fn rates(&self) -> RateAssignment {
        RateAssignment(self.reactions.iter().map(|r| r.rate).collect())
    }

    /// Copy of the network with every reaction rate replaced.
    pub fn with_rates(&self, rates: &RateAssignment) -> Result<ReactionNetwork> {
        if rates.len() != self.reactions.len() {
            return Err(Error::RateSetMismatch {
                left: rates.len(),
                right: rates.len(),
                expected: self.reactions.len(),
            });
        }
        let mut out = self.clone();
        for (reaction, &rate) in out.reactions.iter_mut().zip(rates.as_slice()) {
            reaction.rate = rate;
        }
        Ok(out)
    }

    /// Look up a reaction by its [`Reaction::key`].
    pub fn find_reaction(&self, key: &str) -> Result<ReactionId> {
        self.reactions
            .iter()
            .position(|r| r.key() == key)
            .map(ReactionId)
            .ok_or_else(|| Error::UnknownReaction(key.to_owned()))
    }

    /// Same network with reactions sorted by (target, kind, regulator).
    pub fn canonical(&self) -> ReactionNetwork {
        let mut out = self.clone();
        out.reactions
            .sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();

        let mut seen = HashSet::new();
        for id in self
            .species
            .iter()
            .map(|s| &s.id)
            .chain(self.inputs.iter().map(|i| &i.id))
        {
            if id.as_str().is_empty() {
                issues.push(ValidationIssue::EmptyId);
            } else if !seen.insert(id.as_str()) {
                issues.push(ValidationIssue::DuplicateId { id: id.to_string() });
            }
        }

        for s in &self.species {
            if s.total == 0 {
                issues.push(ValidationIssue::ZeroTotal {
                    species: s.id.to_string(),
                });
            }
            if s.init_active > s.total {
                issues.push(ValidationIssue::InitOutOfRange {
                    species: s.id.to_string(),
                    init: s.init_active,
                    total: s.total,
                });
            }
        }

        let mut keys = HashSet::new();
        let mut has_act = HashSet::new();
        let mut has_deact = HashSet::new();
        for (index, r) in self.reactions.iter().enumerate() {
            match self.resolve(r.target.as_str()) {
                None => issues.push(ValidationIssue::DanglingReference {
                    reaction: index,
                    id: r.target.to_string(),
                }),
                Some(NodeRef::Input(_)) => issues.push(ValidationIssue::TargetIsInput {
                    reaction: index,
                    id: r.target.to_string(),
                }),
                Some(NodeRef::Species(_)) => {}
            }
            match &r.regulator {
                Regulator::Auto => {
                    if r.kind == ReactionKind::Activate {
                        issues.push(ValidationIssue::AutoActivation { reaction: index });
                    }
                }
                Regulator::Node(id) => {
                    if self.resolve(id.as_str()).is_none() {
                        issues.push(ValidationIssue::DanglingReference {
                            reaction: index,
                            id: id.to_string(),
                        });
                    }
                    if *id == r.target {
                        issues.push(ValidationIssue::HazardOrderTooHigh { reaction: index });
                    }
                }
            }
            if !(r.rate > 0.0 && r.rate.is_finite()) {
                issues.push(ValidationIssue::NonPositiveRate {
                    reaction: index,
                    rate: r.rate,
                });
            }
            if !keys.insert(r.sort_key()) {
                issues.push(ValidationIssue::DuplicateReaction { reaction: index });
            }
            match r.kind {
                ReactionKind::Activate => has_act.insert(r.target.as_str()),
                ReactionKind::Deactivate => has_deact.insert(r.target.as_str()),
            };
        }

        for s in &self.species {
            if !has_act.contains(s.id.as_str()) {
                issues.push(ValidationIssue::MissingActivation {
                    species: s.id.to_string(),
                });
            }
            if !has_deact.contains(s.id.as_str()) {
                issues.push(ValidationIssue::MissingDeactivation {
                    species: s.id.to_string(),
                });
            }
        }

        if let Err(Error::Cycle(nodes)) = self.topological_order() {
            issues.push(ValidationIssue::CycleDetected { nodes });
        }

        ValidationReport { issues }
    }

    /// Node names and edges of the regulation graph, dangling edges dropped.
    fn graph(&self) -> (BTreeSet<SpeciesId>, BTreeSet<(SpeciesId, SpeciesId)>) {
        let nodes: BTreeSet<SpeciesId> = self
            .inputs
            .iter()
            .map(|i| i.id.clone())
            .chain(self.species.iter().map(|s| s.id.clone()))
            .collect();
        let edges = self
            .reactions
            .iter()
            .filter_map(|r| match &r.regulator {
                Regulator::Node(reg) if nodes.contains(reg) && nodes.contains(&r.target) => {
                    Some((reg.clone(), r.target.clone()))
                }
                _ => None,
            })
            .collect();
        (nodes, edges)
    }

    /// Kahn's algorithm; among ready nodes the lexicographically smallest
    /// name goes first.
    fn topological_order(&self) -> Result<Vec<SpeciesId>> {
        let (nodes, edges) = self.graph();
        let mut indegree: BTreeMap<&SpeciesId, usize> = nodes.iter().map(|n| (n, 0)).collect();
        let mut children: BTreeMap<&SpeciesId, Vec<&SpeciesId>> = BTreeMap::new();
        for (from, to) in &edges {
            *indegree.get_mut(to).unwrap() += 1;
            children.entry(from).or_default().push(to);
        }
        let mut ready: BTreeSet<&SpeciesId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&n, _)| n)
            .collect();
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(next) = ready.pop_first() {
            order.push(next.clone());
            for child in children.get(next).into_iter().flatten() {
                let d = indegree.get_mut(child).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(child);
                }
            }
        }
        if order.len() == nodes.len() {
            return Ok(order);
        }

        // Walk from the smallest stuck node along stuck successors until a
        // node repeats; the repeated segment is a cycle.
        let stuck: BTreeSet<&SpeciesId> = indegree
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&n, _)| n)
            .collect();
        let mut path: Vec<&SpeciesId> = Vec::new();
        let mut current = *stuck.first().unwrap();
        loop {
            if let Some(pos) = path.iter().position(|n| *n == current) {
                return Err(Error::Cycle(
                    path[pos..].iter().map(|n| n.to_string()).collect(),
                ));
            }
            path.push(current);
            // Every stuck node has a stuck predecessor; walk predecessors.
            current = edges
                .iter()
                .find(|(from, to)| to == current && stuck.contains(from))
                .map(|(from, _)| from)
                .unwrap();
            if path.len() > nodes.len() + 1 {
                unreachable!("cycle walk exceeded node count");
            }
        }
    }

    pub fn regulation_dag(&self) -> Result<Dag> {
        let order = self.topological_order().map_err(|e| match e {
            Error::Cycle(mut nodes) => {
                // reported along edge direction
                nodes.reverse();
                Error::Cycle(nodes)
            }
            other => other,
        })?;
        let (nodes, edges) = self.graph();
        let mut activators: BTreeMap<SpeciesId, BTreeSet<SpeciesId>> = BTreeMap::new();
        let mut inhibitors: BTreeMap<SpeciesId, BTreeSet<SpeciesId>> = BTreeMap::new();
        for r in &self.reactions {
            if let Regulator::Node(reg) = &r.regulator {
                let side = match r.kind {
                    ReactionKind::Activate => &mut activators,
                    ReactionKind::Deactivate => &mut inhibitors,
                };
                side.entry(r.target.clone()).or_default().insert(reg.clone());
            }
        }
        Ok(Dag {
            nodes: nodes.into_iter().collect(),
            edges,
            activators,
            inhibitors,
            order,
        })
    }

    /// Activation and deactivation hazard terms acting on `target`.
    pub fn hazards_for(&self, target: &str) -> Result<(Vec<HazardTerm>, Vec<HazardTerm>)> {
        if self.species_index(target).is_none() {
            return Err(Error::UnknownSpecies(target.to_owned()));
        }
        let mut activation = Vec::new();
        let mut deactivation = Vec::new();
        for r in self.reactions.iter().filter(|r| r.target.as_str() == target) {
            let regulator = match &r.regulator {
                Regulator::Auto => RegulatorFactor::Constant,
                Regulator::Node(id) => match self.resolve(id.as_str()) {
                    Some(NodeRef::Input(_)) => RegulatorFactor::Input(id.clone()),
                    Some(NodeRef::Species(_)) => RegulatorFactor::Species(id.clone()),
                    None => return Err(Error::UnknownSpecies(id.to_string())),
                },
            };
            match r.kind {
                ReactionKind::Activate => activation.push(HazardTerm {
                    coefficient: r.rate,
                    regulator_factor: regulator.clone(),
                    occupancy: Occupancy::VacantSites,
                }),
                ReactionKind::Deactivate => deactivation.push(HazardTerm {
                    coefficient: r.rate,
                    regulator_factor: regulator.clone(),
                    occupancy: Occupancy::ActiveSites,
                }),
            }
        }
        Ok((activation, deactivation))
    }

    /// Current level of a regulator given active species counts.
    pub fn regulator_level(&self, factor: &RegulatorFactor, state: &[u32]) -> f64 {
        match factor {
            RegulatorFactor::Constant => 1.0,
            RegulatorFactor::Species(id) => self
                .species_index(id.as_str())
                .map_or(0.0, |i| f64::from(state[i])),
            RegulatorFactor::Input(id) => self
                .input_index(id.as_str())
                .map_or(0.0, |i| f64::from(self.inputs[i].value)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegulatorFactor {
    Species(SpeciesId),
    Input(SpeciesId),
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Occupancy {
    /// `T - X`: inactive particles available for activation.
    VacantSites,
    /// `X`: active particles available for deactivation.
    ActiveSites,
}

/// `coefficient * regulator * occupancy`, first order in each state variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardTerm {
    pub coefficient: f64,
    pub regulator_factor: RegulatorFactor,
    pub occupancy: Occupancy,
}

impl HazardTerm {
    pub fn evaluate(&self, regulator_level: f64, active: f64, total: f64) -> f64 {
        let occupied = match self.occupancy {
            Occupancy::VacantSites => total - active,
            Occupancy::ActiveSites => active,
        };
        self.coefficient * regulator_level * occupied
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ValidationIssue {
    EmptyId,
    DuplicateId { id: String },
    ZeroTotal { species: String },
    InitOutOfRange { species: String, init: u32, total: u32 },
    DanglingReference { reaction: usize, id: String },
    TargetIsInput { reaction: usize, id: String },
    NonPositiveRate { reaction: usize, rate: f64 },
    AutoActivation { reaction: usize },
    /// Self-regulation makes the hazard quadratic in the target.
    HazardOrderTooHigh { reaction: usize },
    DuplicateReaction { reaction: usize },
    MissingActivation { species: String },
    MissingDeactivation { species: String },
    CycleDetected { nodes: Vec<String> },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            EmptyId => write!(f, "empty identifier"),
            DuplicateId { id } => write!(f, "duplicate identifier `{id}`"),
            ZeroTotal { species } => write!(f, "species `{species}` has TOTAL=0"),
            InitOutOfRange {
                species,
                init,
                total,
            } => write!(f, "species `{species}` has INIT={init} > TOTAL={total}"),
            DanglingReference { reaction, id } => {
                write!(f, "reaction #{reaction} references unknown id `{id}`")
            }
            TargetIsInput { reaction, id } => {
                write!(f, "reaction #{reaction} targets input signal `{id}`")
            }
            NonPositiveRate { reaction, rate } => {
                write!(f, "reaction #{reaction} has non-positive rate {rate}")
            }
            AutoActivation { reaction } => {
                write!(f, "reaction #{reaction}: AUTO is only allowed for deactivation")
            }
            HazardOrderTooHigh { reaction } => write!(
                f,
                "reaction #{reaction} is regulated by its own target (second-order hazard)"
            ),
            DuplicateReaction { reaction } => write!(
                f,
                "reaction #{reaction} duplicates an earlier (target, kind, regulator)"
            ),
            MissingActivation { species } => {
                write!(f, "species `{species}` has no activation reaction")
            }
            MissingDeactivation { species } => {
                write!(f, "species `{species}` has no deactivation reaction")
            }
            CycleDetected { nodes } => {
                write!(f, "regulation cycle detected: {}", nodes.join(" <- "))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {issue}")?;
        }
        Ok(())
    }
}

/// Regulation graph over species and inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    /// Sorted by name.
    pub nodes: Vec<SpeciesId>,
    /// `(regulator, target)` pairs.
    pub edges: BTreeSet<(SpeciesId, SpeciesId)>,
    pub activators: BTreeMap<SpeciesId, BTreeSet<SpeciesId>>,
    pub inhibitors: BTreeMap<SpeciesId, BTreeSet<SpeciesId>>,
    pub order: Vec<SpeciesId>,
}

impl Dag {
    pub fn parents(&self, node: &str) -> BTreeSet<&SpeciesId> {
        self.edges
            .iter()
            .filter(|(_, to)| to.as_str() == node)
            .map(|(from, _)| from)
            .collect()
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges
            .iter()
            .any(|(a, b)| a.as_str() == from && b.as_str() == to)
    }

    /// Every directed path from `from` to `to`, in lexicographic order.
    pub fn paths(&self, from: &str, to: &str) -> Vec<Vec<SpeciesId>> {
        let mut children: HashMap<&str, Vec<&SpeciesId>> = HashMap::new();
        for (a, b) in &self.edges {
            children.entry(a.as_str()).or_default().push(b);
        }
        let mut out = Vec::new();
        let mut stack = vec![SpeciesId::new(from)];
        fn walk(
            children: &HashMap<&str, Vec<&SpeciesId>>,
            to: &str,
            stack: &mut Vec<SpeciesId>,
            out: &mut Vec<Vec<SpeciesId>>,
        ) {
            let last = stack.last().unwrap().clone();
            if last.as_str() == to {
                out.push(stack.clone());
                return;
            }
            for child in children.get(last.as_str()).into_iter().flatten() {
                stack.push((*child).clone());
                walk(children, to, stack, out);
                stack.pop();
            }
        }
        walk(&children, to, &mut stack, &mut out);
        out.sort();
        out
    }
}
