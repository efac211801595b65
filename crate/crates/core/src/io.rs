//! CSV and JSON writers. Every artifact starts with `#` metadata lines:
//! tool version (alone on its line), model name and hash, rates, and the
//! seed manifest.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::dsl::serialize;
use crate::eval::{EffectSample, MisspecReport};
use crate::network::{ReactionNetwork, SpeciesId};
use crate::ssa::Trajectory;

pub const TOOL_VERSION: &str = concat!("eq-scm ", env!("CARGO_PKG_VERSION"));

/// SHA-256 of the canonical DSL text, rates included.
pub fn model_hash(network: &ReactionNetwork) -> String {
    hex::encode(Sha256::digest(serialize(network).text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub model: String,
    pub model_hash: String,
    /// `(reaction key, rate)` in reaction order.
    pub rates: Vec<(String, f64)>,
    /// Seeds and every other flag needed to re-run the invocation.
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(network: &ReactionNetwork) -> Self {
        Metadata {
            model: network.name.clone(),
            model_hash: model_hash(network),
            rates: network.reactions.iter().map(|r| (r.key(), r.rate)).collect(),
            entries: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_owned(), value.to_string()));
        self
    }

    fn rate_list(&self) -> String {
        self.rates
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn header(&self) -> String {
        let mut s = format!("# tool: {TOOL_VERSION}\n");
        s += &format!("# model: {} sha256={}\n", self.model, self.model_hash);
        s += &format!("# rates: {}\n", self.rate_list());
        for (k, v) in &self.entries {
            s += &format!("# {k}: {v}\n");
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), json!(TOOL_VERSION));
        m.insert("model".into(), json!(self.model));
        m.insert("model_hash".into(), json!(self.model_hash));
        let rates: Map<String, Value> = self.rates.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        m.insert("rates".into(), Value::Object(rates));
        for (k, v) in &self.entries {
            m.insert(k.clone(), json!(v));
        }
        Value::Object(m)
    }
}

fn header_row(w: &mut impl Write, first: &str, species: &[SpeciesId]) -> io::Result<()> {
    write!(w, "{first}")?;
    for s in species {
        write!(w, ",{s}")?;
    }
    writeln!(w)
}

pub fn write_trajectory(w: &mut impl Write, meta: &Metadata, traj: &Trajectory) -> io::Result<()> {
    w.write_all(meta.header().as_bytes())?;
    header_row(w, "time", &traj.species)?;
    for (t, row) in traj.times.iter().zip(&traj.states) {
        write!(w, "{t}")?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_end_states(
    w: &mut impl Write,
    meta: &Metadata,
    species: &[SpeciesId],
    seeds: &[u64],
    states: &[Vec<u32>],
) -> io::Result<()> {
    w.write_all(meta.header().as_bytes())?;
    header_row(w, "seed", species)?;
    for (seed, row) in seeds.iter().zip(states) {
        write!(w, "{seed}")?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_counterfactual(w: &mut impl Write, meta: &Metadata, query: &str, draws: &[f64]) -> io::Result<()> {
    w.write_all(meta.header().as_bytes())?;
    writeln!(w, "draw,{query}")?;
    for (k, v) in draws.iter().enumerate() {
        writeln!(w, "{k},{v}")?;
    }
    Ok(())
}

pub fn write_effects(w: &mut impl Write, meta: &Metadata, samples: &[EffectSample]) -> io::Result<()> {
    w.write_all(meta.header().as_bytes())?;
    writeln!(w, "source,seed_or_draw,value")?;
    for s in samples {
        writeln!(w, "{},{},{}", s.source.name(), s.index, s.value)?;
    }
    Ok(())
}

/// `species,theta,mean` with theta to 4 and mean to 2 decimals.
pub fn write_equilibrium_table(
    w: &mut impl Write,
    species: &[SpeciesId],
    thetas: &[f64],
    means: &[f64],
) -> io::Result<()> {
    writeln!(w, "species,theta,mean")?;
    for ((s, t), m) in species.iter().zip(thetas).zip(means) {
        writeln!(w, "{s},{t:.4},{m:.2}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MisspecJson<'a> {
    reps: &'a [crate::eval::RepReport],
    avg_gap_scm: f64,
    avg_gap_sim: f64,
    scm_closer: usize,
    meta: Value,
}

pub fn misspec_json(meta: &Metadata, report: &MisspecReport) -> String {
    let doc = MisspecJson {
        reps: &report.reps,
        avg_gap_scm: report.avg_gap_scm,
        avg_gap_sim: report.avg_gap_sim,
        scm_closer: report.scm_closer,
        meta: meta.to_json(),
    };
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

/// Drops the tool-version line so artifacts from different builds compare.
pub fn strip_version(artifact: &str) -> String {
    artifact
        .lines()
        .filter(|l| !l.starts_with("# tool:") && !l.trim_start().starts_with("\"tool\":"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::eval::EffectSource;

    fn mapk() -> ReactionNetwork {
        builtin::load("mapk-exp1").unwrap()
    }

    #[test]
    fn hash_tracks_rates() {
        let net = mapk();
        let h = model_hash(&net);
        assert_eq!(h.len(), 64);
        assert_eq!(h, model_hash(&net.canonical()));
        let scaled = net.with_rates(&net.rates().scaled(crate::network::ReactionId(0), 0.5)).unwrap();
        assert_ne!(h, model_hash(&scaled));
    }

    #[test]
    fn header_layout() {
        let meta = Metadata::new(&mapk()).with("seed", 7);
        let h = meta.header();
        let lines: Vec<&str> = h.lines().collect();
        assert!(lines[0].starts_with("# tool: eq-scm "));
        assert!(lines[1].starts_with("# model: mapk-exp1 sha256="));
        assert!(lines[2].contains("act:K3:"));
        assert_eq!(lines[3], "# seed: 7");
    }

    #[test]
    fn effects_csv() {
        let meta = Metadata::new(&mapk());
        let samples = [
            EffectSample { value: -3.0, source: EffectSource::CoupledSsa, index: 11 },
            EffectSample { value: -2.5, source: EffectSource::ScmCounterfactual, index: 11 },
        ];
        let mut buf = Vec::new();
        write_effects(&mut buf, &meta, &samples).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, ["source,seed_or_draw,value", "ssa,11,-3", "scm,11,-2.5"]);
    }

    #[test]
    fn equilibrium_table_format() {
        let mut buf = Vec::new();
        write_equilibrium_table(&mut buf, &[SpeciesId::new("K3")], &[0.5], &[50.0]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "species,theta,mean\nK3,0.5000,50.00\n");
    }

    #[test]
    fn misspec_json_shape() {
        let report = MisspecReport {
            reps: vec![],
            avg_gap_scm: 0.5,
            avg_gap_sim: 1.0,
            scm_closer: 0,
        };
        let v: Value = serde_json::from_str(&misspec_json(&Metadata::new(&mapk()).with("seed", 1), &report)).unwrap();
        assert_eq!(v["avg_gap_sim"], json!(1.0));
        assert_eq!(v["meta"]["seed"], json!("1"));
        assert!(v["meta"]["model_hash"].is_string());
    }

    #[test]
    fn strip_version_only_drops_tool_line() {
        let meta = Metadata::new(&mapk()).with("seed", 3);
        let stripped = strip_version(&meta.header());
        assert!(!stripped.contains("tool"));
        assert!(stripped.contains("# seed: 3"));
    }
}
