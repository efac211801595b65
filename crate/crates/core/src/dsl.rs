//! Line-oriented model definition language (`.rxn`).
//!
//! ```text
//! MODEL <name>
//! INPUT <id> = <int>
//! SPECIES <id> TOTAL=<int> INIT=<int>
//! ACTIVATE <target> BY <regulator> RATE <float>
//! DEACTIVATE <target> BY <regulator> RATE <float>
//! DEACTIVATE <target> AUTO RATE <float>
//! ```
//!
//! One statement per line; `#` starts a comment. The parser collects every
//! diagnostic in the file rather than stopping at the first.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::network::{
    InputSignal, Reaction, ReactionKind, ReactionNetwork, Regulator, Species, SpeciesId,
    ValidationIssue,
};

const KEYWORDS: [&str; 10] = [
    "MODEL", "INPUT", "SPECIES", "ACTIVATE", "DEACTIVATE", "BY", "AUTO", "RATE", "TOTAL", "INIT",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSource {
    pub text: String,
    /// File path or `builtin:<name>`.
    pub origin: String,
}

impl ModelSource {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        ModelSource {
            text: text.into(),
            origin: origin.into(),
        }
    }

    /// Decodes UTF-8, reporting the position of the first invalid byte.
    pub fn from_bytes(bytes: &[u8], origin: impl Into<String>) -> Result<Self, ParseDiagnostic> {
        match std::str::from_utf8(bytes) {
            Ok(text) => Ok(ModelSource::new(text, origin)),
            Err(e) => {
                let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
                let line = valid.matches('\n').count() + 1;
                let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
                Err(ParseDiagnostic::error(line, column, "invalid UTF-8"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Warning,
        }
    }

    /// `origin:line:col: severity: message`
    pub fn render(&self, origin: &str) -> String {
        format!(
            "{origin}:{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Splits a comment-stripped line on whitespace and around `=`.
fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None; // (byte, column)
    for (column, (byte, ch)) in line.char_indices().enumerate() {
        let column = column + 1;
        if ch.is_whitespace() || ch == '=' {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &line[b..byte],
                    column: c,
                });
            }
            if ch == '=' {
                tokens.push(Token {
                    text: &line[byte..byte + 1],
                    column,
                });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &line[b..],
            column: c,
        });
    }
    tokens
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !KEYWORDS.contains(&s)
}

/// Where each parsed item came from, for mapping validation issues back to
/// source lines.
#[derive(Debug, Default)]
struct SourceMap {
    ids: HashMap<String, usize>,
    reactions: Vec<usize>,
}

struct LineParser<'a, 'd> {
    line_no: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
    diags: &'d mut Vec<ParseDiagnostic>,
}

impl<'a> LineParser<'a, '_> {
    fn fail(&mut self, column: usize, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic::error(self.line_no, column, message));
    }

    fn next(&mut self, what: &str) -> Option<Token<'a>> {
        match self.tokens.get(self.pos).copied() {
            Some(t) => {
                self.pos += 1;
                Some(t)
            }
            None => {
                let col = self.end_column;
                self.fail(col, format!("expected {what}, found end of line"));
                None
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Option<()> {
        let t = self.next(&format!("`{kw}`"))?;
        if t.text == kw {
            Some(())
        } else {
            self.fail(t.column, format!("expected `{kw}`, found `{}`", t.text));
            None
        }
    }

    fn ident(&mut self, what: &str) -> Option<Token<'a>> {
        let t = self.next(what)?;
        if is_identifier(t.text) {
            Some(t)
        } else {
            self.fail(t.column, format!("expected {what}, found `{}`", t.text));
            None
        }
    }

    fn integer(&mut self, what: &str) -> Option<u32> {
        let t = self.next(what)?;
        match t.text.parse::<u32>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.fail(t.column, format!("expected non-negative integer for {what}, found `{}`", t.text));
                None
            }
        }
    }

    fn rate(&mut self) -> Option<f64> {
        let t = self.next("rate")?;
        match t.text.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Some(v),
            Ok(_) => {
                self.fail(t.column, "rate must be positive");
                None
            }
            Err(_) => {
                self.fail(t.column, format!("expected numeric rate, found `{}`", t.text));
                None
            }
        }
    }

    fn finish(&mut self) -> Option<()> {
        if let Some(t) = self.tokens.get(self.pos).copied() {
            self.fail(t.column, format!("unexpected trailing token `{}`", t.text));
            None
        } else {
            Some(())
        }
    }
}

enum Statement<'a> {
    Model(Token<'a>),
    Input(Token<'a>, u32),
    Species(Token<'a>, u32, u32),
    Reaction {
        kind: ReactionKind,
        target: Token<'a>,
        regulator: Option<Token<'a>>,
        rate: f64,
    },
}

fn parse_statement<'a>(p: &mut LineParser<'a, '_>) -> Option<Statement<'a>> {
    let head = p.next("statement")?;
    let stmt = match head.text {
        "MODEL" => {
            let name = p.next("model name")?;
            if name.text == "=" {
                p.fail(name.column, "expected model name, found `=`");
                return None;
            }
            Statement::Model(name)
        }
        "INPUT" => {
            let id = p.ident("input id")?;
            p.keyword("=")?;
            let value = p.integer("input value")?;
            Statement::Input(id, value)
        }
        "SPECIES" => {
            let id = p.ident("species id")?;
            let mut total = None;
            let mut init = None;
            while p.pos < p.tokens.len() {
                let key = p.next("TOTAL or INIT")?;
                p.keyword("=")?;
                let slot = match key.text {
                    "TOTAL" => &mut total,
                    "INIT" => &mut init,
                    other => {
                        p.fail(key.column, format!("expected TOTAL or INIT, found `{other}`"));
                        return None;
                    }
                };
                if slot.is_some() {
                    p.fail(key.column, format!("{} given twice", key.text));
                    return None;
                }
                *slot = Some((p.integer(key.text)?, key.column));
            }
            let col = p.end_column;
            let Some((total, total_col)) = total else {
                p.fail(col, "missing TOTAL=<int>");
                return None;
            };
            let Some((init, init_col)) = init else {
                p.fail(col, "missing INIT=<int>");
                return None;
            };
            if total == 0 {
                p.fail(total_col, "TOTAL must be positive");
                return None;
            }
            if init > total {
                p.fail(init_col, format!("INIT={init} exceeds TOTAL={total}"));
                return None;
            }
            Statement::Species(id, total, init)
        }
        "ACTIVATE" | "DEACTIVATE" => {
            let kind = if head.text == "ACTIVATE" {
                ReactionKind::Activate
            } else {
                ReactionKind::Deactivate
            };
            let target = p.ident("target species")?;
            let t = p.next("`BY` or `AUTO`")?;
            let regulator = match t.text {
                "BY" => Some(p.ident("regulator id")?),
                "AUTO" if kind == ReactionKind::Deactivate => None,
                "AUTO" => {
                    p.fail(t.column, "AUTO is only allowed in DEACTIVATE");
                    return None;
                }
                other => {
                    p.fail(t.column, format!("expected `BY` or `AUTO`, found `{other}`"));
                    return None;
                }
            };
            p.keyword("RATE")?;
            let rate = p.rate()?;
            Statement::Reaction {
                kind,
                target,
                regulator,
                rate,
            }
        }
        other => {
            p.fail(head.column, format!("unknown statement `{other}`"));
            return None;
        }
    };
    p.finish()?;
    Some(stmt)
}

fn parse_inner(source: &ModelSource) -> (Option<(ReactionNetwork, SourceMap)>, Vec<ParseDiagnostic>) {
    let mut diags = Vec::new();
    let mut name: Option<String> = None;
    let mut species = Vec::new();
    let mut inputs = Vec::new();
    let mut pending = Vec::new();
    let mut map = SourceMap::default();
    let mut declared: HashMap<String, (bool, usize)> = HashMap::new(); // id -> (is_species, line)

    for (idx, raw) in source.text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line_no,
            tokens,
            pos: 0,
            end_column: line.chars().count().max(1),
            diags: &mut diags,
        };
        let Some(stmt) = parse_statement(&mut p) else {
            continue;
        };
        let mut declare = |tok: Token<'_>, is_species: bool, diags: &mut Vec<ParseDiagnostic>| {
            if let Some((_, first)) = declared.get(tok.text) {
                diags.push(ParseDiagnostic::error(
                    line_no,
                    tok.column,
                    format!("duplicate id `{}` (first declared on line {first})", tok.text),
                ));
                false
            } else {
                declared.insert(tok.text.to_owned(), (is_species, line_no));
                true
            }
        };
        match stmt {
            Statement::Model(tok) => {
                if name.is_some() {
                    diags.push(ParseDiagnostic::error(line_no, tok.column, "duplicate MODEL statement"));
                } else {
                    name = Some(tok.text.to_owned());
                }
            }
            Statement::Input(tok, value) => {
                if declare(tok, false, &mut diags) {
                    if value == 0 {
                        diags.push(ParseDiagnostic::warning(
                            line_no,
                            tok.column,
                            format!("input `{}` is zero; reactions it regulates never fire", tok.text),
                        ));
                    }
                    map.ids.insert(tok.text.to_owned(), line_no);
                    inputs.push(InputSignal::new(tok.text, value));
                }
            }
            Statement::Species(tok, total, init) => {
                if declare(tok, true, &mut diags) {
                    map.ids.insert(tok.text.to_owned(), line_no);
                    species.push(Species::new(tok.text, total, init));
                }
            }
            Statement::Reaction {
                kind,
                target,
                regulator,
                rate,
            } => {
                pending.push((
                    line_no,
                    kind,
                    (target.text.to_owned(), target.column),
                    regulator.map(|r| (r.text.to_owned(), r.column)),
                    rate,
                ));
            }
        }
    }

    // References may point forward, so resolve after all declarations.
    let mut reactions = Vec::new();
    for (line_no, kind, (target, tcol), regulator, rate) in pending {
        let mut ok = true;
        match declared.get(&target) {
            Some((true, _)) => {}
            Some((false, _)) => {
                diags.push(ParseDiagnostic::error(
                    line_no,
                    tcol,
                    format!("`{target}` is an INPUT and cannot be a reaction target"),
                ));
                ok = false;
            }
            None => {
                diags.push(ParseDiagnostic::error(line_no, tcol, format!("unknown species `{target}`")));
                ok = false;
            }
        }
        if let Some((reg, rcol)) = &regulator {
            if !declared.contains_key(reg) {
                diags.push(ParseDiagnostic::error(line_no, *rcol, format!("unknown id `{reg}`")));
                ok = false;
            }
        }
        if ok {
            map.reactions.push(line_no);
            reactions.push(Reaction {
                kind,
                target: SpeciesId::new(target),
                regulator: regulator.map_or(Regulator::Auto, |(r, _)| Regulator::Node(SpeciesId::new(r))),
                rate,
            });
        }
    }

    let name = name.unwrap_or_else(|| {
        diags.push(ParseDiagnostic::warning(1, 1, "missing MODEL statement; naming model after its origin"));
        source
            .origin
            .rsplit(['/', ':'])
            .next()
            .unwrap_or("model")
            .trim_end_matches(".rxn")
            .to_owned()
    });

    if diags.iter().any(|d| d.severity == Severity::Error) {
        return (None, diags);
    }
    let network = ReactionNetwork {
        name,
        species,
        inputs,
        reactions,
    };
    (Some((network, map)), diags)
}

/// Network plus any warnings, or every diagnostic on failure.
pub fn parse_with_warnings(source: &ModelSource) -> (Option<ReactionNetwork>, Vec<ParseDiagnostic>) {
    let (parsed, diags) = parse_inner(source);
    (parsed.map(|(n, _)| n), diags)
}

/// Syntax and reference checking only; see [`load`] for full validation.
pub fn parse(source: &ModelSource) -> Result<ReactionNetwork, Vec<ParseDiagnostic>> {
    match parse_inner(source) {
        (Some((network, _)), _) => Ok(network),
        (None, diags) => Err(diags),
    }
}

/// Parses raw bytes without assuming valid UTF-8.
pub fn parse_bytes(bytes: &[u8], origin: &str) -> Result<ReactionNetwork, Vec<ParseDiagnostic>> {
    let source = ModelSource::from_bytes(bytes, origin).map_err(|d| vec![d])?;
    parse(&source)
}

/// Parses and validates; validation issues come back as diagnostics on the
/// offending statement's line.
pub fn load(source: &ModelSource) -> Result<ReactionNetwork, Vec<ParseDiagnostic>> {
    let (network, map) = match parse_inner(source) {
        (Some(parsed), _) => parsed,
        (None, diags) => return Err(diags),
    };
    let report = network.validate();
    if report.is_empty() {
        return Ok(network);
    }
    let id_line = |id: &str| map.ids.get(id).copied().unwrap_or(1);
    let diags = report
        .issues
        .iter()
        .map(|issue| {
            let line = match issue {
                ValidationIssue::DanglingReference { reaction, .. }
                | ValidationIssue::TargetIsInput { reaction, .. }
                | ValidationIssue::NonPositiveRate { reaction, .. }
                | ValidationIssue::AutoActivation { reaction }
                | ValidationIssue::HazardOrderTooHigh { reaction }
                | ValidationIssue::DuplicateReaction { reaction } => {
                    map.reactions.get(*reaction).copied().unwrap_or(1)
                }
                ValidationIssue::MissingActivation { species }
                | ValidationIssue::MissingDeactivation { species }
                | ValidationIssue::ZeroTotal { species }
                | ValidationIssue::InitOutOfRange { species, .. } => id_line(species),
                ValidationIssue::DuplicateId { id } => id_line(id),
                ValidationIssue::CycleDetected { nodes } => {
                    nodes.first().map_or(1, |n| id_line(n))
                }
                ValidationIssue::EmptyId => 1,
            };
            ParseDiagnostic::error(line, 1, issue.to_string())
        })
        .collect();
    Err(diags)
}

/// Canonical text form: declarations in network order, reactions sorted by
/// (target, kind, regulator).
pub fn serialize(network: &ReactionNetwork) -> ModelSource {
    use std::fmt::Write;
    let canonical = network.canonical();
    let mut out = String::new();
    writeln!(out, "MODEL {}", canonical.name).unwrap();
    for input in &canonical.inputs {
        writeln!(out, "INPUT {} = {}", input.id, input.value).unwrap();
    }
    for s in &canonical.species {
        writeln!(out, "SPECIES {} TOTAL={} INIT={}", s.id, s.total, s.init_active).unwrap();
    }
    for r in &canonical.reactions {
        let verb = match r.kind {
            ReactionKind::Activate => "ACTIVATE",
            ReactionKind::Deactivate => "DEACTIVATE",
        };
        match &r.regulator {
            Regulator::Auto => writeln!(out, "{verb} {} AUTO RATE {}", r.target, r.rate),
            Regulator::Node(reg) => writeln!(out, "{verb} {} BY {reg} RATE {}", r.target, r.rate),
        }
        .unwrap();
    }
    ModelSource::new(out, format!("serialized:{}", canonical.name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use proptest::prelude::*;

    fn src(text: &str) -> ModelSource {
        ModelSource::new(text, "test.rxn")
    }

    #[test]
    fn negative_rate_is_an_error_at_its_column() {
        let text = "MODEL m\nSPECIES X TOTAL=10 INIT=0\nSPECIES Y TOTAL=10 INIT=0\nACTIVATE Y BY X RATE -1\n";
        let diags = parse(&src(text)).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].line, 4);
        assert_eq!(diags[0].column, 22);
        assert_eq!(diags[0].message, "rate must be positive");
        assert_eq!(diags[0].severity, Severity::Error);
        assert_eq!(
            diags[0].render("test.rxn"),
            "test.rxn:4:22: error: rate must be positive"
        );
    }

    #[test]
    fn collects_all_diagnostics() {
        let text = "\
MODEL m
SPECIES X TOTAL=ten INIT=0
SPECIES Y TOTAL=10 INIT=0
SPECIES Y TOTAL=10 INIT=0
ACTIVATE Y BY Q RATE 0.1
FROB Y
DEACTIVATE Y AUTO RATE abc
";
        let diags = parse(&src(text)).unwrap_err();
        let lines: Vec<usize> = diags.iter().map(|d| d.line).collect();
        assert_eq!(lines, [2, 4, 6, 7, 5]);
        assert!(diags[1].message.contains("duplicate id `Y`"));
        assert!(diags[4].message.contains("unknown id `Q`"));
    }

    #[test]
    fn comments_blank_lines_and_forward_references() {
        let text = "\
# leading comment

MODEL fwd   # trailing
ACTIVATE Y BY U RATE 1e-1
DEACTIVATE Y AUTO RATE 2
INPUT U=3
SPECIES Y INIT=1 TOTAL=5
";
        let n = parse(&src(text)).unwrap();
        assert_eq!(n.name, "fwd");
        assert_eq!(n.inputs[0].value, 3);
        assert_eq!(n.species[0], Species::new("Y", 5, 1));
        assert_eq!(n.reactions[0].rate, 0.1);
        assert!(n.validate().is_empty());
    }

    #[test]
    fn init_above_total_and_input_targets() {
        let text = "MODEL m\nINPUT U = 1\nSPECIES Y TOTAL=5 INIT=6\nACTIVATE U BY U RATE 1\n";
        let diags = parse(&src(text)).unwrap_err();
        assert!(diags.iter().any(|d| d.line == 3 && d.message.contains("exceeds")));
        assert!(diags.iter().any(|d| d.line == 4 && d.message.contains("INPUT")));
    }

    #[test]
    fn warnings_do_not_fail() {
        let text = "INPUT U = 0\nSPECIES Y TOTAL=5 INIT=0\nACTIVATE Y BY U RATE 1\nDEACTIVATE Y AUTO RATE 1\n";
        let (net, diags) = parse_with_warnings(&ModelSource::new(text, "dir/zero.rxn"));
        let net = net.unwrap();
        assert_eq!(net.name, "zero");
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.severity == Severity::Warning));
    }

    #[test]
    fn load_reports_cycles_as_diagnostics() {
        let text = "\
MODEL cyc
INPUT U = 1
SPECIES A TOTAL=10 INIT=0
SPECIES B TOTAL=10 INIT=0
ACTIVATE A BY U RATE 1
ACTIVATE A BY B RATE 1
ACTIVATE B BY A RATE 1
DEACTIVATE A AUTO RATE 1
DEACTIVATE B AUTO RATE 1
";
        assert!(parse(&src(text)).is_ok());
        let diags = load(&src(text)).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("cycle"));
        assert_eq!(diags[0].line, 3);
    }

    #[test]
    fn invalid_utf8_position() {
        let d = ModelSource::from_bytes(b"MODEL m\nSPE\xffCIES", "x").unwrap_err();
        assert_eq!((d.line, d.column), (2, 4));
    }

    #[test]
    fn builtins_round_trip() {
        for name in builtin::NAMES {
            let n = builtin::load(name).unwrap();
            let text = serialize(&n);
            let (back, diags) = parse_with_warnings(&text);
            assert!(diags.is_empty(), "{name}: {diags:?}");
            assert_eq!(back.unwrap(), n.canonical(), "{name}");
        }
    }

    #[test]
    fn empty_network_serializes_to_model_line() {
        let n = ReactionNetwork::new("empty");
        let text = serialize(&n);
        assert_eq!(text.text, "MODEL empty\n");
        let back = parse(&text).unwrap();
        assert_eq!(back, n);
        // Nothing to simulate; downstream validation still passes vacuously
        // but the network has no species.
        assert!(back.species.is_empty());
    }

    fn arb_network() -> impl Strategy<Value = ReactionNetwork> {
        (1usize..5, 0usize..3).prop_flat_map(|(ns, ni)| {
            let species = proptest::collection::vec((1u32..500, 0u32..500), ns);
            let inputs = proptest::collection::vec(0u32..100, ni);
            let rates = proptest::collection::vec(1e-6f64..1e3, ns * 2);
            (species, inputs, rates).prop_map(move |(sp, inp, rates)| {
                let mut n = ReactionNetwork::new("arb");
                for (i, (total, init)) in sp.iter().enumerate() {
                    n.species.push(Species::new(format!("S{i}"), *total, init % (total + 1)));
                }
                for (i, v) in inp.iter().enumerate() {
                    n.inputs.push(InputSignal::new(format!("U{i}"), *v));
                }
                for i in 0..sp.len() {
                    let target = format!("S{i}");
                    let reg = if i == 0 {
                        if inp.is_empty() { "S0".to_owned() } else { "U0".to_owned() }
                    } else {
                        format!("S{}", i - 1)
                    };
                    if reg == target {
                        n.reactions.push(Reaction::deactivate(&target, "S0", rates[2 * i]));
                    } else {
                        n.reactions.push(Reaction::activate(&target, &reg, rates[2 * i]));
                    }
                    n.reactions.push(Reaction::auto_deactivate(&target, rates[2 * i + 1]));
                }
                n
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_canonical_identity(n in arb_network()) {
            let back = parse(&serialize(&n)).unwrap();
            prop_assert_eq!(back, n.canonical());
        }

        #[test]
        fn never_panics_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            let _ = parse_bytes(&bytes, "fuzz");
        }

        #[test]
        fn never_panics_on_token_soup(words in proptest::collection::vec(
            prop_oneof![
                Just("MODEL"), Just("INPUT"), Just("SPECIES"), Just("ACTIVATE"), Just("DEACTIVATE"),
                Just("BY"), Just("AUTO"), Just("RATE"), Just("TOTAL"), Just("INIT"), Just("="),
                Just("X"), Just("Y"), Just("1"), Just("-3"), Just("0.5"), Just("\n"), Just("#"),
                Just("TOTAL=4"), Just("nan"), Just("inf"), Just("99999999999")
            ], 0..60)) {
            let text = words.join(" ");
            let _ = load(&ModelSource::new(text, "soup"));
        }
    }
}
