//! Game-spec JSON files, state literals, trace export and report JSON.
//!
//! Files use 1-based player and party numbers; party `0` marks an
//! unaffiliated player. Every number that is not a count is a rational
//! string such as `"3/2"` or `"4"`.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::analysis::{EquilibriumReport, EquilibriumState, NicenessReport, OptimalStructure};
use crate::dynamics::{ConvergenceBound, DynamicsConfig, Selector, Trace, TraceStep};
use crate::games::{GameSpec, OrderedState, PartitionState, Scheme, State, Validation};
use crate::graphgames::WeightedGraph;
use crate::rational::{self, RatStr, Rational};
use crate::valuations::{ValidationReport, Valuation, ValuationKind, Violation};
use crate::{Error, Result};

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scheme::from_name(&s).ok_or_else(|| {
            serde::de::Error::custom(format!(
                "unknown scheme {s:?}, expected fair_value, shapley or labor_union"
            ))
        })
    }
}

/// `{"v": [1, 2], "w": "3/2"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFragment {
    pub v: Vec<usize>,
    pub w: RatStr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFragment {
    pub edges: Vec<EdgeFragment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValuationFragment {
    /// `values[mask]`, bit `i−1` of `mask` set iff player `i` is present.
    Table { n: usize, values: Vec<RatStr> },
    Additive { weights: Vec<RatStr> },
    /// Profile `c_0, …, c_n`.
    Concave { values: Vec<RatStr> },
    Coverage { edges: Vec<EdgeFragment> },
}

/// The `valuations` entry: one fragment per party, one fragment shared by
/// every party, or a graph whose coverage function every party uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationsSection {
    List(Vec<ValuationFragment>),
    Shared(ValuationFragment),
    Graph(GraphFragment),
}

impl Serialize for ValuationsSection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ValuationsSection::List(list) => list.serialize(s),
            ValuationsSection::Shared(f) => json!({ "shared": f }).serialize(s),
            ValuationsSection::Graph(g) => json!({ "graph": g }).serialize(s),
        }
    }
}

/// Deserializes `value` as `T`, prefixing errors with the JSON path.
fn decode<T: DeserializeOwned>(value: Value) -> std::result::Result<T, String> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("{path}: {}", e.inner())
        }
    })
}

fn single_key(value: &Value, keys: &[&str]) -> Option<(String, Value)> {
    let obj = value.as_object()?;
    if obj.len() != 1 {
        return None;
    }
    let (k, v) = obj.iter().next()?;
    keys.contains(&k.as_str()).then(|| (k.clone(), v.clone()))
}

impl<'de> Deserialize<'de> for ValuationsSection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = Value::deserialize(d)?;
        if value.is_array() {
            return decode(value).map(ValuationsSection::List).map_err(D::Error::custom);
        }
        match single_key(&value, &["shared", "graph"]) {
            Some((k, v)) if k == "shared" => decode(v)
                .map(ValuationsSection::Shared)
                .map_err(|e| D::Error::custom(format!("shared: {e}"))),
            Some((_, v)) => decode(v)
                .map(ValuationsSection::Graph)
                .map_err(|e| D::Error::custom(format!("graph: {e}"))),
            None => Err(D::Error::custom(
                "expected a list of fragments, {\"shared\": fragment} or {\"graph\": graph}",
            )),
        }
    }
}

/// A partition as an `n`-vector of 1-based parties, or an ordered
/// labor-union state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateLiteral {
    Partition(Vec<usize>),
    Ordered {
        parties: Vec<Vec<usize>>,
        unaffiliated: Vec<usize>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderedLiteral {
    parties: Vec<Vec<usize>>,
    unaffiliated: Vec<usize>,
}

impl Serialize for StateLiteral {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StateLiteral::Partition(a) => a.serialize(s),
            StateLiteral::Ordered {
                parties,
                unaffiliated,
            } => json!({ "parties": parties, "unaffiliated": unaffiliated }).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for StateLiteral {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = Value::deserialize(d)?;
        if value.is_array() {
            decode(value).map(StateLiteral::Partition).map_err(D::Error::custom)
        } else {
            let o: OrderedLiteral = decode(value).map_err(D::Error::custom)?;
            Ok(StateLiteral::Ordered {
                parties: o.parties,
                unaffiliated: o.unaffiliated,
            })
        }
    }
}

impl StateLiteral {
    pub fn from_state(state: &State) -> Self {
        match state {
            State::Partition(p) => StateLiteral::Partition(p.assignment().iter().map(|j| j + 1).collect()),
            State::Ordered(o) => StateLiteral::Ordered {
                parties: o
                    .sequences()
                    .iter()
                    .map(|s| s.iter().map(|i| i + 1).collect())
                    .collect(),
                unaffiliated: o.unaffiliated().iter().map(|i| i + 1).collect(),
            },
        }
    }

    /// Resolves the literal against a game; `location` prefixes errors.
    pub fn to_state(&self, game: &GameSpec, location: &str) -> Result<State> {
        let (n, m) = (game.players(), game.parties());
        match (self, game.scheme()) {
            (StateLiteral::Partition(_), Scheme::LaborUnion) => Err(Error::parse(
                location,
                "labor-union states need the {\"parties\": […], \"unaffiliated\": […]} form",
            )),
            (StateLiteral::Ordered { .. }, scheme) if scheme != Scheme::LaborUnion => Err(Error::parse(
                location,
                format!("{scheme} states are n-vectors of parties; only labor-union games have ordered states"),
            )),
            (StateLiteral::Partition(a), _) => {
                if a.len() != n {
                    return Err(Error::parse(location, format!("expected {n} entries, got {}", a.len())));
                }
                if let Some(k) = a.iter().position(|&j| j == 0 || j > m) {
                    return Err(Error::parse(
                        format!("{location}/{k}"),
                        format!("party {} out of range 1..={m}", a[k]),
                    ));
                }
                Ok(PartitionState::new(m, a.iter().map(|j| j - 1).collect())?.into())
            }
            (
                StateLiteral::Ordered {
                    parties,
                    unaffiliated,
                },
                _,
            ) => {
                if parties.len() != m {
                    return Err(Error::parse(
                        format!("{location}/parties"),
                        format!("expected {m} party sequences, got {}", parties.len()),
                    ));
                }
                let to_index = |p: usize| -> Result<usize> {
                    if p == 0 || p > n {
                        Err(Error::parse(location, format!("player {p} out of range 1..={n}")))
                    } else {
                        Ok(p - 1)
                    }
                };
                let sequences = parties
                    .iter()
                    .map(|s| s.iter().map(|&p| to_index(p)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let state = OrderedState::new(n, sequences).map_err(|e| Error::parse(location, e.to_string()))?;
                let mut listed = unaffiliated.iter().map(|&p| to_index(p)).collect::<Result<Vec<_>>>()?;
                listed.sort_unstable();
                if listed != state.unaffiliated() {
                    return Err(Error::parse(
                        format!("{location}/unaffiliated"),
                        "must list exactly the players missing from every party",
                    ));
                }
                Ok(state.into())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorName {
    Basic,
    Roundrobin,
    Random,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<RatStr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selector: Option<SelectorName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
}

impl DynamicsSection {
    pub fn resolve(&self) -> Result<DynamicsConfig> {
        let defaults = DynamicsConfig::default();
        let selector = match self.selector.unwrap_or(SelectorName::Basic) {
            SelectorName::Basic => Selector::BasicMaxImprovement,
            SelectorName::Roundrobin => Selector::RoundRobin,
            SelectorName::Random => Selector::RandomSeeded(self.seed.unwrap_or(0)),
        };
        DynamicsConfig::new(
            self.alpha.clone().map_or(defaults.alpha, |a| a.0),
            selector,
            self.max_steps.unwrap_or(defaults.max_steps),
        )
        .map_err(|e| Error::parse("dynamics", e.to_string()))
    }

    pub fn from_config(config: &DynamicsConfig) -> Self {
        let (selector, seed) = match config.selector {
            Selector::BasicMaxImprovement => (SelectorName::Basic, None),
            Selector::RoundRobin => (SelectorName::Roundrobin, None),
            Selector::RandomSeeded(s) => (SelectorName::Random, Some(s)),
        };
        DynamicsSection {
            alpha: Some(RatStr(config.alpha.clone())),
            selector: Some(selector),
            seed,
            max_steps: Some(config.max_steps),
        }
    }
}

/// The on-disk game description. Field order is the canonical key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpecFile {
    pub n: usize,
    pub m: usize,
    pub scheme: Scheme,
    pub valuations: ValuationsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
}

fn rats(xs: &[Rational]) -> Vec<RatStr> {
    xs.iter().cloned().map(RatStr).collect()
}

fn unrats(xs: &[RatStr]) -> Vec<Rational> {
    xs.iter().map(|r| r.0.clone()).collect()
}

fn edges_fragment(g: &WeightedGraph) -> Vec<EdgeFragment> {
    g.edges()
        .iter()
        .map(|e| EdgeFragment {
            v: e.endpoints.iter().map(|i| i + 1).collect(),
            w: RatStr(e.weight.clone()),
        })
        .collect()
}

fn build_graph(n: usize, edges: &[EdgeFragment], location: &str) -> Result<WeightedGraph> {
    let mut list = Vec::with_capacity(edges.len());
    for (k, e) in edges.iter().enumerate() {
        if let Some(&bad) = e.v.iter().find(|&&p| p == 0 || p > n) {
            return Err(Error::parse(
                format!("{location}/edges/{k}/v"),
                format!("vertex {bad} out of range 1..={n}"),
            ));
        }
        list.push((e.v.iter().map(|p| p - 1).collect(), e.w.0.clone()));
    }
    WeightedGraph::new(n, list).map_err(|e| match e {
        Error::Parse { location: l, message } => Error::parse(format!("{location}/{l}"), message),
        other => other,
    })
}

impl ValuationFragment {
    pub fn from_valuation(v: &Valuation) -> Self {
        match v.kind() {
            ValuationKind::Table => ValuationFragment::Table {
                n: v.ground_set_size(),
                values: rats(v.values().expect("table")),
            },
            ValuationKind::Additive => ValuationFragment::Additive {
                weights: rats(v.values().expect("additive")),
            },
            ValuationKind::Concave => ValuationFragment::Concave {
                values: rats(v.values().expect("concave")),
            },
            ValuationKind::Coverage => ValuationFragment::Coverage {
                edges: edges_fragment(v.graph().expect("coverage")),
            },
        }
    }

    /// Builds the valuation over `n` players; `location` prefixes errors.
    pub fn build(&self, n: usize, location: &str) -> Result<Valuation> {
        let relocate = |e: Error| match e {
            Error::Parse { location: l, message } => Error::parse(format!("{location}/{l}"), message),
            other => other,
        };
        let v = match self {
            ValuationFragment::Table { n: k, values } => {
                if *k != n {
                    return Err(Error::parse(format!("{location}/n"), format!("table is over {k} players, game has {n}")));
                }
                Valuation::table(n, unrats(values)).map_err(relocate)?
            }
            ValuationFragment::Additive { weights } => Valuation::additive(unrats(weights)).map_err(relocate)?,
            ValuationFragment::Concave { values } => Valuation::concave(unrats(values)).map_err(relocate)?,
            ValuationFragment::Coverage { edges } => Valuation::coverage(Arc::new(build_graph(n, edges, location)?)),
        };
        if v.ground_set_size() != n {
            return Err(Error::parse(
                location,
                format!("valuation covers {} players, game has {n}", v.ground_set_size()),
            ));
        }
        Ok(v)
    }
}

/// A parsed and resolved game file.
#[derive(Debug, Clone)]
pub struct ParsedGame {
    pub file: GameSpecFile,
    pub game: GameSpec,
    pub initial_state: Option<State>,
    pub dynamics: Option<DynamicsConfig>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Skip the monotone/submodular check; the game is marked unverified.
    pub skip_validate: bool,
}

/// Parses and validates a game description.
pub fn parse_game_str(text: &str, options: ParseOptions) -> Result<ParsedGame> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let file: GameSpecFile = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(if path == "." { "document".to_string() } else { path }, e.inner().to_string())
    })?;
    resolve(file, options)
}

pub fn parse_game_file(path: &Path, options: ParseOptions) -> Result<ParsedGame> {
    let text = std::fs::read_to_string(path)?;
    parse_game_str(&text, options)
}

/// Builds the game a file describes.
pub fn resolve(file: GameSpecFile, options: ParseOptions) -> Result<ParsedGame> {
    let (n, m) = (file.n, file.m);
    if n == 0 {
        return Err(Error::parse("n", "a game needs at least one player"));
    }
    if m == 0 {
        return Err(Error::parse("m", "a game needs at least one party"));
    }
    if m > n {
        return Err(Error::parse("m", format!("m = {m} exceeds n = {n}; we require m ≤ n")));
    }
    let valuations = match &file.valuations {
        ValuationsSection::List(list) => {
            if list.len() != m {
                return Err(Error::parse("valuations", format!("expected {m} fragments, got {}", list.len())));
            }
            list.iter()
                .enumerate()
                .map(|(j, f)| f.build(n, &format!("valuations/{j}")))
                .collect::<Result<Vec<_>>>()?
        }
        ValuationsSection::Shared(f) => vec![f.build(n, "valuations/shared")?; m],
        ValuationsSection::Graph(g) => {
            let graph = Arc::new(build_graph(n, &g.edges, "valuations/graph")?);
            vec![Valuation::coverage(graph); m]
        }
    };
    let validation = if options.skip_validate {
        Validation::Skip
    } else {
        Validation::Exhaustive
    };
    let game = GameSpec::build(file.scheme, n, valuations, validation)?;
    let initial_state = file
        .initial_state
        .as_ref()
        .map(|s| s.to_state(&game, "initial_state"))
        .transpose()?;
    let dynamics = file.dynamics.as_ref().map(DynamicsSection::resolve).transpose()?;
    Ok(ParsedGame {
        file,
        game,
        initial_state,
        dynamics,
    })
}

impl GameSpecFile {
    /// Canonical description of a game: one fragment per party.
    pub fn from_game(game: &GameSpec, initial_state: Option<&State>, dynamics: Option<&DynamicsConfig>) -> Self {
        GameSpecFile {
            n: game.players(),
            m: game.parties(),
            scheme: game.scheme(),
            valuations: ValuationsSection::List(
                game.valuations().iter().map(ValuationFragment::from_valuation).collect(),
            ),
            initial_state: initial_state.map(StateLiteral::from_state),
            dynamics: dynamics.map(DynamicsSection::from_config),
        }
    }

    /// Pretty JSON in canonical key order, with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Jsonl,
    Csv,
}

impl TraceFormat {
    /// Picks the format from a `.jsonl` or `.csv` extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "jsonl" => Some(TraceFormat::Jsonl),
            "csv" => Some(TraceFormat::Csv),
            _ => None,
        }
    }
}

pub const CSV_HEADER: &str = "step,mover,from,to,payoff_before,payoff_after,potential_after,total_profit_after";

pub fn step_json(index: usize, s: &TraceStep) -> Value {
    json!({
        "step": index + 1,
        "mover": s.mover + 1,
        "from": s.from.code(),
        "to": s.to.code(),
        "payoff_before": rational::format(&s.payoff_before),
        "payoff_after": rational::format(&s.payoff_after),
        "potential_after": rational::format(&s.potential_after),
        "total_profit_after": rational::format(&s.total_profit_after),
    })
}

/// Renders a trace: one JSON object per step, or a CSV table with header.
pub fn render_trace(trace: &Trace, format: TraceFormat) -> String {
    let mut out = String::new();
    match format {
        TraceFormat::Jsonl => {
            for (k, s) in trace.steps.iter().enumerate() {
                out.push_str(&step_json(k, s).to_string());
                out.push('\n');
            }
        }
        TraceFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for (k, s) in trace.steps.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    k + 1,
                    s.mover + 1,
                    s.from.code(),
                    s.to.code(),
                    rational::format(&s.payoff_before),
                    rational::format(&s.payoff_after),
                    rational::format(&s.potential_after),
                    rational::format(&s.total_profit_after),
                ));
            }
        }
    }
    out
}

pub fn write_trace(trace: &Trace, format: TraceFormat, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(render_trace(trace, format).as_bytes())?;
    Ok(())
}

pub fn rat(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

pub fn state_json(state: &State) -> Value {
    serde_json::to_value(StateLiteral::from_state(state)).expect("serializable")
}

fn violation_json(v: &Violation) -> Value {
    let players = |c: crate::valuations::Coalition| c.iter().map(|i| i + 1).collect::<Vec<_>>();
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(format!("{:?}", v.kind).to_lowercase()));
    obj.insert("I".into(), json!(players(v.smaller)));
    obj.insert("J".into(), json!(players(v.larger)));
    if let Some(i) = v.player {
        obj.insert("i".into(), json!(i + 1));
    }
    obj.insert("lhs".into(), rat(&v.lhs));
    obj.insert("rhs".into(), rat(&v.rhs));
    obj.insert("text".into(), json!(v.to_string()));
    Value::Object(obj)
}

pub fn validation_report_json(index: usize, report: &ValidationReport) -> Value {
    json!({
        "valuation": index + 1,
        "monotone": report.monotone,
        "submodular": report.submodular,
        "submodular_exhaustive": report.submodular_exhaustive,
        "disjoint_pairs_checked": report.disjoint_pairs_checked,
        "violations": report.violations.iter().map(violation_json).collect::<Vec<_>>(),
    })
}

fn optimum_json(o: &OptimalStructure) -> Value {
    json!({ "value": rat(&o.value), "state": state_json(&o.state) })
}

fn equilibrium_json(e: &EquilibriumState) -> Value {
    json!({ "state": state_json(&e.state), "total_profit": rat(&e.total_profit) })
}

/// Report JSON; `with_states` includes the full equilibrium list.
pub fn equilibrium_report_json(r: &EquilibriumReport, with_states: bool) -> Value {
    let mut obj = Map::new();
    obj.insert("scheme".into(), json!(r.scheme.name()));
    obj.insert("alpha".into(), rat(&r.alpha));
    obj.insert("opt".into(), rat(&r.optimum.value));
    obj.insert("optimum".into(), optimum_json(&r.optimum));
    obj.insert("poa".into(), rat(&r.poa));
    obj.insert("pos".into(), rat(&r.pos));
    obj.insert("worst_value".into(), rat(&r.worst.total_profit));
    obj.insert("best_value".into(), rat(&r.best.total_profit));
    obj.insert("worst".into(), equilibrium_json(&r.worst));
    obj.insert("best".into(), equilibrium_json(&r.best));
    obj.insert("states_examined".into(), json!(r.states_examined as u64));
    obj.insert("equilibrium_count".into(), json!(r.equilibria.len()));
    if with_states {
        obj.insert("equilibria".into(), r.equilibria.iter().map(equilibrium_json).collect());
    }
    if let Some(shapes) = &r.equilibrium_shapes {
        obj.insert(
            "equilibrium_shapes".into(),
            shapes.iter().map(|s| state_json(&s.clone().into())).collect(),
        );
    }
    if let Some(strong) = &r.strong_equilibria {
        obj.insert("strong_equilibria".into(), strong.iter().map(state_json).collect());
    }
    if !r.valuations_verified {
        obj.insert("warning".into(), json!("valuation-unverified"));
    }
    Value::Object(obj)
}

pub fn niceness_report_json(r: &NicenessReport) -> Value {
    json!({
        "beta": rat(&r.beta_tested),
        "opt": rat(&r.optimum),
        "welfare_holds": r.welfare_holds,
        "perfect_holds": r.perfect_holds,
        "beta_nice_holds": r.beta_nice_holds,
        "exact_potential_holds": r.exact_potential_holds,
        "states_checked": r.states_checked as u64,
        "moves_checked": r.moves_checked as u64,
        "witnesses": r.witnesses.iter().map(|w| json!({
            "check": w.check.name(),
            "state": state_json(&w.state),
            "mover": w.mover.map(|i| i + 1),
            "target": w.target.map(|s| s.code()),
            "lhs": rat(&w.lhs),
            "rhs": rat(&w.rhs),
        })).collect::<Vec<_>>(),
    })
}

pub fn bound_json(b: &ConvergenceBound) -> Value {
    json!({
        "a": rat(&b.a),
        "b": rat(&b.b),
        "epsilon": rat(&b.epsilon),
        "steps": b.steps,
        "guaranteed_value": rat(&b.guaranteed_value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::run;
    use crate::rational::{frac, int};

    const PROP6: &str = r#"{
        "n": 3, "m": 2, "scheme": "shapley",
        "valuations": [
            {"kind": "additive", "weights": ["1/3", "1/2", "1/2"]},
            {"kind": "concave", "values": ["0", "1", "1", "1"]}
        ]
    }"#;

    fn parse(text: &str) -> Result<ParsedGame> {
        parse_game_str(text, ParseOptions::default())
    }

    fn location(e: Error) -> String {
        match e {
            Error::Parse { location, .. } => location,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn parses_prop6() {
        let p = parse(PROP6).unwrap();
        assert_eq!((p.game.players(), p.game.parties(), p.game.scheme()), (3, 2, Scheme::Shapley));
        assert!(p.game.is_verified());
        assert_eq!(p.game.valuations()[0].values().unwrap()[0], frac(1, 3));
    }

    #[test]
    fn fragment_examples() {
        let f: ValuationFragment = serde_json::from_str(r#"{"kind":"table","n":1,"values":["0","5"]}"#).unwrap();
        let v = f.build(1, "v").unwrap();
        assert_eq!(v.eval(crate::valuations::Coalition::singleton(0)).unwrap(), int(5));
        let bad: ValuationFragment = serde_json::from_str(r#"{"kind":"table","n":2,"values":["1","0","0","0"]}"#).unwrap();
        assert_eq!(location(bad.build(2, "valuations/0").unwrap_err()), "valuations/0/values/0");
        assert!(serde_json::from_str::<ValuationFragment>(r#"{"kind":"additive","weights":[],"x":1}"#).is_err());
    }

    #[test]
    fn rejects_more_parties_than_players() {
        let text = PROP6.replace("\"n\": 3", "\"n\": 1");
        let e = parse(&text).unwrap_err();
        assert!(e.to_string().contains("m ≤ n"), "{e}");
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = PROP6.replace("\"scheme\"", "\"colour\": 1, \"scheme\"");
        assert!(matches!(parse(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn syntax_errors_report_position() {
        let loc = location(parse("{\n  \"n\": 3,\n  oops\n}").unwrap_err());
        assert!(loc.starts_with("line 3"), "{loc}");
    }

    #[test]
    fn bad_rational_reports_path() {
        let text = PROP6.replace("\"1/3\"", "\"1/0\"");
        let e = parse(&text).unwrap_err();
        assert!(e.to_string().contains("valuations"), "{e}");
    }

    #[test]
    fn labor_union_state_needs_ordered_form() {
        let base = r#"{"n": 2, "m": 1, "scheme": "labor_union",
            "valuations": {"shared": {"kind": "additive", "weights": ["1", "1"]}}, "initial_state": STATE}"#;
        let e = parse(&base.replace("STATE", "[1, 1]")).unwrap_err();
        assert_eq!(location(e), "initial_state");
        let ok = parse(&base.replace("STATE", r#"{"parties": [[2]], "unaffiliated": [1]}"#)).unwrap();
        let State::Ordered(o) = ok.initial_state.unwrap() else { panic!() };
        assert_eq!(o.sequences(), &[vec![1]]);
        assert!(parse(&base.replace("STATE", r#"{"parties": [[2]], "unaffiliated": []}"#)).is_err());
    }

    #[test]
    fn partition_state_rejects_zero() {
        let text = PROP6.replace("\"valuations\"", "\"initial_state\": [1, 0, 2], \"valuations\"");
        assert_eq!(location(parse(&text).unwrap_err()), "initial_state/1");
    }

    #[test]
    fn invalid_valuation_is_rejected_unless_skipped() {
        let text = r#"{"n": 2, "m": 1, "scheme": "fair_value",
            "valuations": [{"kind": "table", "n": 2, "values": ["0", "1", "1", "4"]}]}"#;
        assert!(matches!(parse(text), Err(Error::InvalidValuation { index: 1, .. })));
        let p = parse_game_str(text, ParseOptions { skip_validate: true }).unwrap();
        assert!(!p.game.is_verified());
    }

    #[test]
    fn graph_section_and_round_trip() {
        let text = r#"{"n": 3, "m": 2, "scheme": "labor_union",
            "valuations": {"graph": {"edges": [{"v": [1, 2], "w": "1"}, {"v": [2, 3], "w": "3/2"}]}},
            "dynamics": {"selector": "random", "seed": 4, "alpha": "1/4"}}"#;
        let p = parse(text).unwrap();
        assert!(p.game.valuations().iter().all(|v| v.kind() == ValuationKind::Coverage));
        assert_eq!(p.dynamics.as_ref().unwrap().selector, Selector::RandomSeeded(4));
        let canon = GameSpecFile::from_game(&p.game, None, p.dynamics.as_ref());
        let again = parse(&canon.to_json()).unwrap();
        assert_eq!(again.file, canon);
        assert_eq!(again.game.valuations(), p.game.valuations());
        // The file as written round-trips through serde too.
        let text2 = serde_json::to_string(&p.file).unwrap();
        assert_eq!(parse(&text2).unwrap().file, p.file);
    }

    #[test]
    fn trace_rendering() {
        let p = parse(PROP6).unwrap();
        let state = p.game.initial_state();
        let trace = run(&p.game, &state, &DynamicsConfig::default()).unwrap();
        let csv = render_trace(&trace, TraceFormat::Csv);
        assert_eq!(csv, format!("{CSV_HEADER}\n1,1,1,2,1/3,1,2,2\n"));
        let jsonl = render_trace(&trace, TraceFormat::Jsonl);
        assert_eq!(jsonl.lines().count(), 1);
        let line: Value = serde_json::from_str(jsonl.trim_end()).unwrap();
        assert_eq!(line["mover"], 1);
        assert_eq!(line["to"], 2);

        let empty = run(&p.game, &PartitionState::new(2, vec![0, 1, 1]).unwrap().into(), &DynamicsConfig::default()).unwrap();
        assert_eq!(render_trace(&empty, TraceFormat::Csv), format!("{CSV_HEADER}\n"));
        assert_eq!(render_trace(&empty, TraceFormat::Jsonl), "");
    }
}
