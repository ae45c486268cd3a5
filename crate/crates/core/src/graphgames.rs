//! Games whose parties share a coverage valuation over a weighted graph, and
//! the closed-form payoffs expressed through edge weights.
//!
//! For an affiliated player `i`, `A` is the weight of edges to members that
//! joined its party earlier, `B` to members that joined later and `C` to
//! players in other parties. The closed forms are `(A+B)/2 + C` for fair-value
//! and Shapley games and `B + C` for labor-union games. The generic Shapley and
//! labor-union payoffs agree with them; the generic fair-value payoff equals
//! `C` alone, because edges inside the party stay covered by the co-member.

use std::collections::HashSet;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::games::{GameSpec, Scheme, State, Strategy, Validation};
use crate::rational::{frac, Rational};
use crate::valuations::{Coalition, Valuation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub endpoints: Coalition,
    pub weight: Rational,
}

/// Vertices `0..n` with positively weighted edges and hyperedges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(Vec<usize>, Rational)>) -> Result<Self> {
        if n > 64 {
            return Err(Error::TooLarge {
                what: "graph vertex count",
                size: n as u128,
                limit: 64,
            });
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (k, (ends, weight)) in edges.into_iter().enumerate() {
            let set = Coalition::from_players(ends.iter().copied().filter(|&v| v < 64));
            if ends.iter().any(|&v| v >= n) {
                return Err(Error::parse(format!("edges/{k}/v"), "endpoint out of range"));
            }
            if set.len() != ends.len() {
                return Err(Error::parse(format!("edges/{k}/v"), "repeated endpoint"));
            }
            if set.len() < 2 {
                return Err(Error::parse(format!("edges/{k}/v"), "edge needs at least two endpoints"));
            }
            if !weight.is_positive() {
                return Err(Error::parse(format!("edges/{k}/w"), "weight must be positive"));
            }
            if !seen.insert(set) {
                return Err(Error::parse(format!("edges/{k}/v"), "duplicate edge"));
            }
            out.push(Edge {
                endpoints: set,
                weight,
            });
        }
        Ok(WeightedGraph { n, edges: out })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// True when every edge has exactly two endpoints.
    pub fn is_ordinary(&self) -> bool {
        self.edges.iter().all(|e| e.endpoints.len() == 2)
    }

    pub fn total_weight(&self) -> Rational {
        self.edges.iter().map(|e| &e.weight).sum()
    }

    pub fn weighted_degree(&self, v: usize) -> Rational {
        self.edges
            .iter()
            .filter(|e| e.endpoints.contains(v))
            .map(|e| &e.weight)
            .sum()
    }

    /// Weight of edges with at least one endpoint in `set`.
    pub fn covered_weight(&self, set: Coalition) -> Rational {
        self.edges
            .iter()
            .filter(|e| !e.endpoints.is_disjoint(set))
            .map(|e| &e.weight)
            .sum()
    }

    fn require_ordinary(&self) -> Result<()> {
        if self.is_ordinary() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "edge decomposition is defined for ordinary graphs only".into(),
            ))
        }
    }

    fn other_end(e: &Edge, v: usize) -> usize {
        e.endpoints.without(v).iter().next().expect("ordinary edge")
    }
}

pub fn coverage_valuation(graph: &Arc<WeightedGraph>) -> Valuation {
    Valuation::coverage(Arc::clone(graph))
}

/// Edge weight at a player split by where the other endpoint sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDecomposition {
    /// `A`: edges to earlier arrivals in the party (ordered states only).
    pub predecessors: Option<Rational>,
    /// `B`: edges to later arrivals in the party (ordered states only).
    pub successors: Option<Rational>,
    /// `A + B`.
    pub within: Rational,
    /// `C`: edges leaving the party.
    pub cut: Rational,
}

pub fn decompose(graph: &WeightedGraph, state: &State, player: usize) -> Result<GraphDecomposition> {
    graph.require_ordinary()?;
    if state.player_count() != graph.n || player >= graph.n {
        return Err(Error::invalid("state or player does not match the graph"));
    }
    let Strategy::Party(j) = state.strategy(player) else {
        return Err(Error::invalid(format!("player {} is unaffiliated", player + 1)));
    };
    let order: Option<&[usize]> = match state {
        State::Ordered(o) => Some(&o.sequences()[j]),
        State::Partition(_) => None,
    };
    let rank = |v: usize| order.and_then(|seq| seq.iter().position(|&p| p == v));
    let own = rank(player);

    let (mut a, mut b, mut c) = (Rational::zero(), Rational::zero(), Rational::zero());
    for e in graph.edges.iter().filter(|e| e.endpoints.contains(player)) {
        let other = WeightedGraph::other_end(e, player);
        if state.strategy(other) != Strategy::Party(j) {
            c += &e.weight;
        } else if rank(other) < own {
            a += &e.weight;
        } else {
            b += &e.weight;
        }
    }
    let within = &a + &b;
    Ok(match order {
        Some(_) => GraphDecomposition {
            predecessors: Some(a),
            successors: Some(b),
            within,
            cut: c,
        },
        None => GraphDecomposition {
            predecessors: None,
            successors: None,
            within,
            cut: c,
        },
    })
}

/// `(A+B)/2 + C` for fair-value and Shapley games, `B + C` for labor-union
/// games (which need an ordered state).
pub fn closed_form_payoff(
    graph: &WeightedGraph,
    state: &State,
    player: usize,
    scheme: Scheme,
) -> Result<Rational> {
    let d = decompose(graph, state, player)?;
    match scheme {
        Scheme::FairValue | Scheme::Shapley => Ok(d.within * frac(1, 2) + d.cut),
        Scheme::LaborUnion => match d.successors {
            Some(b) => Ok(b + d.cut),
            None => Err(Error::SchemeMismatch(scheme.name())),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckEntry {
    pub player: usize,
    pub scheme: Scheme,
    pub closed_form: Rational,
    pub generic: Rational,
    pub equal: bool,
}

/// The three games induced by one graph with `m` parties sharing its
/// coverage valuation.
#[derive(Debug, Clone)]
pub struct GraphGames {
    graph: Arc<WeightedGraph>,
    fair_value: GameSpec,
    shapley: GameSpec,
    labor_union: GameSpec,
}

impl GraphGames {
    pub fn new(graph: Arc<WeightedGraph>, parties: usize) -> Result<Self> {
        graph.require_ordinary()?;
        let n = graph.n;
        let v = coverage_valuation(&graph);
        v.validate().ok().filter(|r| r.is_valid()).ok_or_else(|| Error::InvalidValuation {
            index: 1,
            witness: "coverage valuation failed validation".into(),
        })?;
        let build = |s| GameSpec::build(s, n, vec![v.clone(); parties], Validation::Skip);
        Ok(GraphGames {
            fair_value: build(Scheme::FairValue)?,
            shapley: build(Scheme::Shapley)?,
            labor_union: build(Scheme::LaborUnion)?,
            graph,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn game(&self, scheme: Scheme) -> &GameSpec {
        match scheme {
            Scheme::FairValue => &self.fair_value,
            Scheme::Shapley => &self.shapley,
            Scheme::LaborUnion => &self.labor_union,
        }
    }

    /// Closed form against generic payoff for every affiliated player.
    /// Partition states are checked under fair value and Shapley; ordered
    /// states under labor union, plus fair value and Shapley on their
    /// partition when nobody is unaffiliated.
    pub fn cross_check(&self, state: &State) -> Result<Vec<CrossCheckEntry>> {
        let mut out = Vec::new();
        let mut check = |scheme: Scheme, s: &State| -> Result<()> {
            let game = self.game(scheme);
            let generic = game.all_payoffs(s)?;
            for (player, generic) in generic.into_iter().enumerate() {
                if s.strategy(player) == Strategy::Unaffiliated {
                    continue;
                }
                let closed_form = closed_form_payoff(&self.graph, s, player, scheme)?;
                out.push(CrossCheckEntry {
                    player,
                    scheme,
                    equal: closed_form == generic,
                    closed_form,
                    generic,
                });
            }
            Ok(())
        };
        match state {
            State::Partition(_) => {
                check(Scheme::FairValue, state)?;
                check(Scheme::Shapley, state)?;
            }
            State::Ordered(o) => {
                check(Scheme::LaborUnion, state)?;
                if o.unaffiliated().is_empty() {
                    let assignment = (0..self.graph.n)
                        .map(|i| match state.strategy(i) {
                            Strategy::Party(j) => j,
                            Strategy::Unaffiliated => unreachable!(),
                        })
                        .collect();
                    let flat = crate::games::PartitionState::new(o.parties(), assignment)?.into();
                    check(Scheme::FairValue, &flat)?;
                    check(Scheme::Shapley, &flat)?;
                }
            }
        }
        Ok(out)
    }
}

/// Convenience wrapper building the games for `state`'s party count.
pub fn cross_check(graph: &Arc<WeightedGraph>, state: &State) -> Result<Vec<CrossCheckEntry>> {
    GraphGames::new(Arc::clone(graph), state.party_count())?.cross_check(state)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutIdentity {
    pub total_profit: Rational,
    pub total_weight: Rational,
    pub cut_weight: Rational,
    pub identity_holds: bool,
}

/// With two parties, total profit equals total edge weight plus cut weight,
/// so maximizing total profit is maximum cut.
pub fn cut_identity(graph: &WeightedGraph, state: &State) -> Result<CutIdentity> {
    graph.require_ordinary()?;
    if state.party_count() != 2 {
        return Err(Error::invalid(format!(
            "cut identity needs exactly 2 parties, got {}",
            state.party_count()
        )));
    }
    if state.player_count() != graph.n {
        return Err(Error::invalid("state does not match the graph"));
    }
    if (0..graph.n).any(|i| state.strategy(i) == Strategy::Unaffiliated) {
        return Err(Error::invalid("cut identity needs every player affiliated"));
    }
    let masks = state.masks();
    let total_profit = masks
        .iter()
        .map(|&q| graph.covered_weight(Coalition::from_bits(q)))
        .sum::<Rational>();
    let cut_weight = graph
        .edges
        .iter()
        .filter(|e| {
            let mut ends = e.endpoints.iter();
            let (u, v) = (ends.next().unwrap(), ends.next().unwrap());
            state.strategy(u) != state.strategy(v)
        })
        .map(|e| &e.weight)
        .sum::<Rational>();
    let total_weight = graph.total_weight();
    Ok(CutIdentity {
        identity_holds: total_profit == &total_weight + &cut_weight,
        total_profit,
        total_weight,
        cut_weight,
    })
}

/// Tallies from checking every closed form on every state of a graph game.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphAudit {
    pub states: u64,
    /// Shapley and labor-union closed forms compared with generic payoffs.
    pub closed_form_checks: u64,
    pub closed_form_mismatches: Vec<String>,
    /// The `(A+B)/2 + C` fair-value form is expected to disagree.
    pub fair_value_closed_form_checks: u64,
    pub fair_value_closed_form_mismatches: u64,
    /// Generic fair-value payoff against `C`.
    pub fair_value_cut_checks: u64,
    pub fair_value_cut_mismatches: Vec<String>,
    /// Only run with two parties.
    pub cut_identity_checks: u64,
    pub cut_identity_failures: Vec<String>,
}

impl GraphAudit {
    /// True when everything except the fair-value closed form agrees.
    pub fn consistent(&self) -> bool {
        self.closed_form_mismatches.is_empty()
            && self.fair_value_cut_mismatches.is_empty()
            && self.cut_identity_failures.is_empty()
    }
}

impl GraphGames {
    /// Cross-checks every labor-union ordering and every partition, within
    /// the state budget. Mismatch lists hold up to `keep` descriptions.
    pub fn audit(&self, budget: u128, keep: usize) -> Result<GraphAudit> {
        let mut out = GraphAudit::default();
        let note = |list: &mut Vec<String>, text: &dyn Fn() -> String| {
            if list.len() < keep {
                list.push(text());
            }
        };
        let n = self.graph.n;
        let m = self.labor_union.parties();
        for state in crate::analysis::enumerate_states(&self.labor_union, budget)? {
            out.states += 1;
            for e in self.cross_check(&state)? {
                if e.scheme == Scheme::FairValue {
                    out.fair_value_closed_form_checks += 1;
                    out.fair_value_closed_form_mismatches += (!e.equal) as u64;
                    continue;
                }
                out.closed_form_checks += 1;
                if !e.equal {
                    note(&mut out.closed_form_mismatches, &|| {
                        format!(
                            "{} closed form {} != generic {} for player {} in {:?}",
                            e.scheme,
                            crate::rational::format(&e.closed_form),
                            crate::rational::format(&e.generic),
                            e.player + 1,
                            state
                        )
                    });
                }
            }
        }
        for p in crate::analysis::partition_states(n, m) {
            let state: State = p.into();
            out.states += 1;
            for (i, u) in self.fair_value.all_payoffs(&state)?.iter().enumerate() {
                let c = decompose(&self.graph, &state, i)?.cut;
                out.fair_value_cut_checks += 1;
                if u != &c {
                    note(&mut out.fair_value_cut_mismatches, &|| {
                        format!(
                            "fair value {} != C {} for player {} in {:?}",
                            crate::rational::format(u),
                            crate::rational::format(&c),
                            i + 1,
                            state
                        )
                    });
                }
            }
            if m == 2 {
                out.cut_identity_checks += 1;
                if !cut_identity(&self.graph, &state)?.identity_holds {
                    note(&mut out.cut_identity_failures, &|| format!("cut identity fails in {state:?}"));
                }
            }
        }
        Ok(out)
    }
}
