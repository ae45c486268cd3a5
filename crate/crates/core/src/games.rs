//! Game specifications, states, and the three payoff schemes.

use std::fmt;

use crate::engine::{dispatch, Engine};
use crate::rational::Rational;
use crate::valuations::Valuation;
use crate::{Error, Result};

/// How a party's profit is shared among its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Marginal contribution to the full party.
    FairValue,
    /// Expected marginal contribution over uniformly random arrival orders.
    Shapley,
    /// Marginal contribution to the members who arrived earlier.
    LaborUnion,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::FairValue => "fair_value",
            Scheme::Shapley => "shapley",
            Scheme::LaborUnion => "labor_union",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "fair_value" => Some(Scheme::FairValue),
            "shapley" => Some(Scheme::Shapley),
            "labor_union" => Some(Scheme::LaborUnion),
            _ => None,
        }
    }

    pub fn is_ordered(self) -> bool {
        self == Scheme::LaborUnion
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A player's choice. Only labor-union games allow `Unaffiliated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Unaffiliated,
    Party(usize),
}

impl Strategy {
    /// 1-based file/CLI encoding, `0` for unaffiliated.
    pub fn code(self) -> usize {
        match self {
            Strategy::Unaffiliated => 0,
            Strategy::Party(j) => j + 1,
        }
    }

    pub fn from_code(code: usize) -> Self {
        match code {
            0 => Strategy::Unaffiliated,
            j => Strategy::Party(j - 1),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Unordered assignment of every player to one of `parties` parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionState {
    parties: usize,
    assignment: Vec<usize>,
}

impl PartitionState {
    pub fn new(parties: usize, assignment: Vec<usize>) -> Result<Self> {
        if let Some(i) = assignment.iter().position(|&j| j >= parties) {
            return Err(Error::invalid(format!(
                "player {} assigned to party {} of {parties}",
                i + 1,
                assignment[i] + 1
            )));
        }
        Ok(PartitionState { parties, assignment })
    }

    /// Every player in party 0.
    pub fn grand(parties: usize, n: usize) -> Self {
        PartitionState {
            parties,
            assignment: vec![0; n],
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Members of each party, as bitmasks.
    pub fn masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.parties];
        for (i, &j) in self.assignment.iter().enumerate() {
            masks[j] |= 1 << i;
        }
        masks
    }
}

/// Per-party arrival sequences plus the unaffiliated players.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedState {
    sequences: Vec<Vec<usize>>,
    unaffiliated: Vec<usize>,
}

impl OrderedState {
    /// Builds a state over players `0..n`; players absent from every
    /// sequence are unaffiliated.
    pub fn new(n: usize, sequences: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &p in sequences.iter().flatten() {
            if p >= n {
                return Err(Error::invalid(format!("player {} out of range 1..={n}", p + 1)));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid(format!("player {} appears twice", p + 1)));
            }
        }
        let unaffiliated = (0..n).filter(|&i| !seen[i]).collect();
        Ok(OrderedState {
            sequences,
            unaffiliated,
        })
    }

    pub fn all_unaffiliated(parties: usize, n: usize) -> Self {
        OrderedState {
            sequences: vec![Vec::new(); parties],
            unaffiliated: (0..n).collect(),
        }
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn unaffiliated(&self) -> &[usize] {
        &self.unaffiliated
    }

    pub fn parties(&self) -> usize {
        self.sequences.len()
    }

    /// `(party, index within its sequence)`, or `None` when unaffiliated.
    pub fn position(&self, player: usize) -> Option<(usize, usize)> {
        self.sequences
            .iter()
            .enumerate()
            .find_map(|(j, seq)| seq.iter().position(|&p| p == player).map(|k| (j, k)))
    }

    pub fn masks(&self) -> Vec<u64> {
        self.sequences
            .iter()
            .map(|seq| seq.iter().fold(0u64, |acc, &p| acc | 1 << p))
            .collect()
    }

    /// Same partition with every party sorted ascending.
    pub fn canonical_shape(&self) -> OrderedState {
        let mut shape = self.clone();
        for seq in &mut shape.sequences {
            seq.sort_unstable();
        }
        shape
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Partition(PartitionState),
    Ordered(OrderedState),
}

impl State {
    pub fn player_count(&self) -> usize {
        match self {
            State::Partition(p) => p.assignment.len(),
            State::Ordered(o) => o.sequences.iter().map(Vec::len).sum::<usize>() + o.unaffiliated.len(),
        }
    }

    pub fn party_count(&self) -> usize {
        match self {
            State::Partition(p) => p.parties,
            State::Ordered(o) => o.sequences.len(),
        }
    }

    pub fn strategy(&self, player: usize) -> Strategy {
        match self {
            State::Partition(p) => Strategy::Party(p.assignment[player]),
            State::Ordered(o) => o
                .position(player)
                .map_or(Strategy::Unaffiliated, |(j, _)| Strategy::Party(j)),
        }
    }

    pub fn masks(&self) -> Vec<u64> {
        match self {
            State::Partition(p) => p.masks(),
            State::Ordered(o) => o.masks(),
        }
    }

    /// Returns the state after `player` switches to `target`. Ordered states
    /// drop the player from its sequence (successors move up) and append it
    /// to the tail of the target party.
    pub fn apply_move(&self, player: usize, target: Strategy) -> Result<State> {
        let n = self.player_count();
        if player >= n {
            return Err(Error::invalid(format!("player {} out of range 1..={n}", player + 1)));
        }
        if let Strategy::Party(k) = target {
            if k >= self.party_count() {
                return Err(Error::invalid(format!(
                    "party {} out of range 1..={}",
                    k + 1,
                    self.party_count()
                )));
            }
        }
        let current = self.strategy(player);
        if current == target {
            return Err(Error::NoOpMove {
                player: player + 1,
                strategy: target.to_string(),
            });
        }
        match self {
            State::Partition(p) => {
                let Strategy::Party(k) = target else {
                    return Err(Error::invalid("partition states have no unaffiliated strategy"));
                };
                let mut next = p.clone();
                next.assignment[player] = k;
                Ok(State::Partition(next))
            }
            State::Ordered(o) => {
                let mut next = o.clone();
                match current {
                    Strategy::Party(j) => next.sequences[j].retain(|&q| q != player),
                    Strategy::Unaffiliated => next.unaffiliated.retain(|&q| q != player),
                }
                match target {
                    Strategy::Party(k) => next.sequences[k].push(player),
                    Strategy::Unaffiliated => {
                        let at = next.unaffiliated.partition_point(|&q| q < player);
                        next.unaffiliated.insert(at, player);
                    }
                }
                Ok(State::Ordered(next))
            }
        }
    }
}

impl From<PartitionState> for State {
    fn from(p: PartitionState) -> Self {
        State::Partition(p)
    }
}

impl From<OrderedState> for State {
    fn from(o: OrderedState) -> Self {
        State::Ordered(o)
    }
}

/// How valuations are checked when a game is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Exhaustive,
    /// Skip the check; reports carry an "unverified" banner.
    Skip,
}

/// A profit-sharing game: `n` players, one valuation per party, a scheme.
#[derive(Clone)]
pub struct GameSpec {
    scheme: Scheme,
    n: usize,
    valuations: Vec<Valuation>,
    verified: bool,
    pub(crate) engine: Engine,
}

impl fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSpec")
            .field("scheme", &self.scheme)
            .field("n", &self.n)
            .field("valuations", &self.valuations)
            .field("verified", &self.verified)
            .finish()
    }
}

impl GameSpec {
    /// Builds and exhaustively validates a game.
    pub fn new(scheme: Scheme, n: usize, valuations: Vec<Valuation>) -> Result<Self> {
        GameSpec::build(scheme, n, valuations, Validation::Exhaustive)
    }

    pub fn build(
        scheme: Scheme,
        n: usize,
        valuations: Vec<Valuation>,
        validation: Validation,
    ) -> Result<Self> {
        let m = valuations.len();
        if n == 0 {
            return Err(Error::invalid("a game needs at least one player"));
        }
        if m == 0 {
            return Err(Error::invalid("a game needs at least one party"));
        }
        if m > n {
            return Err(Error::invalid(format!(
                "m = {m} parties exceeds n = {n} players; we require m ≤ n"
            )));
        }
        for (j, v) in valuations.iter().enumerate() {
            if v.ground_set_size() != n {
                return Err(Error::invalid(format!(
                    "valuation {} has ground set size {}, expected {n}",
                    j + 1,
                    v.ground_set_size()
                )));
            }
            if validation == Validation::Exhaustive {
                let report = v.validate()?;
                if let Some(w) = report.violations.first() {
                    return Err(Error::InvalidValuation {
                        index: j + 1,
                        witness: w.to_string(),
                    });
                }
            }
        }
        let engine = Engine::compile(scheme, n, &valuations)?;
        Ok(GameSpec {
            scheme,
            n,
            valuations,
            verified: validation == Validation::Exhaustive,
            engine,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn parties(&self) -> usize {
        self.valuations.len()
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn allow_unaffiliated(&self) -> bool {
        self.scheme == Scheme::LaborUnion
    }

    /// Default starting point: everyone in party 1, or everyone unaffiliated
    /// in labor-union games.
    pub fn initial_state(&self) -> State {
        match self.scheme {
            Scheme::LaborUnion => OrderedState::all_unaffiliated(self.parties(), self.n).into(),
            _ => PartitionState::grand(self.parties(), self.n).into(),
        }
    }

    pub fn check_state(&self, state: &State) -> Result<()> {
        let ordered = matches!(state, State::Ordered(_));
        if ordered != self.scheme.is_ordered() {
            return Err(Error::SchemeMismatch(self.scheme.name()));
        }
        if state.player_count() != self.n || state.party_count() != self.parties() {
            return Err(Error::invalid(format!(
                "state has {} players and {} parties, game has {} and {}",
                state.player_count(),
                state.party_count(),
                self.n,
                self.parties()
            )));
        }
        Ok(())
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.n {
            return Err(Error::invalid(format!("player {} out of range 1..={}", player + 1, self.n)));
        }
        Ok(())
    }

    pub fn payoff(&self, state: &State, player: usize) -> Result<Rational> {
        self.check_state(state)?;
        self.check_player(player)?;
        let masks = state.masks();
        Ok(dispatch!(self.engine, t => self.engine.to_rational(&t.payoff(state, &masks, player))))
    }

    pub fn all_payoffs(&self, state: &State) -> Result<Vec<Rational>> {
        self.check_state(state)?;
        let masks = state.masks();
        Ok(dispatch!(self.engine, t => (0..self.n)
            .map(|i| self.engine.to_rational(&t.payoff(state, &masks, i)))
            .collect()))
    }

    /// `Σ_j v_j(Q_j)`; unaffiliated players contribute nothing.
    pub fn total_profit(&self, state: &State) -> Result<Rational> {
        self.check_state(state)?;
        let masks = state.masks();
        Ok(dispatch!(self.engine, t => self.engine.to_rational(&t.total_profit(&masks))))
    }

    /// Total profit for fair-value and labor-union games; for Shapley games
    /// `Σ_j Σ_{∅≠Q⊆Q_j} (|Q|−1)!(|Q_j|−|Q|)!/|Q_j|! · v_j(Q)`.
    pub fn potential(&self, state: &State) -> Result<Rational> {
        self.check_state(state)?;
        let masks = state.masks();
        Ok(dispatch!(self.engine, t => self.engine.to_rational(&t.potential(&masks))))
    }

    /// Checked move: the state must belong to this game.
    pub fn apply_move(&self, state: &State, player: usize, target: Strategy) -> Result<State> {
        self.check_state(state)?;
        state.apply_move(player, target)
    }
}
