//! Exhaustive desk-scale analysis: state enumeration, optimum, equilibrium
//! classification, prices of anarchy and stability, niceness checks.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dynamics::beats;
use crate::engine::{dispatch, Scalar, Tables};
use crate::games::{GameSpec, OrderedState, PartitionState, Scheme, State, Strategy};
use crate::rational::{ceil_log, Rational};
use crate::valuations::Coalition;
use crate::{Error, Result};

pub const DEFAULT_STATE_BUDGET: u128 = 10_000_000;
pub const STRONG_NASH_MAX_PLAYERS: usize = 8;
const MAX_WITNESSES_PER_CHECK: usize = 8;

/// `m^n`, saturating.
pub fn partition_state_count(n: usize, m: usize) -> u128 {
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(m as u128))
}

/// Ordered labor-union states over `n` players and `m` parties, counting
/// unaffiliated players: `Σ_k C(n,k) · k! · C(k+m−1, m−1)`.
pub fn ordered_state_count(n: usize, m: usize) -> u128 {
    if m == 0 {
        return 1;
    }
    let mut total = 0u128;
    let mut choose_n = 1u128; // C(n, k)
    let mut fact = 1u128; // k!
    let mut lists = 1u128; // C(k+m−1, m−1)
    for k in 0..=n {
        if k > 0 {
            choose_n = choose_n.saturating_mul((n - k + 1) as u128) / k as u128;
            fact = fact.saturating_mul(k as u128);
            lists = lists.saturating_mul((k + m - 1) as u128) / k as u128;
        }
        total = total.saturating_add(choose_n.saturating_mul(fact).saturating_mul(lists));
    }
    total
}

/// Number of states `enumerate_states` yields for this game.
pub fn state_count(game: &GameSpec) -> u128 {
    match game.scheme() {
        Scheme::LaborUnion => ordered_state_count(game.players(), game.parties()),
        _ => partition_state_count(game.players(), game.parties()),
    }
}

fn check_budget(what: &'static str, size: u128, budget: u128) -> Result<()> {
    if size > budget {
        return Err(Error::TooLarge {
            what,
            size,
            limit: budget,
        });
    }
    Ok(())
}

/// Mixed-radix counter over `n` digits in `0..radix`, most significant first.
#[derive(Debug, Clone)]
struct Counter {
    radix: usize,
    digits: Option<Vec<usize>>,
}

impl Counter {
    fn new(n: usize, radix: usize) -> Self {
        Counter {
            radix,
            digits: (radix > 0 || n == 0).then(|| vec![0; n]),
        }
    }
}

impl Iterator for Counter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.digits.clone()?;
        let digits = self.digits.as_mut().expect("checked above");
        let mut k = digits.len();
        loop {
            if k == 0 {
                self.digits = None;
                break;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < self.radix {
                break;
            }
            digits[k] = 0;
        }
        Some(current)
    }
}

/// Every assignment of `n` players to `m` parties in lexicographic order,
/// player 1 most significant.
pub fn partition_states(n: usize, m: usize) -> impl Iterator<Item = PartitionState> {
    Counter::new(n, m).map(move |a| PartitionState::new(m, a).expect("digits below m"))
}

/// Labor-union partition shapes (members listed ascending), including
/// unaffiliated players, in lexicographic order of the 1-based codes
/// (`0` = unaffiliated).
pub fn labor_union_shapes(n: usize, m: usize) -> impl Iterator<Item = OrderedState> {
    Counter::new(n, m + 1).map(move |codes| {
        let mut sequences = vec![Vec::new(); m];
        for (i, &c) in codes.iter().enumerate() {
            if c > 0 {
                sequences[c - 1].push(i);
            }
        }
        OrderedState::new(n, sequences).expect("each player placed once")
    })
}

/// Rearranges `xs` into the next lexicographic permutation; `false` once
/// the last one has been passed (leaving `xs` sorted ascending).
pub(crate) fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        xs.reverse();
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("xs[i+1] qualifies");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// Every within-party ordering of `shape`, starting with ascending orders.
pub fn orderings(shape: &OrderedState) -> Vec<OrderedState> {
    let n = shape.sequences().iter().map(Vec::len).sum::<usize>() + shape.unaffiliated().len();
    let mut current: Vec<Vec<usize>> = shape
        .sequences()
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect();
    let mut out = Vec::new();
    loop {
        out.push(OrderedState::new(n, current.clone()).expect("permutation of a valid shape"));
        // Odometer over parties, last party varying fastest.
        let mut k = current.len();
        let advanced = loop {
            if k == 0 {
                break false;
            }
            k -= 1;
            if next_permutation(&mut current[k]) {
                break true;
            }
        };
        if !advanced {
            return out;
        }
    }
}

/// Every state of the game: partitions for fair-value and Shapley games,
/// every ordering of every shape for labor-union games.
pub fn enumerate_states(game: &GameSpec, budget: u128) -> Result<Box<dyn Iterator<Item = State>>> {
    check_budget("enumerated states", state_count(game), budget)?;
    let (n, m) = (game.players(), game.parties());
    Ok(match game.scheme() {
        Scheme::LaborUnion => Box::new(
            labor_union_shapes(n, m).flat_map(|shape| orderings(&shape).into_iter().map(State::from)),
        ),
        _ => Box::new(partition_states(n, m).map(State::from)),
    })
}

/// An optimal coalition structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalStructure {
    pub partition: PartitionState,
    /// The partition as a state of this game (ascending orders for labor
    /// unions).
    pub state: State,
    pub value: Rational,
}

fn partition_to_state(game: &GameSpec, p: &PartitionState) -> State {
    match game.scheme() {
        Scheme::LaborUnion => {
            let mut sequences = vec![Vec::new(); game.parties()];
            for (i, &j) in p.assignment().iter().enumerate() {
                sequences[j].push(i);
            }
            OrderedState::new(game.players(), sequences)
                .expect("partition is valid")
                .into()
        }
        _ => p.clone().into(),
    }
}

/// Maximum total profit over all partitions; the lexicographically first
/// maximizer wins ties.
pub fn optimum(game: &GameSpec, budget: u128) -> Result<OptimalStructure> {
    let (n, m) = (game.players(), game.parties());
    check_budget("partitions", partition_state_count(n, m), budget)?;
    let (best, value) = dispatch!(game.engine, t => {
        let mut best: Option<(Vec<usize>, _)> = None;
        let mut masks = vec![0u64; m];
        for a in Counter::new(n, m) {
            masks.iter_mut().for_each(|q| *q = 0);
            for (i, &j) in a.iter().enumerate() {
                masks[j] |= 1 << i;
            }
            let tp = t.total_profit(&masks);
            if best.as_ref().is_none_or(|(_, b)| &tp > b) {
                best = Some((a, tp));
            }
        }
        let (a, tp) = best.expect("at least one partition");
        (a, game.engine.to_rational(&tp))
    });
    let partition = PartitionState::new(m, best).expect("digits below m");
    Ok(OptimalStructure {
        state: partition_to_state(game, &partition),
        partition,
        value,
    })
}

/// A joint deviation: each listed player switches to the given strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub moves: Vec<(usize, Strategy)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateClassification {
    pub is_nash: bool,
    pub is_alpha_nash: bool,
    /// Present only when the strong check was requested.
    pub is_strong_nash: Option<bool>,
    pub strong_witness: Option<Deviation>,
    pub total_profit: Rational,
}

fn is_alpha_nash_t<T: Scalar>(t: &Tables<T>, state: &State, masks: &[u64], alpha: &Rational) -> bool {
    (0..t.n).all(|i| {
        let (_, best, now) = t.best_response(state, masks, i);
        !beats(&best, &now, alpha)
    })
}

/// Nash and α-Nash classification; `is_strong_nash` is left empty.
pub fn classify_state(game: &GameSpec, state: &State, alpha: &Rational) -> Result<StateClassification> {
    game.check_state(state)?;
    if alpha.is_negative() {
        return Err(Error::invalid("alpha must be non-negative"));
    }
    let masks = state.masks();
    let (is_nash, is_alpha_nash) = dispatch!(game.engine, t => (
        is_alpha_nash_t(t, state, &masks, &Rational::zero()),
        is_alpha_nash_t(t, state, &masks, alpha),
    ));
    Ok(StateClassification {
        is_nash,
        is_alpha_nash,
        is_strong_nash: None,
        strong_witness: None,
        total_profit: game.total_profit(state)?,
    })
}

/// `classify_state` plus the strong-Nash check (`n ≤ 8`).
pub fn classify_state_strong(game: &GameSpec, state: &State, alpha: &Rational) -> Result<StateClassification> {
    let mut c = classify_state(game, state, alpha)?;
    let witness = strong_nash_witness(game, state)?;
    c.is_strong_nash = Some(witness.is_none());
    c.strong_witness = witness;
    Ok(c)
}

/// A joint deviation in which at least one deviator strictly gains and no
/// deviator strictly loses, or `None` if the state is a strong equilibrium.
/// Every deviator must change strategy. In labor-union games the deviators
/// leave simultaneously and may re-enter their targets in any order.
pub fn strong_nash_witness(game: &GameSpec, state: &State) -> Result<Option<Deviation>> {
    game.check_state(state)?;
    let n = game.players();
    if n > STRONG_NASH_MAX_PLAYERS {
        return Err(Error::TooLarge {
            what: "players for the strong-Nash check",
            size: n as u128,
            limit: STRONG_NASH_MAX_PLAYERS as u128,
        });
    }
    let masks = state.masks();
    Ok(dispatch!(game.engine, t => strong_witness_t(t, state, &masks)))
}

fn strong_witness_t<T: Scalar>(t: &Tables<T>, state: &State, masks: &[u64]) -> Option<Deviation> {
    let n = t.n;
    let strategies: Vec<Strategy> = t.strategies().collect();
    let current: Vec<T> = (0..n).map(|i| t.payoff(state, masks, i)).collect();
    for coalition in 1u64..(1 << n) {
        let members: Vec<usize> = Coalition::from_bits(coalition).iter().collect();
        let alternatives: Vec<Vec<Strategy>> = members
            .iter()
            .map(|&i| strategies.iter().copied().filter(|&s| s != state.strategy(i)).collect())
            .collect();
        let radix = strategies.len() - 1;
        for choice in Counter::new(members.len(), radix) {
            let moves: Vec<(usize, Strategy)> = members
                .iter()
                .zip(&choice)
                .enumerate()
                .map(|(k, (&i, &c))| (i, alternatives[k][c]))
                .collect();
            let refutes = match state {
                State::Partition(_) => partition_deviation_refutes(t, masks, &current, &moves),
                State::Ordered(_) => ordered_deviation_refutes(t, masks, &current, &moves),
            };
            if refutes {
                return Some(Deviation { moves });
            }
        }
    }
    None
}

fn after_deviation(masks: &[u64], moves: &[(usize, Strategy)]) -> Vec<u64> {
    let leaving = moves.iter().fold(0u64, |acc, &(i, _)| acc | 1 << i);
    let mut next: Vec<u64> = masks.iter().map(|&q| q & !leaving).collect();
    for &(i, s) in moves {
        if let Strategy::Party(k) = s {
            next[k] |= 1 << i;
        }
    }
    next
}

fn partition_deviation_refutes<T: Scalar>(
    t: &Tables<T>,
    masks: &[u64],
    current: &[T],
    moves: &[(usize, Strategy)],
) -> bool {
    let next = after_deviation(masks, moves);
    let mut gain = false;
    for &(i, s) in moves {
        let Strategy::Party(k) = s else { unreachable!("partition games have no unaffiliated strategy") };
        let p = t.member_payoff(k, next[k] & !(1 << i), i);
        if p < current[i] {
            return false;
        }
        gain |= p > current[i];
    }
    gain
}

fn ordered_deviation_refutes<T: Scalar>(
    t: &Tables<T>,
    masks: &[u64],
    current: &[T],
    moves: &[(usize, Strategy)],
) -> bool {
    let leaving = moves.iter().fold(0u64, |acc, &(i, _)| acc | 1 << i);
    let mut any_gain = false;
    for k in 0..t.m {
        let mut group: Vec<usize> = moves
            .iter()
            .filter(|&&(_, s)| s == Strategy::Party(k))
            .map(|&(i, _)| i)
            .collect();
        if group.is_empty() {
            continue;
        }
        let base = masks[k] & !leaving;
        let (mut ok, mut gain) = (false, false);
        loop {
            let mut arrived = base;
            let mut order_ok = true;
            let mut order_gain = false;
            for &i in &group {
                let p = t.marginal(k, arrived, i);
                arrived |= 1 << i;
                if p < current[i] {
                    order_ok = false;
                    break;
                }
                order_gain |= p > current[i];
            }
            ok |= order_ok;
            gain |= order_ok && order_gain;
            if gain || !next_permutation(&mut group) {
                break;
            }
        }
        if !ok {
            return false;
        }
        any_gain |= gain;
    }
    // Leaving for "unaffiliated" pays 0 and never gains.
    let quitting_ok = moves
        .iter()
        .filter(|&&(_, s)| s == Strategy::Unaffiliated)
        .all(|&(i, _)| current[i] <= T::zero());
    quitting_ok && any_gain
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceOptions {
    pub alpha: Rational,
    pub budget: u128,
    /// Also list which equilibria are strong (`n ≤ 8`).
    pub strong: bool,
}

impl Default for PriceOptions {
    fn default() -> Self {
        PriceOptions {
            alpha: Rational::zero(),
            budget: DEFAULT_STATE_BUDGET,
            strong: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumState {
    pub state: State,
    pub total_profit: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub scheme: Scheme,
    pub alpha: Rational,
    pub optimum: OptimalStructure,
    /// α-Nash equilibria in enumeration order (per ordering for labor unions).
    pub equilibria: Vec<EquilibriumState>,
    pub worst: EquilibriumState,
    pub best: EquilibriumState,
    /// `Opt / worst`, or 1 when both are 0.
    pub poa: Rational,
    /// `Opt / best`, or 1 when both are 0.
    pub pos: Rational,
    pub states_examined: u128,
    /// Labor-union shapes every ordering of which is an equilibrium.
    pub equilibrium_shapes: Option<Vec<OrderedState>>,
    pub strong_equilibria: Option<Vec<State>>,
    pub valuations_verified: bool,
}

fn ratio(opt: &Rational, value: &Rational) -> Rational {
    if value.is_zero() {
        // Only reachable with Opt = 0 for monotone non-negative valuations.
        Rational::one()
    } else {
        opt / value
    }
}

/// Enumerates every state, keeps the α-Nash equilibria, and reports the
/// α-prices of anarchy and stability.
pub fn prices(game: &GameSpec, options: &PriceOptions) -> Result<EquilibriumReport> {
    if options.alpha.is_negative() {
        return Err(Error::invalid("alpha must be non-negative"));
    }
    if options.strong && game.players() > STRONG_NASH_MAX_PLAYERS {
        return Err(Error::TooLarge {
            what: "players for the strong-Nash check",
            size: game.players() as u128,
            limit: STRONG_NASH_MAX_PLAYERS as u128,
        });
    }
    let optimum = optimum(game, options.budget)?;
    let states_examined = state_count(game);
    check_budget("enumerated states", states_examined, options.budget)?;
    let (n, m) = (game.players(), game.parties());
    let alpha = &options.alpha;

    let mut equilibria = Vec::new();
    let mut strong = options.strong.then(Vec::new);
    let mut shapes = (game.scheme() == Scheme::LaborUnion).then(Vec::new);
    dispatch!(game.engine, t => {
        let mut visit = |state: State| -> bool {
            let masks = state.masks();
            if !is_alpha_nash_t(t, &state, &masks, alpha) {
                return false;
            }
            if let Some(list) = strong.as_mut() {
                if strong_witness_t(t, &state, &masks).is_none() {
                    list.push(state.clone());
                }
            }
            let tp = game.engine.to_rational(&t.total_profit(&masks));
            equilibria.push(EquilibriumState { state, total_profit: tp });
            true
        };
        match game.scheme() {
            Scheme::LaborUnion => {
                for shape in labor_union_shapes(n, m) {
                    let mut all = true;
                    for o in orderings(&shape) {
                        all &= visit(o.into());
                    }
                    if all {
                        shapes.as_mut().expect("labor union").push(shape);
                    }
                }
            }
            _ => partition_states(n, m).for_each(|p| {
                visit(p.into());
            }),
        }
    });

    let mut worst: Option<&EquilibriumState> = None;
    let mut best: Option<&EquilibriumState> = None;
    for e in &equilibria {
        if worst.is_none_or(|w| e.total_profit < w.total_profit) {
            worst = Some(e);
        }
        if best.is_none_or(|b| e.total_profit > b.total_profit) {
            best = Some(e);
        }
    }
    let (Some(worst), Some(best)) = (worst.cloned(), best.cloned()) else {
        return Err(Error::NoEquilibriumFound);
    };
    Ok(EquilibriumReport {
        scheme: game.scheme(),
        alpha: alpha.clone(),
        poa: ratio(&optimum.value, &worst.total_profit),
        pos: ratio(&optimum.value, &best.total_profit),
        optimum,
        equilibria,
        worst,
        best,
        states_examined,
        equilibrium_shapes: shapes,
        strong_equilibria: strong,
        valuations_verified: game.is_verified(),
    })
}

/// The four conditions checked by `verify_niceness`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NicenessCheck {
    /// `f(S) ≥ Σ_i u_i(S)`.
    WelfareDominance,
    /// `f(S′)−f(S) ≥ Φ(S′)−Φ(S) ≥ u_i(S′)−u_i(S)` on improvement moves.
    Perfectness,
    /// `β·f(S) + Δ(S) ≥ Opt`.
    BetaNice,
    /// `Φ(S′)−Φ(S) = u_i(S′)−u_i(S)` on every unilateral move.
    ExactPotential,
}

impl NicenessCheck {
    pub fn name(self) -> &'static str {
        match self {
            NicenessCheck::WelfareDominance => "welfare_dominance",
            NicenessCheck::Perfectness => "perfectness",
            NicenessCheck::BetaNice => "beta_nice",
            NicenessCheck::ExactPotential => "exact_potential",
        }
    }
}

/// A state (and move, for move-based checks) violating one condition;
/// `lhs ≥ rhs` (or `lhs = rhs`) was expected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicenessWitness {
    pub check: NicenessCheck,
    pub state: State,
    pub mover: Option<usize>,
    pub target: Option<Strategy>,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicenessReport {
    pub beta_tested: Rational,
    pub optimum: Rational,
    pub welfare_holds: bool,
    pub perfect_holds: bool,
    pub beta_nice_holds: bool,
    pub exact_potential_holds: bool,
    pub states_checked: u128,
    pub moves_checked: u128,
    /// At most a few witnesses per violated check.
    pub witnesses: Vec<NicenessWitness>,
}

impl NicenessReport {
    /// Perfect β-nice: conditions (a), (b) and (c).
    pub fn perfect_beta_nice(&self) -> bool {
        self.welfare_holds && self.perfect_holds && self.beta_nice_holds
    }
}

/// Checks the perfect β-nice conditions and the exact-potential identity
/// over every state and every unilateral move, with `f` = total profit.
pub fn verify_niceness(game: &GameSpec, beta: &Rational, budget: u128) -> Result<NicenessReport> {
    if beta.is_negative() {
        return Err(Error::invalid("beta must be non-negative"));
    }
    let opt = optimum(game, budget)?.value;
    let states = enumerate_states(game, budget)?;
    let mut report = NicenessReport {
        beta_tested: beta.clone(),
        optimum: opt.clone(),
        welfare_holds: true,
        perfect_holds: true,
        beta_nice_holds: true,
        exact_potential_holds: true,
        states_checked: 0,
        moves_checked: 0,
        witnesses: Vec::new(),
    };
    dispatch!(game.engine, t => niceness_t(game, t, states, beta, &opt, &mut report));
    Ok(report)
}

fn niceness_t<T: Scalar>(
    game: &GameSpec,
    t: &Tables<T>,
    states: Box<dyn Iterator<Item = State>>,
    beta: &Rational,
    opt: &Rational,
    report: &mut NicenessReport,
) {
    let engine = &game.engine;
    let strategies: Vec<Strategy> = t.strategies().collect();
    let mut counts = [0usize; 4];
    let mut witness = |report: &mut NicenessReport,
                       check: NicenessCheck,
                       state: &State,
                       mv: Option<(usize, Strategy)>,
                       lhs: BigInt,
                       rhs: BigInt,
                       denom: &BigInt| {
        let slot = &mut counts[check as usize];
        *slot += 1;
        if *slot > MAX_WITNESSES_PER_CHECK {
            return;
        }
        let denom = denom * engine.scale();
        report.witnesses.push(NicenessWitness {
            check,
            state: state.clone(),
            mover: mv.map(|m| m.0),
            target: mv.map(|m| m.1),
            lhs: Rational::new(lhs, denom.clone()),
            rhs: Rational::new(rhs, denom),
        });
    };
    let (bp, bq) = (beta.numer().clone(), beta.denom().clone());
    // Opt in engine units, scaled by β's denominator.
    let opt_big = (opt * Rational::from_integer(&bq * engine.scale())).to_integer();
    let one = BigInt::one();

    for state in states {
        report.states_checked += 1;
        let masks = state.masks();
        let f = t.total_profit(&masks);
        let phi = t.potential(&masks);
        let payoffs: Vec<T> = (0..t.n).map(|i| t.payoff(&state, &masks, i)).collect();
        let welfare = payoffs.iter().fold(T::zero(), |acc, u| acc + u.clone());
        if f < welfare {
            report.welfare_holds = false;
            witness(report, NicenessCheck::WelfareDominance, &state, None, f.to_big(), welfare.to_big(), &one);
        }
        let mut delta = T::zero();
        for i in 0..t.n {
            let (_, best, now) = t.best_response(&state, &masks, i);
            delta += best - now;
        }
        let lhs = &bp * f.to_big() + &bq * delta.to_big();
        if lhs < opt_big {
            report.beta_nice_holds = false;
            witness(report, NicenessCheck::BetaNice, &state, None, lhs, opt_big.clone(), &bq);
        }
        for i in 0..t.n {
            let from = state.strategy(i);
            for &to in &strategies {
                if to == from {
                    continue;
                }
                report.moves_checked += 1;
                let mut next = masks.clone();
                if let Strategy::Party(j) = from {
                    next[j] &= !(1 << i);
                }
                if let Strategy::Party(k) = to {
                    next[k] |= 1 << i;
                }
                let du = t.payoff_after_move(&masks, i, to) - payoffs[i].clone();
                let dphi = t.potential(&next) - phi.clone();
                let df = t.total_profit(&next) - f.clone();
                let mv = Some((i, to));
                if dphi != du {
                    report.exact_potential_holds = false;
                    witness(report, NicenessCheck::ExactPotential, &state, mv, dphi.to_big(), du.to_big(), &one);
                }
                if du > T::zero() {
                    if df < dphi {
                        report.perfect_holds = false;
                        witness(report, NicenessCheck::Perfectness, &state, mv, df.to_big(), dphi.to_big(), &one);
                    } else if dphi < du {
                        report.perfect_holds = false;
                        witness(report, NicenessCheck::Perfectness, &state, mv, dphi.to_big(), du.to_big(), &one);
                    }
                }
            }
        }
    }
    report.witnesses.sort_by_key(|w| w.check as usize);
}

/// True if every party values every nonempty coalition at 1 or more.
pub fn has_unit_floor(game: &GameSpec) -> Result<bool> {
    let one = Rational::one();
    for v in game.valuations() {
        for (bits, value) in v.tabulate()?.iter().enumerate() {
            if bits > 0 && value < &one {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `W = max_{i,j} v_j({i})`.
pub fn max_singleton_value(game: &GameSpec) -> Result<Rational> {
    let mut w = Rational::zero();
    for v in game.valuations() {
        for i in 0..game.players() {
            let x = v.eval(Coalition::singleton(i))?;
            if x > w {
                w = x;
            }
        }
    }
    Ok(w)
}

/// Step envelope `n·⌈log_{1+α} W⌉ + n` for the labor-union α-dynamic.
pub fn alpha_step_envelope(game: &GameSpec, alpha: &Rational) -> Result<u64> {
    if !alpha.is_positive() {
        return Err(Error::invalid("alpha must be positive"));
    }
    let w = max_singleton_value(game)?;
    let n = game.players() as u64;
    Ok(n * ceil_log(&(Rational::one() + alpha), &w) + n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_game, CorpusConfig};
    use crate::graphgames::{coverage_valuation, WeightedGraph};
    use crate::rational::{frac, int};
    use crate::valuations::Valuation;
    use std::sync::Arc;

    fn tight(n: usize, scheme: Scheme) -> GameSpec {
        let mut w = vec![frac(1, n as i64)];
        w.extend((1..n).map(|_| frac(1, n as i64 - 1)));
        let v1 = Valuation::additive(w).unwrap();
        let v2 = Valuation::concave((0..=n).map(|k| int((k > 0) as i64)).collect()).unwrap();
        GameSpec::new(scheme, n, vec![v1, v2]).unwrap()
    }

    /// `n! [x^n] e^x / (1−x)^m`, by multiplying truncated power series.
    fn egf_count(n: usize, m: usize) -> u128 {
        let mut series: Vec<Rational> = (0..=n)
            .map(|k| Rational::new(1.into(), (1..=k as u64).product::<u64>().into()))
            .collect();
        for _ in 0..m {
            // Multiply by 1/(1−x): prefix sums.
            for k in 1..=n {
                let prev = series[k - 1].clone();
                series[k] += prev;
            }
        }
        let fact: u64 = (1..=n as u64).product();
        let c = &series[n] * Rational::from_integer(fact.into());
        num_traits::ToPrimitive::to_u128(&c.to_integer()).unwrap()
    }

    #[test]
    fn counts_match_enumeration_and_generating_function() {
        assert_eq!(partition_state_count(2, 2), 4);
        assert_eq!(ordered_state_count(3, 2), 49);
        for n in 1..=5 {
            for m in 1..=3 {
                assert_eq!(ordered_state_count(n, m), egf_count(n, m), "n={n} m={m}");
                let shapes: Vec<_> = labor_union_shapes(n, m).collect();
                assert_eq!(shapes.len() as u128, partition_state_count(n, m + 1));
                let total: usize = shapes.iter().map(|s| orderings(s).len()).sum();
                assert_eq!(total as u128, ordered_state_count(n, m));
            }
        }
    }

    #[test]
    fn fully_affiliated_orderings_of_three_players() {
        let full: usize = labor_union_shapes(3, 2)
            .filter(|s| s.unaffiliated().is_empty())
            .map(|s| orderings(&s).len())
            .sum();
        assert_eq!(full, 24);
    }

    #[test]
    fn partition_order_is_lexicographic() {
        let states: Vec<Vec<usize>> = partition_states(3, 2).map(|p| p.assignment().to_vec()).collect();
        assert_eq!(states.len(), 8);
        assert_eq!(states[0], vec![0, 0, 0]);
        assert_eq!(states[1], vec![0, 0, 1]);
        assert_eq!(states[7], vec![1, 1, 1]);
        assert!(states.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn orderings_are_distinct() {
        let shape = OrderedState::new(5, vec![vec![0, 2, 4], vec![1, 3]]).unwrap();
        let all = orderings(&shape);
        assert_eq!(all.len(), 12);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 12);
        assert_eq!(all[0], shape);
    }

    #[test]
    fn next_permutation_walks_all() {
        let mut xs = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(xs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn budget_is_enforced() {
        let g = tight(5, Scheme::Shapley);
        assert!(matches!(enumerate_states(&g, 31), Err(Error::TooLarge { size: 32, .. })));
        assert!(enumerate_states(&g, 32).is_ok());
    }

    #[test]
    fn optimum_examples() {
        let g = tight(3, Scheme::Shapley);
        let opt = optimum(&g, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(opt.value, int(2));
        assert_eq!(opt.partition.assignment(), &[1, 0, 0]);

        let v = Valuation::concave(vec![int(0), int(2), int(3), int(3)]).unwrap();
        let single = GameSpec::new(Scheme::FairValue, 3, vec![v]).unwrap();
        assert_eq!(optimum(&single, 100).unwrap().value, int(3));

        let tri = Arc::new(WeightedGraph::new(3, vec![(vec![0, 1], int(1)), (vec![1, 2], int(1)), (vec![0, 2], int(1))]).unwrap());
        let cov = GameSpec::new(Scheme::Shapley, 3, vec![coverage_valuation(&tri), coverage_valuation(&tri)]).unwrap();
        assert_eq!(optimum(&cov, 100).unwrap().value, int(5));
    }

    #[test]
    fn prop6_prices() {
        for (n, poa, pos) in [(3, frac(3, 2), int(1)), (4, frac(8, 5), frac(6, 5)), (5, frac(5, 3), frac(4, 3))] {
            let r = prices(&tight(n, Scheme::Shapley), &PriceOptions::default()).unwrap();
            assert_eq!((r.poa, r.pos), (poa, pos), "n = {n}");
        }
    }

    #[test]
    fn single_party_prices_are_one() {
        for scheme in [Scheme::FairValue, Scheme::Shapley, Scheme::LaborUnion] {
            let v = Valuation::additive(vec![int(1), int(2), int(3)]).unwrap();
            let r = prices(&GameSpec::new(scheme, 3, vec![v]).unwrap(), &PriceOptions::default()).unwrap();
            assert_eq!((r.poa, r.pos), (int(1), int(1)));
        }
    }

    #[test]
    fn classification_examples() {
        let g = tight(3, Scheme::Shapley);
        let ne: State = PartitionState::new(2, vec![0, 1, 1]).unwrap().into();
        let c = classify_state_strong(&g, &ne, &int(0)).unwrap();
        assert!(c.is_nash && c.is_alpha_nash);
        // Players 1 and 2 swap: 1 earns 1/2 instead of 1/3, 2 keeps 1/2.
        assert_eq!(c.is_strong_nash, Some(false));
        let grand: State = PartitionState::grand(2, 3).into();
        assert!(!classify_state(&g, &grand, &int(0)).unwrap().is_nash);
        // With α large enough nobody's gain counts.
        assert!(classify_state(&g, &grand, &int(3)).unwrap().is_alpha_nash);
    }

    #[test]
    fn labor_union_optimum_is_strong() {
        let v1 = Valuation::concave(vec![int(0), int(3), int(5), int(6)]).unwrap();
        let v2 = Valuation::additive(vec![int(1), int(2), int(2)]).unwrap();
        let g = GameSpec::new(Scheme::LaborUnion, 3, vec![v1, v2]).unwrap();
        let opt = optimum(&g, 100).unwrap();
        for o in orderings(match &opt.state {
            State::Ordered(o) => o,
            _ => unreachable!(),
        }) {
            assert_eq!(strong_nash_witness(&g, &o.into()).unwrap(), None);
        }
    }

    #[test]
    fn strong_check_size_limit() {
        let v = Valuation::additive(vec![int(1); 9]).unwrap();
        let g = GameSpec::new(Scheme::FairValue, 9, vec![v]).unwrap();
        assert!(matches!(strong_nash_witness(&g, &g.initial_state()), Err(Error::TooLarge { .. })));
    }

    /// Brute-force strong-Nash oracle: every coalition, every joint target
    /// choice, and for labor unions every global re-entry order, replayed
    /// through the public move API.
    fn strong_oracle(g: &GameSpec, s: &State) -> bool {
        let n = g.players();
        let strategies: Vec<Strategy> = match g.scheme() {
            Scheme::LaborUnion => std::iter::once(Strategy::Unaffiliated)
                .chain((0..g.parties()).map(Strategy::Party))
                .collect(),
            _ => (0..g.parties()).map(Strategy::Party).collect(),
        };
        let before = g.all_payoffs(s).unwrap();
        for coalition in 1u64..1 << n {
            let members: Vec<usize> = (0..n).filter(|&i| coalition & 1 << i != 0).collect();
            for choice in Counter::new(members.len(), strategies.len()) {
                let targets: Vec<Strategy> = choice.iter().map(|&c| strategies[c]).collect();
                if members.iter().zip(&targets).any(|(&i, &t)| s.strategy(i) == t) {
                    continue;
                }
                // Everyone leaves first, then re-enters in some order.
                let mut order = members.clone();
                loop {
                    let mut state = s.clone();
                    if let State::Ordered(_) = s {
                        for &i in &members {
                            if state.strategy(i) != Strategy::Unaffiliated {
                                state = state.apply_move(i, Strategy::Unaffiliated).unwrap();
                            }
                        }
                    }
                    for &i in &order {
                        let t = targets[members.iter().position(|&x| x == i).unwrap()];
                        if state.strategy(i) != t {
                            state = state.apply_move(i, t).unwrap();
                        }
                    }
                    let after = g.all_payoffs(&state).unwrap();
                    let loss = members.iter().any(|&i| after[i] < before[i]);
                    let gain = members.iter().any(|&i| after[i] > before[i]);
                    if gain && !loss {
                        return false;
                    }
                    if !matches!(s, State::Ordered(_)) || !next_permutation(&mut order) {
                        break;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn strong_check_matches_brute_force() {
        let cfg = CorpusConfig {
            max_players: 4,
            ..CorpusConfig::default()
        };
        let mut refuted = 0;
        for k in 0..12 {
            for scheme in [Scheme::FairValue, Scheme::Shapley, Scheme::LaborUnion] {
                let g = random_game(scheme, 99, k, &cfg).unwrap();
                for s in enumerate_states(&g, 1000).unwrap().step_by(7) {
                    let fast = strong_nash_witness(&g, &s).unwrap();
                    assert_eq!(fast.is_none(), strong_oracle(&g, &s), "{g:?} {s:?}");
                    refuted += fast.is_some() as usize;
                }
            }
        }
        assert!(refuted > 0);
    }

    #[test]
    fn niceness_fair_value_and_labor_union() {
        let v1 = Valuation::concave(vec![int(0), int(3), int(5), int(6)]).unwrap();
        let v2 = Valuation::additive(vec![int(1), int(2), int(2)]).unwrap();
        let fv = GameSpec::new(Scheme::FairValue, 3, vec![v1.clone(), v2.clone()]).unwrap();
        let r = verify_niceness(&fv, &int(2), 1000).unwrap();
        assert!(r.perfect_beta_nice() && r.exact_potential_holds, "{r:?}");
        assert!(r.witnesses.is_empty());

        let lu = GameSpec::new(Scheme::LaborUnion, 3, vec![v1, v2]).unwrap();
        let r = verify_niceness(&lu, &int(2), 1000).unwrap();
        assert!(r.perfect_beta_nice());
        assert!(!r.exact_potential_holds);
        assert!(r.witnesses.iter().all(|w| w.check == NicenessCheck::ExactPotential));
    }

    #[test]
    fn zero_beta_yields_witness() {
        let g = tight(3, Scheme::FairValue);
        let r = verify_niceness(&g, &int(0), 1000).unwrap();
        assert!(!r.beta_nice_holds);
        let w = r.witnesses.iter().find(|w| w.check == NicenessCheck::BetaNice).unwrap();
        assert!(w.lhs < w.rhs);
        assert_eq!(w.rhs, int(2));
    }

    #[test]
    fn envelope_helpers() {
        let v = Valuation::additive(vec![int(2), int(4), int(1)]).unwrap();
        let g = GameSpec::new(Scheme::LaborUnion, 3, vec![v]).unwrap();
        assert!(has_unit_floor(&g).unwrap());
        assert_eq!(max_singleton_value(&g).unwrap(), int(4));
        // (3/2)^3 = 27/8 < 4 ≤ (3/2)^4.
        assert_eq!(alpha_step_envelope(&g, &frac(1, 2)).unwrap(), 3 * 4 + 3);
    }
}
