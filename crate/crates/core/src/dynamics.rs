//! Best-response dynamics and their convergence bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{dispatch, Scalar, Tables};
use crate::games::{GameSpec, State, Strategy};
use crate::rational::Rational;
use crate::{Error, Result};

/// Which eligible player moves next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// The eligible player with the largest improvement `Δ_i` (lowest index on ties).
    BasicMaxImprovement,
    /// Players take turns `1, 2, …, n, 1, …`; ineligible players are skipped.
    RoundRobin,
    /// Turns follow a fresh seeded random permutation every round.
    RandomSeeded(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    /// `0` runs the plain Nash dynamic; `α > 0` only takes moves that beat
    /// the current payoff by a factor strictly above `1 + α`.
    pub alpha: Rational,
    pub selector: Selector,
    pub max_steps: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            alpha: Rational::zero(),
            selector: Selector::BasicMaxImprovement,
            max_steps: 10_000,
        }
    }
}

impl DynamicsConfig {
    pub fn new(alpha: Rational, selector: Selector, max_steps: usize) -> Result<Self> {
        if alpha.is_negative() {
            return Err(Error::invalid("alpha must be non-negative"));
        }
        if max_steps == 0 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        Ok(DynamicsConfig {
            alpha,
            selector,
            max_steps,
        })
    }
}

/// Best response of one player and the gain `Δ_i ≥ 0` it brings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerImprovement {
    pub best: Strategy,
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementProfile {
    pub per_player: Vec<PlayerImprovement>,
    pub total_delta: Rational,
}

impl ImprovementProfile {
    pub fn is_nash(&self) -> bool {
        self.total_delta.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub mover: usize,
    pub from: Strategy,
    pub to: Strategy,
    pub payoff_before: Rational,
    pub payoff_after: Rational,
    pub potential_after: Rational,
    pub total_profit_after: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub initial_state: State,
    pub initial_potential: Rational,
    pub initial_total_profit: Rational,
    pub steps: Vec<TraceStep>,
    pub final_state: State,
    /// No player had an eligible move in the final state.
    pub converged: bool,
    /// `max_steps` ran out before convergence.
    pub truncated: bool,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Total profit after `k` steps (`k = 0` is the initial state).
    pub fn total_profit_after(&self, k: usize) -> &Rational {
        match k {
            0 => &self.initial_total_profit,
            k => &self.steps[k.min(self.steps.len()) - 1].total_profit_after,
        }
    }
}

#[derive(Debug)]
pub enum StepOutcome {
    Moved(State, TraceStep),
    Converged,
}

pub fn best_response(game: &GameSpec, state: &State, player: usize) -> Result<(Strategy, Rational)> {
    game.check_state(state)?;
    if player >= game.players() {
        return Err(Error::invalid(format!("player {} out of range", player + 1)));
    }
    let masks = state.masks();
    Ok(dispatch!(game.engine, t => {
        let (s, best, now) = t.best_response(state, &masks, player);
        (s, game.engine.to_rational(&(best - now)))
    }))
}

pub fn improvement_profile(game: &GameSpec, state: &State) -> Result<ImprovementProfile> {
    game.check_state(state)?;
    let masks = state.masks();
    let per_player: Vec<PlayerImprovement> = dispatch!(game.engine, t => (0..game.players())
        .map(|i| {
            let (best, b, now) = t.best_response(state, &masks, i);
            PlayerImprovement { best, delta: game.engine.to_rational(&(b - now)) }
        })
        .collect());
    let total_delta = per_player.iter().map(|p| &p.delta).sum();
    Ok(ImprovementProfile {
        per_player,
        total_delta,
    })
}

/// Whether `best` is an α-improvement over `now`: `best > (1+α)·now`.
pub(crate) fn beats<T: Scalar>(best: &T, now: &T, alpha: &Rational) -> bool {
    if alpha.is_zero() {
        return best > now;
    }
    let (p, q) = (alpha.numer(), alpha.denom());
    best.mul_gt(q, now, &(p + q))
}

/// The α-eligible move of player `i`, if any: `(target, best, current)`.
pub(crate) fn eligible_move<T: Scalar>(
    t: &Tables<T>,
    state: &State,
    masks: &[u64],
    i: usize,
    alpha: &Rational,
) -> Option<(Strategy, T, T)> {
    let (target, best, now) = t.best_response(state, masks, i);
    beats(&best, &now, alpha).then_some((target, best, now))
}

/// Stateful driver for one run: keeps the selector's schedule between steps.
pub struct Dynamics<'g> {
    game: &'g GameSpec,
    config: DynamicsConfig,
    schedule: Vec<usize>,
    cursor: usize,
    rng: Option<ChaCha8Rng>,
}

impl<'g> Dynamics<'g> {
    pub fn new(game: &'g GameSpec, config: DynamicsConfig) -> Result<Self> {
        if config.alpha.is_negative() || config.max_steps == 0 {
            return Err(Error::invalid("alpha must be ≥ 0 and max_steps ≥ 1"));
        }
        let n = game.players();
        let mut rng = match config.selector {
            Selector::RandomSeeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut schedule: Vec<usize> = (0..n).collect();
        if let Some(rng) = rng.as_mut() {
            schedule.shuffle(rng);
        }
        Ok(Dynamics {
            game,
            config,
            schedule,
            cursor: 0,
            rng,
        })
    }

    fn next_in_schedule(&mut self) -> usize {
        if self.cursor == self.schedule.len() {
            self.cursor = 0;
            if let Some(rng) = self.rng.as_mut() {
                self.schedule.shuffle(rng);
            }
        }
        let p = self.schedule[self.cursor];
        self.cursor += 1;
        p
    }

    pub fn step(&mut self, state: &State) -> Result<StepOutcome> {
        self.game.check_state(state)?;
        dispatch!(self.game.engine, t => self.step_with(t, state))
    }

    fn step_with<T: Scalar>(&mut self, t: &Tables<T>, state: &State) -> Result<StepOutcome> {
        let masks = state.masks();
        let n = self.game.players();
        let alpha = self.config.alpha.clone();
        let chosen = match self.config.selector {
            Selector::BasicMaxImprovement => {
                let mut best: Option<(usize, Strategy, T, T)> = None;
                for i in 0..n {
                    if let Some((target, b, now)) = eligible_move(t, state, &masks, i, &alpha) {
                        let better = match &best {
                            None => true,
                            Some((_, _, bb, bn)) => b.clone() - now.clone() > bb.clone() - bn.clone(),
                        };
                        if better {
                            best = Some((i, target, b, now));
                        }
                    }
                }
                best
            }
            Selector::RoundRobin | Selector::RandomSeeded(_) => {
                let mut checked = vec![false; n];
                let mut remaining = n;
                let mut found = None;
                while remaining > 0 {
                    let i = self.next_in_schedule();
                    if checked[i] {
                        continue;
                    }
                    if let Some((target, b, now)) = eligible_move(t, state, &masks, i, &alpha) {
                        found = Some((i, target, b, now));
                        break;
                    }
                    checked[i] = true;
                    remaining -= 1;
                }
                found
            }
        };
        let Some((mover, to, after, before)) = chosen else {
            return Ok(StepOutcome::Converged);
        };
        let from = state.strategy(mover);
        let next = state.apply_move(mover, to)?;
        let next_masks = next.masks();
        let engine = &self.game.engine;
        let step = TraceStep {
            mover,
            from,
            to,
            payoff_before: engine.to_rational(&before),
            payoff_after: engine.to_rational(&after),
            potential_after: engine.to_rational(&t.potential(&next_masks)),
            total_profit_after: engine.to_rational(&t.total_profit(&next_masks)),
        };
        Ok(StepOutcome::Moved(next, step))
    }

    /// Iterates `step` until convergence or `max_steps` recorded steps.
    pub fn run(&mut self, initial: &State) -> Result<Trace> {
        let game = self.game;
        let mut trace = Trace {
            initial_state: initial.clone(),
            initial_potential: game.potential(initial)?,
            initial_total_profit: game.total_profit(initial)?,
            steps: Vec::new(),
            final_state: initial.clone(),
            converged: false,
            truncated: false,
        };
        let mut state = initial.clone();
        loop {
            if trace.steps.len() == self.config.max_steps {
                trace.converged = !has_eligible_move(game, &state, &self.config.alpha)?;
                trace.truncated = !trace.converged;
                break;
            }
            match self.step(&state)? {
                StepOutcome::Moved(next, step) => {
                    trace.steps.push(step);
                    state = next;
                }
                StepOutcome::Converged => {
                    trace.converged = true;
                    break;
                }
            }
        }
        trace.final_state = state;
        Ok(trace)
    }
}

pub(crate) fn has_eligible_move(game: &GameSpec, state: &State, alpha: &Rational) -> Result<bool> {
    game.check_state(state)?;
    let masks = state.masks();
    Ok(dispatch!(game.engine, t => (0..game.players())
        .any(|i| eligible_move(t, state, &masks, i, alpha).is_some())))
}

/// Runs the configured dynamic from `initial`.
pub fn run(game: &GameSpec, initial: &State, config: &DynamicsConfig) -> Result<Trace> {
    Dynamics::new(game, config.clone())?.run(initial)
}

/// One step of the configured dynamic from `state` with a fresh schedule.
pub fn step(game: &GameSpec, state: &State, config: &DynamicsConfig) -> Result<StepOutcome> {
    Dynamics::new(game, config.clone())?.step(state)
}

/// A dynamic whose per-step gain in `f` is at least `b − f/a` reaches
/// `f ≥ a·b·(1−ε)` within `⌈a·ln(1/ε)⌉` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceBound {
    pub a: Rational,
    pub b: Rational,
    pub epsilon: Rational,
    pub steps: u64,
    pub guaranteed_value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceBounds {
    /// Basic Nash dynamic: `a = n/β`, `b = Opt/n`.
    pub nash: ConvergenceBound,
    /// Basic α-Nash dynamic: `a = n/(β+α)`, `b = Opt/n`.
    pub alpha_nash: ConvergenceBound,
}

pub fn step_bound(a: &Rational, b: &Rational, epsilon: &Rational) -> Result<ConvergenceBound> {
    if !epsilon.is_positive() || epsilon >= &Rational::one() {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    if !a.is_positive() || b.is_negative() {
        return Err(Error::invalid("a must be positive and b non-negative"));
    }
    let inv = epsilon.recip();
    Ok(ConvergenceBound {
        a: a.clone(),
        b: b.clone(),
        epsilon: epsilon.clone(),
        steps: ceil_times_ln(a, &inv),
        guaranteed_value: a * b * (Rational::one() - epsilon),
    })
}

pub fn convergence_bounds(
    n: usize,
    beta: &Rational,
    alpha: &Rational,
    epsilon: &Rational,
    opt: &Rational,
) -> Result<ConvergenceBounds> {
    if n == 0 || !beta.is_positive() || alpha.is_negative() {
        return Err(Error::invalid("need n ≥ 1, β > 0 and α ≥ 0"));
    }
    let players = Rational::from_integer(BigInt::from(n));
    let b = opt / &players;
    Ok(ConvergenceBounds {
        nash: step_bound(&(&players / beta), &b, epsilon)?,
        alpha_nash: step_bound(&(&players / (beta + alpha)), &b, epsilon)?,
    })
}

/// `⌈a · ln x⌉` for `a > 0`, `x > 1`, from rigorous rational enclosures of
/// `ln x`. If the enclosure cannot separate the ceiling the larger value wins.
pub fn ceil_times_ln(a: &Rational, x: &Rational) -> u64 {
    let mut terms = 24;
    loop {
        let (lo, hi) = ln_enclosure(x, terms);
        let (lo, hi) = ((a * lo).ceil(), (a * hi).ceil());
        if lo == hi || terms >= 768 {
            return num_traits::ToPrimitive::to_u64(&hi.to_integer()).unwrap_or(u64::MAX);
        }
        terms *= 2;
    }
}

/// Bounds `lo ≤ ln x ≤ hi` for `x ≥ 1`.
pub fn ln_enclosure(x: &Rational, terms: usize) -> (Rational, Rational) {
    assert!(x >= &Rational::one(), "ln_enclosure needs x ≥ 1");
    let two = Rational::from_integer(BigInt::from(2));
    let mut reduced = x.clone();
    let mut halvings = 0u32;
    while reduced >= two {
        reduced /= &two;
        halvings += 1;
    }
    let (lo_r, hi_r) = atanh_enclosure(&reduced, terms);
    if halvings == 0 {
        return (lo_r, hi_r);
    }
    let (lo_2, hi_2) = atanh_enclosure(&two, terms);
    let k = Rational::from_integer(BigInt::from(halvings));
    (&k * lo_2 + lo_r, k * hi_2 + hi_r)
}

/// `ln r = 2·Σ y^(2j+1)/(2j+1)` with `y = (r−1)/(r+1)`, for `1 ≤ r ≤ 2`.
fn atanh_enclosure(r: &Rational, terms: usize) -> (Rational, Rational) {
    let one = Rational::one();
    let y = (r - &one) / (r + &one);
    let y2 = &y * &y;
    let mut power = y.clone();
    let mut sum = Rational::zero();
    for j in 0..terms {
        sum += &power / Rational::from_integer(BigInt::from(2 * j + 1));
        power *= &y2;
    }
    let two = Rational::from_integer(BigInt::from(2));
    let tail = &two * &power / Rational::from_integer(BigInt::from(2 * terms + 1)) / (&one - &y2);
    let lo = &two * sum;
    let hi = &lo + tail;
    (lo, hi)
}
