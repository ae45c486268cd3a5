//! Reproducible checks of the model's headline results over fixed
//! constructions and seeded random corpora. Each check returns a
//! `ClaimOutcome`; the CLI `reproduce` command and the acceptance tests run
//! the same functions.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    self, alpha_step_envelope, orderings, prices, strong_nash_witness, verify_niceness, PriceOptions,
    DEFAULT_STATE_BUDGET,
};
use crate::corpus::{self, random_graph, random_valuation, CorpusConfig, Profile};
use crate::dynamics::{ceil_times_ln, improvement_profile, run, DynamicsConfig, Selector};
use crate::format::{parse_game_str, ParseOptions};
use crate::games::{GameSpec, OrderedState, Scheme, State};
use crate::graphgames::GraphGames;
use crate::rational::{format as fmt, frac, int, Rational};
use crate::valuations::{check_disjoint_marginals, Valuation, ValuationKind};
use crate::Result;

/// Seed shared by every random corpus below.
pub const CORPUS_SEED: u64 = 20_240_601;
/// Games per scheme in the random corpora.
pub const CORPUS_SIZE: usize = 200;
pub const GRAPH_SAMPLES: usize = 100;
pub const RANDOM_ORDERS: u64 = 100;
const MAX_FAILURES: usize = 10;

/// A fair-value game whose price of anarchy exceeds 3/2, found by
/// `search_fair_value_poa` and stored verbatim.
pub const FAIR_VALUE_POA_FIXTURE: &str = include_str!("../fixtures/fair_value_poa.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    Prop6,
    Potential,
    PoaSweep,
    Stability,
    StepBounds,
    NSteps,
    Envelope,
    Graphs,
    Validators,
}

impl Claim {
    pub const ALL: [Claim; 9] = [
        Claim::Prop6,
        Claim::Potential,
        Claim::PoaSweep,
        Claim::Stability,
        Claim::StepBounds,
        Claim::NSteps,
        Claim::Envelope,
        Claim::Graphs,
        Claim::Validators,
    ];

    pub fn number(self) -> u8 {
        Claim::ALL.iter().position(|&c| c == self).expect("listed") as u8 + 1
    }

    /// Name used by `reproduce --case`.
    pub fn name(self) -> &'static str {
        match self {
            Claim::Prop6 => "prop6",
            Claim::Potential => "niceness",
            Claim::PoaSweep => "poa-sweep",
            Claim::Stability => "stability",
            Claim::StepBounds => "step-bounds",
            Claim::NSteps => "nsteps",
            Claim::Envelope => "envelope",
            Claim::Graphs => "graphs",
            Claim::Validators => "validators",
        }
    }

    pub fn from_name(s: &str) -> Option<Claim> {
        Claim::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn title(self) -> &'static str {
        match self {
            Claim::Prop6 => "tight Shapley construction: exact PoA and PoS for n = 3, 4, 5",
            Claim::Potential => "exact potentials (fair value, Shapley) and perfectness chain (labor union)",
            Claim::PoaSweep => "PoA and alpha-PoA bounds over the random corpus",
            Claim::Stability => "fair-value PoS = 1 and labor-union optimum is a strong equilibrium",
            Claim::StepBounds => "basic (alpha-)dynamic step bounds",
            Claim::NSteps => "labor union from scratch: equilibrium in exactly n steps",
            Claim::Envelope => "labor-union alpha-dynamic step envelope",
            Claim::Graphs => "graph closed forms and the cut identity",
            Claim::Validators => "monotone/submodular and disjoint-marginal validators",
        }
    }

    pub fn check(self) -> Result<ClaimOutcome> {
        match self {
            Claim::Prop6 => check_prop6(),
            Claim::Potential => check_potentials(),
            Claim::PoaSweep => check_poa_sweep(),
            Claim::Stability => check_stability(),
            Claim::StepBounds => check_step_bounds(),
            Claim::NSteps => check_n_steps(),
            Claim::Envelope => check_envelope(),
            Claim::Graphs => check_graphs(),
            Claim::Validators => check_validators(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimOutcome {
    pub claim: Claim,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checks: u64,
    /// First few failures, human readable.
    pub failures: Vec<String>,
    /// Named observations, e.g. the largest PoA seen.
    pub metrics: Vec<(String, String)>,
}

impl ClaimOutcome {
    fn new(claim: Claim) -> Self {
        ClaimOutcome {
            claim,
            passed: true,
            checks: 0,
            failures: Vec::new(),
            metrics: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(describe());
        }
    }

    /// Records a failure of a check already counted.
    fn fail(&mut self, text: String) {
        self.passed = false;
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(text);
        }
    }

    fn metric(&mut self, name: &str, value: impl ToString) {
        self.metrics.push((name.to_string(), value.to_string()));
    }

    /// One line: `[PASS] 3 poa-sweep: … (N checks; k=v, …)`.
    pub fn line(&self) -> String {
        let mut s = format!(
            "[{}] {} {}: {} ({} checks",
            if self.passed { "PASS" } else { "FAIL" },
            self.claim.number(),
            self.claim.name(),
            self.claim.title(),
            self.checks
        );
        for (k, v) in &self.metrics {
            s.push_str(&format!("; {k}={v}"));
        }
        s.push(')');
        s
    }
}

pub fn check_all() -> Result<Vec<ClaimOutcome>> {
    Claim::ALL.iter().map(|c| c.check()).collect()
}

/// Tight Shapley construction: `v_1` additive with weights
/// `1/n, 1/(n−1), …, 1/(n−1)`, `v_2 ≡ 1` on nonempty coalitions.
pub fn prop6_game(n: usize) -> Result<GameSpec> {
    if n < 2 {
        return Err(crate::Error::invalid("the construction needs n ≥ 2"));
    }
    let mut weights = vec![frac(1, n as i64)];
    weights.extend((1..n).map(|_| frac(1, n as i64 - 1)));
    let v1 = Valuation::additive(weights)?;
    let v2 = Valuation::concave((0..=n).map(|k| int((k > 0) as i64)).collect())?;
    GameSpec::new(Scheme::Shapley, n, vec![v1, v2])
}

fn corpus_config(profile: Profile) -> CorpusConfig {
    CorpusConfig {
        profile,
        ..CorpusConfig::default()
    }
}

/// The shared random corpus for one scheme.
pub fn random_corpus(scheme: Scheme) -> Result<Vec<GameSpec>> {
    corpus::corpus(scheme, CORPUS_SIZE, CORPUS_SEED, &corpus_config(Profile::General))
}

fn describe(game: &GameSpec, index: usize) -> String {
    format!("{} game #{index} (n={}, m={})", game.scheme(), game.players(), game.parties())
}

fn check_prop6() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::Prop6);
    for n in 3..=5 {
        let r = prices(&prop6_game(n)?, &PriceOptions::default())?;
        let k = Rational::from_integer((n as i64 + 1).into());
        let poa = int(2) - int(2) / &k;
        let pos = int(2) - int(4) / &k;
        out.expect(r.poa == poa && r.pos == pos, || {
            format!("n={n}: PoA {} PoS {}, expected {} and {}", fmt(&r.poa), fmt(&r.pos), fmt(&poa), fmt(&pos))
        });
        out.metric(&format!("n{n}"), format!("{}|{}", fmt(&r.poa), fmt(&r.pos)));
    }
    Ok(out)
}

fn check_potentials() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::Potential);
    let mut moves = 0u128;
    for scheme in [Scheme::FairValue, Scheme::Shapley, Scheme::LaborUnion] {
        for (k, g) in random_corpus(scheme)?.iter().enumerate() {
            let r = verify_niceness(g, &int(2), DEFAULT_STATE_BUDGET)?;
            moves += r.moves_checked;
            let ok = match scheme {
                Scheme::LaborUnion => r.perfect_holds,
                _ => r.exact_potential_holds,
            };
            out.expect(ok, || format!("{}: {:?}", describe(g, k), r.witnesses.first()));
        }
    }
    out.metric("moves", moves);
    Ok(out)
}

/// Searches random two-player fair-value games for a price of anarchy
/// above `threshold`.
pub fn search_fair_value_poa(threshold: &Rational, seed: u64, attempts: usize) -> Result<Option<GameSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [ValuationKind::Table, ValuationKind::Additive, ValuationKind::Concave];
    for _ in 0..attempts {
        let n = rng.gen_range(2..=3);
        let valuations = (0..2)
            .map(|_| {
                let kind = kinds[rng.gen_range(0..kinds.len())];
                random_valuation(&mut rng, n, kind, Profile::General)
            })
            .collect::<Result<Vec<_>>>()?;
        let game = GameSpec::new(Scheme::FairValue, n, valuations)?;
        if &prices(&game, &PriceOptions::default())?.poa > threshold {
            return Ok(Some(game));
        }
    }
    Ok(None)
}

pub fn fair_value_poa_fixture() -> Result<GameSpec> {
    Ok(parse_game_str(FAIR_VALUE_POA_FIXTURE, ParseOptions::default())?.game)
}

fn check_poa_sweep() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::PoaSweep);
    let alphas = [frac(1, 4), frac(1, 2)];
    for scheme in [Scheme::FairValue, Scheme::LaborUnion, Scheme::Shapley] {
        let mut worst = Rational::one();
        for (k, g) in random_corpus(scheme)?.iter().enumerate() {
            let r = prices(g, &PriceOptions::default())?;
            let bound = match scheme {
                Scheme::Shapley => int(2) - frac(1, g.players() as i64),
                _ => int(2),
            };
            out.expect(r.poa <= bound, || {
                format!("{}: PoA {} above {}", describe(g, k), fmt(&r.poa), fmt(&bound))
            });
            worst = worst.max(r.poa.clone());
            if scheme == Scheme::Shapley {
                continue;
            }
            let mut previous = r.poa;
            for alpha in &alphas {
                let ra = prices(
                    g,
                    &PriceOptions {
                        alpha: alpha.clone(),
                        ..PriceOptions::default()
                    },
                )?;
                let bound = int(2) + alpha;
                out.expect(ra.poa <= bound, || {
                    format!("{}: alpha={} PoA {} above {}", describe(g, k), fmt(alpha), fmt(&ra.poa), fmt(&bound))
                });
                out.expect(ra.poa >= previous, || {
                    format!("{}: alpha-PoA decreased to {} at alpha={}", describe(g, k), fmt(&ra.poa), fmt(alpha))
                });
                previous = ra.poa;
            }
        }
        out.metric(&format!("max_poa_{}", scheme.name()), fmt(&worst));
    }
    let fixture = fair_value_poa_fixture()?;
    let r = prices(&fixture, &PriceOptions::default())?;
    out.expect(r.poa > frac(3, 2) && r.poa <= int(2), || {
        format!("fixture PoA {} is not in (3/2, 2]", fmt(&r.poa))
    });
    out.metric("fixture_poa", fmt(&r.poa));
    Ok(out)
}

fn check_stability() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::Stability);
    for (k, g) in random_corpus(Scheme::FairValue)?.iter().enumerate() {
        let r = prices(g, &PriceOptions::default())?;
        out.expect(r.pos.is_one(), || format!("{}: PoS {}", describe(g, k), fmt(&r.pos)));
    }
    for (k, g) in random_corpus(Scheme::LaborUnion)?.iter().enumerate() {
        let opt = analysis::optimum(g, DEFAULT_STATE_BUDGET)?;
        let State::Ordered(shape) = &opt.state else { unreachable!("labor-union optimum is ordered") };
        for o in orderings(shape) {
            let state: State = o.into();
            let witness = strong_nash_witness(g, &state)?;
            out.expect(witness.is_none(), || format!("{}: {:?} refuted by {:?}", describe(g, k), state, witness));
        }
    }
    Ok(out)
}

/// Total profit after `min(steps, trace length)` steps.
fn profit_after(trace: &crate::dynamics::Trace, steps: u64) -> Rational {
    trace.total_profit_after(steps.min(trace.len() as u64) as usize).clone()
}

fn check_step_bounds() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::StepBounds);
    let epsilons = [frac(1, 2), frac(1, 4), frac(1, 10)];
    let beta = int(2);
    for scheme in [Scheme::FairValue, Scheme::LaborUnion] {
        for (k, g) in random_corpus(scheme)?.iter().enumerate() {
            let opt = analysis::optimum(g, DEFAULT_STATE_BUDGET)?.value;
            let n = Rational::from_integer(g.players().into());
            for alpha in [Rational::zero(), frac(1, 4), frac(1, 2)] {
                let rate = &beta + &alpha;
                let a = &n / &rate;
                let horizons: Vec<u64> = epsilons.iter().map(|e| ceil_times_ln(&a, &e.recip())).collect();
                let longest = *horizons.iter().max().expect("three epsilons") as usize;
                let config = DynamicsConfig::new(alpha.clone(), Selector::BasicMaxImprovement, longest.max(1))?;
                for state in analysis::enumerate_states(g, DEFAULT_STATE_BUDGET)? {
                    let trace = run(g, &state, &config)?;
                    for (eps, &t) in epsilons.iter().zip(&horizons) {
                        let target = &opt / &rate * (Rational::one() - eps);
                        let got = profit_after(&trace, t);
                        out.expect(got >= target, || {
                            format!(
                                "{}: alpha={} eps={} from {:?}: profit {} < {}",
                                describe(g, k),
                                fmt(&alpha),
                                fmt(eps),
                                state,
                                fmt(&got),
                                fmt(&target)
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Labor-union corpus in which every newcomer earns something somewhere.
pub fn strict_labor_union_corpus() -> Result<Vec<GameSpec>> {
    corpus::corpus(Scheme::LaborUnion, CORPUS_SIZE, CORPUS_SEED, &corpus_config(Profile::Strict))
}

fn check_n_steps() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::NSteps);
    let selectors = std::iter::once(Selector::RoundRobin).chain((0..RANDOM_ORDERS).map(Selector::RandomSeeded));
    let selectors: Vec<Selector> = selectors.collect();
    for (k, g) in strict_labor_union_corpus()?.iter().enumerate() {
        let start = g.initial_state();
        for &selector in &selectors {
            let trace = run(g, &start, &DynamicsConfig::new(Rational::zero(), selector, 10 * g.players())?)?;
            let nash = improvement_profile(g, &trace.final_state)?.is_nash();
            out.expect(trace.len() == g.players() && nash && trace.converged, || {
                format!("{}: {:?} took {} steps, nash={nash}", describe(g, k), selector, trace.len())
            });
        }
    }
    Ok(out)
}

/// Labor-union corpus with every nonempty coalition worth at least 1.
pub fn unit_floor_labor_union_corpus() -> Result<Vec<GameSpec>> {
    corpus::corpus(Scheme::LaborUnion, CORPUS_SIZE, CORPUS_SEED, &corpus_config(Profile::UnitFloor))
}

/// Every labor-union state in which nobody is unaffiliated.
pub fn fully_affiliated_states(game: &GameSpec) -> Vec<State> {
    analysis::partition_states(game.players(), game.parties())
        .flat_map(|p| {
            let mut sequences = vec![Vec::new(); game.parties()];
            for (i, &j) in p.assignment().iter().enumerate() {
                sequences[j].push(i);
            }
            let shape = OrderedState::new(game.players(), sequences).expect("valid partition");
            orderings(&shape).into_iter().map(State::from)
        })
        .collect()
}

fn check_envelope() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::Envelope);
    let mut max_steps = 0usize;
    let mut max_ratio = Rational::zero();
    for (k, g) in unit_floor_labor_union_corpus()?.iter().enumerate() {
        out.expect(analysis::has_unit_floor(g)?, || format!("{}: below unit floor", describe(g, k)));
        for alpha in [frac(1, 4), frac(1, 2)] {
            let envelope = alpha_step_envelope(g, &alpha)?;
            let config = DynamicsConfig::new(alpha.clone(), Selector::BasicMaxImprovement, 100_000)?;
            for state in fully_affiliated_states(g) {
                let trace = run(g, &state, &config)?;
                let verified = analysis::classify_state(g, &trace.final_state, &alpha)?.is_alpha_nash;
                out.expect(trace.converged && verified && trace.len() as u64 <= envelope, || {
                    format!(
                        "{}: alpha={} from {:?}: {} steps, envelope {envelope}, converged={}",
                        describe(g, k),
                        fmt(&alpha),
                        state,
                        trace.len(),
                        trace.converged
                    )
                });
                max_steps = max_steps.max(trace.len());
                let ratio = Rational::new(trace.len().into(), envelope.into());
                max_ratio = max_ratio.max(ratio);
            }
        }
    }
    out.metric("max_steps", max_steps);
    out.metric("max_steps_over_envelope", fmt(&max_ratio));
    Ok(out)
}

fn check_graphs() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::Graphs);
    let mut fair_value_mismatches = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    for k in 0..GRAPH_SAMPLES {
        let n = rng.gen_range(2..=6);
        let graph = Arc::new(random_graph(&mut rng, n, false, Profile::Strict)?);
        let audit = GraphGames::new(graph, 2)?.audit(DEFAULT_STATE_BUDGET, MAX_FAILURES)?;
        let failures = audit
            .closed_form_mismatches
            .iter()
            .chain(&audit.fair_value_cut_mismatches)
            .chain(&audit.cut_identity_failures);
        out.checks += audit.closed_form_checks + audit.fair_value_cut_checks + audit.cut_identity_checks;
        for f in failures {
            out.fail(format!("graph #{k}: {f}"));
        }
        fair_value_mismatches += audit.fair_value_closed_form_mismatches;
    }
    // The (A+B)/2 + C form for fair value must disagree somewhere.
    out.expect(fair_value_mismatches > 0, || "fair-value closed form never disagreed".to_string());
    out.metric("fair_value_closed_form_mismatches", fair_value_mismatches);
    Ok(out)
}

/// `v(Q) = |Q|²` on three players.
pub fn square_table() -> Result<Valuation> {
    Valuation::from_fn(3, |s| {
        let k = s.len() as i64;
        int(k * k)
    })
}

fn check_validators() -> Result<ClaimOutcome> {
    let mut out = ClaimOutcome::new(Claim::Validators);
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let kinds = [ValuationKind::Table, ValuationKind::Additive, ValuationKind::Concave, ValuationKind::Coverage];
    for n in 1..=8 {
        for kind in kinds {
            if kind == ValuationKind::Coverage && n < 2 {
                continue;
            }
            for _ in 0..3 {
                let v = random_valuation(&mut rng, n, kind, Profile::General)?;
                let report = v.validate()?;
                out.expect(report.is_valid() && report.submodular_exhaustive, || {
                    format!("{kind:?} n={n}: {:?}", report.violations.first())
                });
                let (_, violations) = check_disjoint_marginals(&v)?;
                out.expect(violations.is_empty(), || format!("{kind:?} n={n}: {}", violations[0]));
            }
        }
    }
    let report = square_table()?.validate()?;
    let w = report.violations.iter().find(|v| v.kind == crate::valuations::ViolationKind::Submodularity);
    let expected = |v: &&crate::valuations::Violation| {
        v.smaller.is_empty()
            && v.larger.iter().collect::<Vec<_>>() == [0]
            && v.player == Some(1)
            && v.lhs == int(1)
            && v.rhs == int(3)
    };
    out.expect(!report.submodular && w.is_some_and(|v| expected(&v)), || {
        format!("|Q|^2 witness: {:?}", w)
    });
    if let Some(w) = w {
        out.metric("square_witness", w.to_string().replace(' ', ""));
    }
    Ok(out)
}
