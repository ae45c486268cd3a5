//! Seeded random games for property suites and the reproduction checks.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::games::{GameSpec, Scheme};
use crate::graphgames::WeightedGraph;
use crate::rational::{frac, int, Rational};
use crate::valuations::{Coalition, Valuation, ValuationKind};
use crate::Result;

const KINDS: [ValuationKind; 4] = [
    ValuationKind::Table,
    ValuationKind::Additive,
    ValuationKind::Concave,
    ValuationKind::Coverage,
];

/// How degenerate the drawn valuations may be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Zero weights, flat stretches and hyperedges allowed.
    General,
    /// Every marginal value a player can face when joining a party is
    /// positive: positive weights and increments, ordinary coverage graphs
    /// without isolated vertices, and no coverage valuation when `m = 1`.
    Strict,
    /// `Strict`, and every nonempty coalition is worth at least 1.
    UnitFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    pub min_players: usize,
    pub max_players: usize,
    pub max_parties: usize,
    pub profile: Profile,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            min_players: 2,
            max_players: 5,
            max_parties: 3,
            profile: Profile::General,
        }
    }
}

/// `k/d` with `k` in `lo..=hi` and `d` in `1..=4`.
fn draw(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    frac(rng.gen_range(lo..=hi), rng.gen_range(1..=4))
}

/// A weight that is zero only under the general profile, and at least 1
/// under the unit-floor profile.
fn weight(rng: &mut ChaCha8Rng, profile: Profile) -> Rational {
    match profile {
        Profile::General => draw(rng, 0, 6),
        Profile::Strict => draw(rng, 1, 6),
        Profile::UnitFloor => int(1) + draw(rng, 0, 6),
    }
}

/// Random graph on `n ≥ 2` vertices with positive rational weights.
/// Without hyperedges every vertex gets at least one edge.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, hyperedges: bool, profile: Profile) -> Result<WeightedGraph> {
    assert!(n >= 2, "graphs need two vertices");
    let positive = match profile {
        Profile::General => Profile::Strict,
        p => p,
    };
    let mut sets = BTreeSet::new();
    let target = rng.gen_range(1..=n + 2);
    let vertices: Vec<usize> = (0..n).collect();
    for _ in 0..target {
        let size = if hyperedges && n >= 3 && rng.gen_bool(0.3) { 3 } else { 2 };
        let mut ends: Vec<usize> = vertices.choose_multiple(rng, size).copied().collect();
        ends.sort_unstable();
        sets.insert(ends);
    }
    if !hyperedges {
        for v in 0..n {
            if !sets.iter().any(|e| e.contains(&v)) {
                let mut u = rng.gen_range(0..n - 1);
                if u >= v {
                    u += 1;
                }
                let mut e = vec![u, v];
                e.sort_unstable();
                sets.insert(e);
            }
        }
    }
    let edges = sets.into_iter().map(|e| (e, weight(rng, positive))).collect();
    WeightedGraph::new(n, edges)
}

/// Random monotone submodular valuation of the given kind over `0..n`.
pub fn random_valuation(rng: &mut ChaCha8Rng, n: usize, kind: ValuationKind, profile: Profile) -> Result<Valuation> {
    match kind {
        ValuationKind::Additive => Valuation::additive((0..n).map(|_| weight(rng, profile)).collect()),
        ValuationKind::Concave => {
            let mut steps: Vec<Rational> = (0..n)
                .map(|_| match profile {
                    Profile::General => draw(rng, 0, 6),
                    _ => draw(rng, 1, 6),
                })
                .collect();
            steps.sort_unstable_by(|a, b| b.cmp(a));
            if profile == Profile::UnitFloor {
                steps[0] += int(1);
            }
            let mut profile_values = vec![Rational::zero()];
            for s in steps {
                let next = profile_values.last().expect("starts with c_0") + s;
                profile_values.push(next);
            }
            Valuation::concave(profile_values)
        }
        ValuationKind::Coverage => {
            let hyper = profile == Profile::General;
            Ok(Valuation::coverage(Arc::new(random_graph(rng, n, hyper, profile)?)))
        }
        ValuationKind::Table => {
            // Budget-additive part plus an additive part.
            let capped: Vec<Rational> = (0..n).map(|_| draw(rng, 0, 6)).collect();
            let budget = draw(rng, 1, 8);
            let linear: Vec<Rational> = (0..n).map(|_| weight(rng, profile)).collect();
            Valuation::from_fn(n, |s: Coalition| {
                let load: Rational = s.iter().map(|i| &capped[i]).sum();
                let extra: Rational = s.iter().map(|i| &linear[i]).sum();
                load.min(budget.clone()) + extra
            })
        }
    }
}

/// One random game; `index` selects the stream so games are independent of
/// how many were drawn before.
pub fn random_game(scheme: Scheme, seed: u64, index: u64, config: &CorpusConfig) -> Result<GameSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(config.min_players..=config.max_players);
    let m = rng.gen_range(1..=config.max_parties.min(n));
    let valuations = (0..m)
        .map(|j| {
            let mut kind = KINDS[(index as usize + j) % KINDS.len()];
            if kind == ValuationKind::Coverage && m == 1 && config.profile != Profile::General {
                kind = ValuationKind::Table;
            }
            random_valuation(&mut rng, n, kind, config.profile)
        })
        .collect::<Result<Vec<_>>>()?;
    GameSpec::new(scheme, n, valuations)
}

/// `count` games drawn with `random_game` from streams `0..count`.
pub fn corpus(scheme: Scheme, count: usize, seed: u64, config: &CorpusConfig) -> Result<Vec<GameSpec>> {
    (0..count as u64).map(|k| random_game(scheme, seed, k, config)).collect()
}
