//! Non-decreasing submodular set functions `v: 2^N → Q≥0` with `v(∅) = 0`.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graphgames::WeightedGraph;
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Largest ground set an explicit table may cover.
pub const MAX_TABLE_PLAYERS: usize = 20;
/// Largest ground set any valuation may cover.
pub const MAX_PLAYERS: usize = 64;
/// Exhaustive monotonicity limit.
pub const EXHAUSTIVE_MONOTONE_LIMIT: usize = 16;
/// Exhaustive submodularity limit; sampled between this and the monotone limit.
pub const EXHAUSTIVE_SUBMODULAR_LIMIT: usize = 12;

const MAX_RECORDED_VIOLATIONS: usize = 64;
const LEMMA_SAMPLES: usize = 256;
const SUBMODULAR_SAMPLES: usize = 200_000;

/// A set of players, stored as a bitmask (bit `i` ⇔ player `i`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(player: usize) -> Self {
        Coalition(1 << player)
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        Coalition(players.into_iter().fold(0, |acc, p| acc | (1 << p)))
    }

    /// All players `0..n`.
    pub fn full(n: usize) -> Self {
        Coalition(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn contains(self, player: usize) -> bool {
        player < 64 && self.0 >> player & 1 == 1
    }

    pub fn with(self, player: usize) -> Self {
        Coalition(self.0 | 1 << player)
    }

    pub fn without(self, player: usize) -> Self {
        Coalition(self.0 & !(1 << player))
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Highest member index plus one (0 for the empty set).
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Renders 1-based, as in the file formats: `{1,3}`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", members.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValuationKind {
    Table,
    Additive,
    Concave,
    Coverage,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `values[mask]` for every subset mask of the ground set.
    Table(Vec<Rational>),
    Additive(Vec<Rational>),
    /// `values[k]` is the value of any coalition of size `k`.
    Concave(Vec<Rational>),
    Coverage(Arc<WeightedGraph>),
}

/// Profit function of a party. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    n: usize,
    repr: Repr,
}

impl Valuation {
    /// Explicit table indexed by subset bitmask; exactly `2^n` non-negative
    /// entries with `values[0] = 0`.
    pub fn table(n: usize, values: Vec<Rational>) -> Result<Self> {
        if n > MAX_TABLE_PLAYERS {
            return Err(Error::TooLarge {
                what: "explicit table ground set",
                size: n as u128,
                limit: MAX_TABLE_PLAYERS as u128,
            });
        }
        if values.len() != 1 << n {
            return Err(Error::parse(
                "values",
                format!("expected {} entries for n = {n}, got {}", 1usize << n, values.len()),
            ));
        }
        if !values[0].is_zero() {
            return Err(Error::parse("values/0", "v(∅) must be 0"));
        }
        if let Some(k) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::parse(format!("values/{k}"), "negative value"));
        }
        Ok(Valuation {
            n,
            repr: Repr::Table(values),
        })
    }

    /// `v(S) = Σ_{i∈S} w_i` with non-negative weights.
    pub fn additive(weights: Vec<Rational>) -> Result<Self> {
        if weights.len() > MAX_PLAYERS {
            return Err(Error::TooLarge {
                what: "ground set",
                size: weights.len() as u128,
                limit: MAX_PLAYERS as u128,
            });
        }
        if let Some(k) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::parse(format!("weights/{k}"), "negative weight"));
        }
        Ok(Valuation {
            n: weights.len(),
            repr: Repr::Additive(weights),
        })
    }

    /// `v(S) = c_{|S|}` for a non-decreasing concave profile `c_0 = 0, …, c_n`.
    pub fn concave(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::parse("values", "profile needs at least c_0"));
        }
        let n = values.len() - 1;
        if n > MAX_PLAYERS {
            return Err(Error::TooLarge {
                what: "ground set",
                size: n as u128,
                limit: MAX_PLAYERS as u128,
            });
        }
        if !values[0].is_zero() {
            return Err(Error::parse("values/0", "c_0 must be 0"));
        }
        for k in 1..values.len() {
            let step = &values[k] - &values[k - 1];
            if step.is_negative() {
                return Err(Error::parse(format!("values/{k}"), "profile decreases"));
            }
            if k >= 2 && step > &values[k - 1] - &values[k - 2] {
                return Err(Error::parse(format!("values/{k}"), "increments must not grow"));
            }
        }
        Ok(Valuation {
            n,
            repr: Repr::Concave(values),
        })
    }

    /// Coverage function of a weighted (hyper)graph: total weight of edges
    /// with at least one endpoint in the coalition.
    pub fn coverage(graph: Arc<WeightedGraph>) -> Self {
        Valuation {
            n: graph.vertex_count(),
            repr: Repr::Coverage(graph),
        }
    }

    /// Tabulates `f` over all subsets of `0..n` into an explicit table.
    pub fn from_fn(n: usize, f: impl Fn(Coalition) -> Rational) -> Result<Self> {
        if n > MAX_TABLE_PLAYERS {
            return Err(Error::TooLarge {
                what: "explicit table ground set",
                size: n as u128,
                limit: MAX_TABLE_PLAYERS as u128,
            });
        }
        let values = (0..1u64 << n).map(|m| f(Coalition(m))).collect();
        Valuation::table(n, values)
    }

    pub fn ground_set_size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ValuationKind {
        match self.repr {
            Repr::Table(_) => ValuationKind::Table,
            Repr::Additive(_) => ValuationKind::Additive,
            Repr::Concave(_) => ValuationKind::Concave,
            Repr::Coverage(_) => ValuationKind::Coverage,
        }
    }

    /// Table entries, additive weights or concave profile, depending on kind.
    pub fn values(&self) -> Option<&[Rational]> {
        match &self.repr {
            Repr::Table(v) | Repr::Additive(v) | Repr::Concave(v) => Some(v),
            Repr::Coverage(_) => None,
        }
    }

    pub fn graph(&self) -> Option<&Arc<WeightedGraph>> {
        match &self.repr {
            Repr::Coverage(g) => Some(g),
            _ => None,
        }
    }

    pub fn eval(&self, coalition: Coalition) -> Result<Rational> {
        self.check(coalition)?;
        Ok(self.eval_unchecked(coalition))
    }

    /// `v(I ∪ {i}) − v(I)`.
    pub fn marginal(&self, coalition: Coalition, player: usize) -> Result<Rational> {
        self.check(coalition)?;
        if player >= self.n {
            return Err(Error::InvalidCoalition { player, n: self.n });
        }
        if coalition.contains(player) {
            return Err(Error::invalid(format!(
                "player {} already in coalition {coalition}",
                player + 1
            )));
        }
        Ok(self.eval_unchecked(coalition.with(player)) - self.eval_unchecked(coalition))
    }

    fn check(&self, coalition: Coalition) -> Result<()> {
        if coalition.span() > self.n {
            return Err(Error::InvalidCoalition {
                player: coalition.span() - 1,
                n: self.n,
            });
        }
        Ok(())
    }

    pub(crate) fn eval_unchecked(&self, c: Coalition) -> Rational {
        match &self.repr {
            Repr::Table(v) => v[c.0 as usize].clone(),
            Repr::Additive(w) => c.iter().map(|i| &w[i]).sum(),
            Repr::Concave(v) => v[c.len()].clone(),
            Repr::Coverage(g) => g.covered_weight(c),
        }
    }

    /// All `2^n` values, indexed by subset mask.
    pub fn tabulate(&self) -> Result<Vec<Rational>> {
        if self.n > MAX_TABLE_PLAYERS {
            return Err(Error::TooLarge {
                what: "tabulated ground set",
                size: self.n as u128,
                limit: MAX_TABLE_PLAYERS as u128,
            });
        }
        if let Repr::Table(v) = &self.repr {
            return Ok(v.clone());
        }
        Ok((0..1u64 << self.n)
            .map(|m| self.eval_unchecked(Coalition(m)))
            .collect())
    }

    /// Checks monotonicity, submodularity and the subadditivity of marginals
    /// over disjoint pairs; the last two are sampled beyond the exhaustive
    /// limit.
    pub fn validate(&self) -> Result<ValidationReport> {
        if self.n > EXHAUSTIVE_MONOTONE_LIMIT {
            return Err(Error::TooLarge {
                what: "exhaustive validation ground set",
                size: self.n as u128,
                limit: EXHAUSTIVE_MONOTONE_LIMIT as u128,
            });
        }
        let table = self.tabulate()?;
        let mut report = ValidationReport::default();
        check_monotone(self.n, &table, &mut report);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let eval = |c: Coalition| table[c.0 as usize].clone();
        if self.n <= EXHAUSTIVE_SUBMODULAR_LIMIT {
            check_submodular_exhaustive(self.n, &table, &mut report);
            check_disjoint_exhaustive(self.n, &eval, &mut report);
            report.submodular_exhaustive = true;
        } else {
            check_submodular_sampled(self.n, &eval, &mut rng, &mut report);
            sample_disjoint_pairs(self.n, &eval, &mut rng, &mut report);
        }
        report.finish();
        Ok(report)
    }

    /// Seeded randomized validation for ground sets beyond the exhaustive limit.
    pub fn validate_sampled(&self, seed: u64, samples: usize) -> ValidationReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = ValidationReport::default();
        let eval = |c: Coalition| self.eval_unchecked(c);
        let full = Coalition::full(self.n).0;
        for _ in 0..samples {
            let i = rng.gen_range(0..self.n);
            let set = Coalition(rng.gen::<u64>() & full).without(i);
            let (lhs, rhs) = (eval(set), eval(set.with(i)));
            if lhs > rhs {
                report.push(Violation {
                    kind: ViolationKind::Monotonicity,
                    smaller: set,
                    larger: set.with(i),
                    player: None,
                    lhs,
                    rhs,
                });
            }
        }
        check_submodular_sampled(self.n, &eval, &mut rng, &mut report);
        sample_disjoint_pairs(self.n, &eval, &mut rng, &mut report);
        report.finish();
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `v(smaller) > v(larger)` with `smaller ⊂ larger`.
    Monotonicity,
    /// `v(smaller+i) − v(smaller) < v(larger+i) − v(larger)`.
    Submodularity,
    /// `Σ_{x∈X} (v(Y+x) − v(Y)) < v(Y∪X) − v(Y)` with `smaller = X`, `larger = Y`.
    DisjointMarginals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub smaller: Coalition,
    pub larger: Coalition,
    pub player: Option<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lhs, rhs) = (rational::format(&self.lhs), rational::format(&self.rhs));
        match self.kind {
            ViolationKind::Monotonicity => write!(
                f,
                "monotonicity: v({}) = {lhs} > v({}) = {rhs}",
                self.smaller, self.larger
            ),
            ViolationKind::Submodularity => write!(
                f,
                "submodularity: I = {}, J = {}, i = {}: {lhs} < {rhs}",
                self.smaller,
                self.larger,
                self.player.map_or(0, |p| p + 1)
            ),
            ViolationKind::DisjointMarginals => write!(
                f,
                "disjoint marginals: X = {}, Y = {}: {lhs} < {rhs}",
                self.smaller, self.larger
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub monotone: bool,
    pub submodular: bool,
    /// False when submodularity was only sampled.
    pub submodular_exhaustive: bool,
    pub disjoint_pairs_checked: usize,
    /// First violations found (capped); empty iff both flags hold.
    pub violations: Vec<Violation>,
    mono_bad: bool,
    sub_bad: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.monotone && self.submodular
    }

    fn push(&mut self, v: Violation) {
        match v.kind {
            ViolationKind::Monotonicity => self.mono_bad = true,
            _ => self.sub_bad = true,
        }
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    fn finish(&mut self) {
        self.monotone = !self.mono_bad;
        self.submodular = !self.sub_bad;
    }
}

fn check_monotone(n: usize, table: &[Rational], report: &mut ValidationReport) {
    // Single-element steps suffice: I ⊂ J is a chain of additions.
    for mask in 0..1u64 << n {
        for i in 0..n {
            if mask >> i & 1 == 1 {
                continue;
            }
            let (lhs, rhs) = (&table[mask as usize], &table[(mask | 1 << i) as usize]);
            if lhs > rhs {
                report.push(Violation {
                    kind: ViolationKind::Monotonicity,
                    smaller: Coalition(mask),
                    larger: Coalition(mask | 1 << i),
                    player: None,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                });
            }
        }
    }
}

fn check_submodular_exhaustive(n: usize, table: &[Rational], report: &mut ValidationReport) {
    // Diminishing returns between I and I+k for every extra k is equivalent
    // to the condition for every I ⊂ J.
    for mask in 0..1u64 << n {
        for k in 0..n {
            if mask >> k & 1 == 1 {
                continue;
            }
            let bigger = mask | 1 << k;
            for i in 0..n {
                if bigger >> i & 1 == 1 {
                    continue;
                }
                let lhs = &table[(mask | 1 << i) as usize] - &table[mask as usize];
                let rhs = &table[(bigger | 1 << i) as usize] - &table[bigger as usize];
                if lhs < rhs {
                    report.push(Violation {
                        kind: ViolationKind::Submodularity,
                        smaller: Coalition(mask),
                        larger: Coalition(bigger),
                        player: Some(i),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
}

fn check_submodular_sampled(
    n: usize,
    eval: &dyn Fn(Coalition) -> Rational,
    rng: &mut ChaCha8Rng,
    report: &mut ValidationReport,
) {
    if n < 2 {
        return;
    }
    let full = Coalition::full(n).0;
    for _ in 0..SUBMODULAR_SAMPLES.min(1 << (2 * n.min(10))) {
        let i = rng.gen_range(0..n);
        let larger = Coalition(rng.gen::<u64>() & full).without(i);
        let smaller = Coalition(larger.0 & rng.gen::<u64>());
        let lhs = eval(smaller.with(i)) - eval(smaller);
        let rhs = eval(larger.with(i)) - eval(larger);
        if lhs < rhs {
            report.push(Violation {
                kind: ViolationKind::Submodularity,
                smaller,
                larger,
                player: Some(i),
                lhs,
                rhs,
            });
        }
    }
}

fn sample_disjoint_pairs(
    n: usize,
    eval: &dyn Fn(Coalition) -> Rational,
    rng: &mut ChaCha8Rng,
    report: &mut ValidationReport,
) {
    if n == 0 {
        return;
    }
    let full = Coalition::full(n).0;
    for _ in 0..LEMMA_SAMPLES {
        let y = Coalition(rng.gen::<u64>() & full);
        let x = Coalition(rng.gen::<u64>() & full & !y.0);
        if x.is_empty() {
            continue;
        }
        report.disjoint_pairs_checked += 1;
        if let Some(v) = disjoint_pair_violation(eval, x, y) {
            report.push(v);
        }
    }
}

fn check_disjoint_exhaustive(n: usize, eval: &dyn Fn(Coalition) -> Rational, report: &mut ValidationReport) {
    let full = Coalition::full(n).0;
    for y in 0..=full {
        let rest = full & !y;
        // Nonempty submasks of the complement.
        let mut x = rest;
        while x != 0 {
            report.disjoint_pairs_checked += 1;
            if let Some(v) = disjoint_pair_violation(eval, Coalition(x), Coalition(y)) {
                report.push(v);
            }
            x = (x - 1) & rest;
        }
    }
}

fn disjoint_pair_violation(
    eval: &dyn Fn(Coalition) -> Rational,
    x: Coalition,
    y: Coalition,
) -> Option<Violation> {
    let base = eval(y);
    let lhs: Rational = x.iter().map(|xi| eval(y.with(xi)) - &base).sum();
    let rhs = eval(y.union(x)) - &base;
    (lhs < rhs).then_some(Violation {
        kind: ViolationKind::DisjointMarginals,
        smaller: x,
        larger: y,
        player: None,
        lhs,
        rhs,
    })
}

/// Checks `Σ_{x∈X} (v(Y∪{x}) − v(Y)) ≥ v(Y∪X) − v(Y)` for every disjoint
/// pair `(X, Y)` with `X` nonempty. Returns the number of pairs checked and
/// the violations found (capped).
pub fn check_disjoint_marginals(v: &Valuation) -> Result<(usize, Vec<Violation>)> {
    let n = v.ground_set_size();
    if n > EXHAUSTIVE_SUBMODULAR_LIMIT {
        return Err(Error::TooLarge {
            what: "exhaustive disjoint-pair check ground set",
            size: n as u128,
            limit: EXHAUSTIVE_SUBMODULAR_LIMIT as u128,
        });
    }
    let table = v.tabulate()?;
    let mut report = ValidationReport::default();
    check_disjoint_exhaustive(n, &|c| table[c.0 as usize].clone(), &mut report);
    Ok((report.disjoint_pairs_checked, report.violations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn c(players: &[usize]) -> Coalition {
        Coalition::from_players(players.iter().map(|p| p - 1))
    }

    fn triangle() -> Valuation {
        let g = WeightedGraph::new(3, vec![(vec![0, 1], int(1)), (vec![1, 2], int(1)), (vec![0, 2], int(1))])
            .unwrap();
        Valuation::coverage(Arc::new(g))
    }

    #[test]
    fn eval_examples() {
        let add = Valuation::additive(vec![frac(1, 3), frac(1, 2), frac(1, 2)]).unwrap();
        assert_eq!(add.eval(c(&[2, 3])).unwrap(), int(1));
        assert_eq!(add.eval(Coalition::EMPTY).unwrap(), int(0));
        assert_eq!(triangle().eval(c(&[1])).unwrap(), int(2));
        assert_eq!(triangle().eval(Coalition::EMPTY).unwrap(), int(0));
    }

    #[test]
    fn eval_rejects_out_of_range_member() {
        let add = Valuation::additive(vec![int(1); 2]).unwrap();
        assert!(matches!(add.eval(c(&[3])), Err(Error::InvalidCoalition { player: 2, n: 2 })));
    }

    #[test]
    fn marginal_examples() {
        let unit = Valuation::concave((0..=3).map(int).collect()).unwrap();
        assert_eq!(unit.marginal(c(&[1, 2]), 2).unwrap(), int(1));

        let ones = Valuation::from_fn(3, |s| if s.is_empty() { int(0) } else { int(1) }).unwrap();
        assert_eq!(ones.marginal(c(&[2]), 0).unwrap(), int(0));

        assert_eq!(triangle().marginal(c(&[3]), 1).unwrap(), int(1));
    }

    #[test]
    fn marginal_rejects_member() {
        let unit = Valuation::additive(vec![int(1); 3]).unwrap();
        assert!(matches!(unit.marginal(c(&[1]), 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn square_of_size_is_rejected_with_first_witness() {
        let sq = Valuation::from_fn(3, |s| int((s.len() * s.len()) as i64)).unwrap();
        let report = sq.validate().unwrap();
        assert!(report.monotone);
        assert!(!report.submodular);
        let w = report
            .violations
            .iter()
            .find(|v| v.kind == ViolationKind::Submodularity)
            .unwrap();
        assert_eq!((w.smaller, w.larger, w.player), (Coalition::EMPTY, c(&[1]), Some(1)));
        assert_eq!((w.lhs.clone(), w.rhs.clone()), (int(1), int(3)));
    }

    #[test]
    fn decreasing_table_is_not_monotone() {
        let v = Valuation::table(1, vec![int(0), int(0)]).unwrap();
        assert!(v.validate().unwrap().is_valid());
        let bad = Valuation::table(2, vec![int(0), int(2), int(2), int(1)]).unwrap();
        let r = bad.validate().unwrap();
        assert!(!r.monotone);
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn table_constructor_errors() {
        assert!(matches!(
            Valuation::table(2, vec![int(1), int(0), int(0), int(0)]),
            Err(Error::Parse { .. })
        ));
        assert!(Valuation::table(2, vec![int(0); 3]).is_err());
        assert!(Valuation::table(1, vec![int(0), int(-1)]).is_err());
        assert_eq!(
            Valuation::table(1, vec![int(0), int(5)]).unwrap().eval(c(&[1])).unwrap(),
            int(5)
        );
    }

    #[test]
    fn concave_constructor_enforces_shape() {
        assert!(Valuation::concave(vec![int(0), int(1), int(3)]).is_err());
        assert!(Valuation::concave(vec![int(0), int(2), int(1)]).is_err());
        assert!(Valuation::concave(vec![int(1), int(2)]).is_err());
        assert!(Valuation::concave(vec![int(0), int(2), int(3), int(3)]).is_ok());
    }

    #[test]
    fn sampled_mode_flags_supermodular_function() {
        let n = 20;
        let sq = Valuation::concave(vec![int(0); n + 1]).unwrap();
        assert!(sq.validate().is_err());
        assert!(sq.validate_sampled(1, 1000).is_valid());
        let weights: Vec<_> = (0..n).map(|i| int(i as i64)).collect();
        assert!(Valuation::additive(weights).unwrap().validate_sampled(2, 1000).is_valid());
    }

    #[test]
    fn coalition_iteration_and_display() {
        let s = c(&[1, 3, 5]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 4]);
        assert_eq!(s.to_string(), "{1,3,5}");
        assert_eq!(s.span(), 5);
        assert!(c(&[1]).is_subset_of(s));
    }
}
