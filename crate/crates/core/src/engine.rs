//! Scaled-integer evaluation of payoffs and potentials.
//!
//! Every party valuation is tabulated over all subsets and multiplied by the
//! common denominator `D` of its entries. All quantities are then integers in
//! units of `1 / (D · n!)`: the `n!` factor absorbs the Shapley weights. The
//! fast path uses `i128` when the magnitudes leave enough headroom and falls
//! back to `BigInt` otherwise.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::games::{Scheme, State, Strategy};
use crate::rational::Rational;
use crate::valuations::Valuation;
use crate::Result;

pub(crate) trait Scalar:
    Clone
    + Ord
    + Debug
    + Send
    + Sync
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + 'static
{
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    /// `self · p > other · q`.
    fn mul_gt(&self, p: &BigInt, other: &Self, q: &BigInt) -> bool;
}

impl Scalar for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn mul_gt(&self, p: &BigInt, other: &Self, q: &BigInt) -> bool {
        let fast = p.to_i128().zip(q.to_i128()).and_then(|(p, q)| {
            let lhs = self.checked_mul(p)?;
            let rhs = other.checked_mul(q)?;
            Some(lhs > rhs)
        });
        fast.unwrap_or_else(|| BigInt::from(*self) * p > BigInt::from(*other) * q)
    }
}

impl Scalar for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }

    fn mul_gt(&self, p: &BigInt, other: &Self, q: &BigInt) -> bool {
        self * p > other * q
    }
}

#[derive(Clone)]
pub(crate) struct Tables<T> {
    pub n: usize,
    pub m: usize,
    pub scheme: Scheme,
    values: Vec<Vec<T>>,
    factorial_n: T,
    /// `[q][k] = n! · k!(q−k−1)!/q!`, Shapley payoff weight.
    shapley_payoff: Vec<Vec<T>>,
    /// `[q][k] = n! · (k−1)!(q−k)!/q!`, Shapley potential weight (`k ≥ 1`).
    shapley_potential: Vec<Vec<T>>,
}

#[derive(Clone)]
pub(crate) enum Compiled {
    Fast(Tables<i128>),
    Exact(Tables<BigInt>),
}

#[derive(Clone)]
pub(crate) struct Engine {
    pub compiled: Compiled,
    /// Value of one engine unit is `1 / scale`.
    scale: BigInt,
}

/// Runs `$body` against whichever integer representation the engine uses.
macro_rules! dispatch {
    ($engine:expr, $t:ident => $body:expr) => {
        match &$engine.compiled {
            $crate::engine::Compiled::Fast($t) => $body,
            $crate::engine::Compiled::Exact($t) => $body,
        }
    };
}
pub(crate) use dispatch;

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

const FAST_PATH_BITS: u64 = 100;

impl Engine {
    pub fn compile(scheme: Scheme, n: usize, valuations: &[Valuation]) -> Result<Engine> {
        let tables: Vec<Vec<Rational>> = valuations
            .iter()
            .map(|v| v.tabulate())
            .collect::<Result<_>>()?;
        let denom = tables
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let scaled: Vec<Vec<BigInt>> = tables
            .iter()
            .map(|t| t.iter().map(|r| r.numer() * (&denom / r.denom())).collect())
            .collect();
        let nf = factorial(n);
        let payoff_w: Vec<Vec<BigInt>> = (0..=n)
            .map(|q| {
                (0..q)
                    .map(|k| &nf * factorial(k) * factorial(q - k - 1) / factorial(q))
                    .collect()
            })
            .collect();
        let potential_w: Vec<Vec<BigInt>> = (0..=n)
            .map(|q| {
                (0..=q)
                    .map(|k| {
                        if k == 0 {
                            BigInt::zero()
                        } else {
                            &nf * factorial(k - 1) * factorial(q - k) / factorial(q)
                        }
                    })
                    .collect()
            })
            .collect();

        let max_value = scaled
            .iter()
            .flatten()
            .map(|v| v.abs())
            .max()
            .unwrap_or_default();
        // Sums over parties and harmonic-weighted potentials stay below
        // max · n! · 2^(log2(m) + log2(n) + 2).
        let headroom = &max_value * &nf * BigInt::from(4 * (n + 1) * (valuations.len() + 1));
        let scale = &denom * &nf;

        fn make<T: Scalar>(
            scheme: Scheme,
            n: usize,
            scaled: &[Vec<BigInt>],
            nf: &BigInt,
            pw: &[Vec<BigInt>],
            qw: &[Vec<BigInt>],
        ) -> Tables<T> {
            let conv = |b: &BigInt| T::from_big(b).expect("checked headroom");
            Tables {
                n,
                m: scaled.len(),
                scheme,
                values: scaled.iter().map(|t| t.iter().map(conv).collect()).collect(),
                factorial_n: conv(nf),
                shapley_payoff: pw.iter().map(|r| r.iter().map(conv).collect()).collect(),
                shapley_potential: qw.iter().map(|r| r.iter().map(conv).collect()).collect(),
            }
        }

        let compiled = if headroom.bits() <= FAST_PATH_BITS {
            Compiled::Fast(make(scheme, n, &scaled, &nf, &payoff_w, &potential_w))
        } else {
            Compiled::Exact(make(scheme, n, &scaled, &nf, &payoff_w, &potential_w))
        };
        Ok(Engine { compiled, scale })
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn to_rational<T: Scalar>(&self, x: &T) -> Rational {
        Rational::new(x.to_big(), self.scale.clone())
    }

    #[cfg(test)]
    pub fn is_fast(&self) -> bool {
        matches!(self.compiled, Compiled::Fast(_))
    }
}

impl<T: Scalar> Tables<T> {
    fn value(&self, party: usize, mask: u64) -> &T {
        &self.values[party][mask as usize]
    }

    /// `n! · (V(base ∪ i) − V(base))`.
    pub fn marginal(&self, party: usize, base: u64, i: usize) -> T {
        let t = &self.values[party];
        (t[(base | 1 << i) as usize].clone() - t[base as usize].clone()) * self.factorial_n.clone()
    }

    /// Shapley payoff of `i` in a party whose other members are `others`.
    fn shapley(&self, party: usize, others: u64, i: usize) -> T {
        let t = &self.values[party];
        let weights = &self.shapley_payoff[others.count_ones() as usize + 1];
        let mut total = T::zero();
        let mut sub = others;
        loop {
            let gain = t[(sub | 1 << i) as usize].clone() - t[sub as usize].clone();
            total += weights[sub.count_ones() as usize].clone() * gain;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        total
    }

    fn shapley_party_potential(&self, party: usize, members: u64) -> T {
        let t = &self.values[party];
        let weights = &self.shapley_potential[members.count_ones() as usize];
        let mut total = T::zero();
        let mut sub = members;
        while sub != 0 {
            total += weights[sub.count_ones() as usize].clone() * t[sub as usize].clone();
            sub = (sub - 1) & members;
        }
        total
    }

    /// Partition-game payoff of `i` in `party` next to `others`.
    pub fn member_payoff(&self, party: usize, others: u64, i: usize) -> T {
        match self.scheme {
            Scheme::Shapley => self.shapley(party, others, i),
            _ => self.marginal(party, others, i),
        }
    }

    pub fn party_value(&self, party: usize, mask: u64) -> T {
        self.value(party, mask).clone() * self.factorial_n.clone()
    }

    pub fn total_profit(&self, masks: &[u64]) -> T {
        masks
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &q)| acc + self.party_value(j, q))
    }

    pub fn potential(&self, masks: &[u64]) -> T {
        match self.scheme {
            Scheme::FairValue | Scheme::LaborUnion => self.total_profit(masks),
            Scheme::Shapley => masks
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &q)| acc + self.shapley_party_potential(j, q)),
        }
    }

    pub fn payoff(&self, state: &State, masks: &[u64], i: usize) -> T {
        match state {
            State::Partition(p) => {
                let j = p.assignment()[i];
                self.member_payoff(j, masks[j] & !(1 << i), i)
            }
            State::Ordered(o) => match o.position(i) {
                None => T::zero(),
                Some((j, pos)) => {
                    let pred = o.sequences()[j][..pos]
                        .iter()
                        .fold(0u64, |acc, &p| acc | 1 << p);
                    self.marginal(j, pred, i)
                }
            },
        }
    }

    /// Payoff `i` would receive after unilaterally switching to `target`,
    /// which must differ from its current strategy.
    pub fn payoff_after_move(&self, masks: &[u64], i: usize, target: Strategy) -> T {
        match target {
            Strategy::Unaffiliated => T::zero(),
            Strategy::Party(k) => self.member_payoff(k, masks[k], i),
        }
    }

    /// Candidate strategies in tie-break order.
    pub fn strategies(&self) -> impl Iterator<Item = Strategy> {
        let unaffiliated = (self.scheme == Scheme::LaborUnion).then_some(Strategy::Unaffiliated);
        unaffiliated
            .into_iter()
            .chain((0..self.m).map(Strategy::Party))
    }

    /// Best response of `i`: `(strategy, best payoff, current payoff)`. The
    /// current strategy is kept unless some other strategy is strictly better;
    /// among strictly better ones the first in tie-break order wins.
    pub fn best_response(&self, state: &State, masks: &[u64], i: usize) -> (Strategy, T, T) {
        let current = state.strategy(i);
        let now = self.payoff(state, masks, i);
        let mut best = (current, now.clone());
        for target in self.strategies() {
            if target == current {
                continue;
            }
            let p = self.payoff_after_move(masks, i, target);
            if p > best.1 {
                best = (target, p);
            }
        }
        (best.0, best.1, now)
    }
}
