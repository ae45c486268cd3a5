//! Validator properties on every built-in constructor, checked against
//! direct subset enumeration.

use profit_share::corpus::{random_valuation, Profile};
use profit_share::rational::{int, Rational};
use profit_share::valuations::{check_disjoint_marginals, Coalition, ValuationKind};
use profit_share::Valuation;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = ValuationKind> {
    prop_oneof![
        Just(ValuationKind::Table),
        Just(ValuationKind::Additive),
        Just(ValuationKind::Concave),
        Just(ValuationKind::Coverage),
    ]
}

fn draw(seed: u64, n: usize, kind: ValuationKind) -> Valuation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_valuation(&mut rng, n, kind, Profile::General).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn constructors_are_monotone_submodular(seed in any::<u64>(), n in 2usize..=6, kind in kind()) {
        let v = draw(seed, n, kind);
        prop_assert!(v.validate().unwrap().is_valid());
        let full = 1u64 << n;
        for j in 0..full {
            let vj = v.eval(Coalition::from_bits(j)).unwrap();
            // Every I ⊆ J, walking the submasks of J.
            let mut i = j;
            loop {
                let ci = Coalition::from_bits(i);
                prop_assert!(v.eval(ci).unwrap() <= vj);
                for x in (0..n).filter(|&x| j & 1 << x == 0) {
                    let small = v.marginal(ci, x).unwrap();
                    let large = v.marginal(Coalition::from_bits(j), x).unwrap();
                    prop_assert!(small >= large);
                }
                if i == 0 {
                    break;
                }
                i = (i - 1) & j;
            }
        }
    }

    #[test]
    fn disjoint_marginals_hold_exhaustively(seed in any::<u64>(), n in 2usize..=7, kind in kind()) {
        let v = draw(seed, n, kind);
        let (pairs, violations) = check_disjoint_marginals(&v).unwrap();
        prop_assert!(violations.is_empty());
        // Disjoint pairs with X nonempty.
        prop_assert_eq!(pairs as u64, 3u64.pow(n as u32) - (1 << n));
        for y in 0u64..1 << n {
            let rest = !y & ((1 << n) - 1);
            let mut x = rest;
            while x != 0 {
                let fy = v.eval(Coalition::from_bits(y)).unwrap();
                let sum: Rational = Coalition::from_bits(x)
                    .iter()
                    .map(|p| v.eval(Coalition::from_bits(y | 1 << p)).unwrap() - &fy)
                    .sum();
                prop_assert!(sum >= v.eval(Coalition::from_bits(x | y)).unwrap() - &fy);
                x = (x - 1) & rest;
            }
        }
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>(), n in 1usize..=6, mask in any::<u64>()) {
        let v = draw(seed, n, ValuationKind::Table);
        let c = Coalition::from_bits(mask & ((1 << n) - 1));
        prop_assert_eq!(v.eval(c).unwrap(), v.eval(c).unwrap());
        prop_assert_eq!(v.eval(Coalition::from_bits(0)).unwrap(), int(0));
    }
}

#[test]
fn sampled_mode_catches_square_table() {
    let v = Valuation::from_fn(14, |s| int((s.len() * s.len()) as i64)).unwrap();
    let report = v.validate_sampled(5, 2000);
    assert!(!report.submodular);
    assert!(!report.submodular_exhaustive);
}
