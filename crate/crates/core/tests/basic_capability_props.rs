use proptest::prelude::*;

use nilcap::basiccomm::{compare, enumerate_basic, is_basic, witt_count};
use nilcap::capability::{baer_abelian, capable_params, invariant_factors, necessary_condition, Decision};

proptest! {
    // Hall basis theorem: the number of weight-n basic commutators is Witt's count.
    #[test]
    fn hall_basis_counts(r in 1usize..=4, k in 1usize..=5) {
        let seq = enumerate_basic(r, k).unwrap();
        for w in 1..=k {
            prop_assert_eq!(seq.weight_range(w).len() as u128, witt_count(r as u128, w as u32));
        }
    }

    #[test]
    fn enumeration_is_sorted_and_basic(r in 1usize..=3, k in 1usize..=5) {
        let seq = enumerate_basic(r, k).unwrap();
        for w in seq.items().windows(2) {
            prop_assert!(is_basic(&w[0]) && is_basic(&w[1]));
            prop_assert_eq!(compare(&w[0], &w[1]).unwrap(), std::cmp::Ordering::Less);
        }
    }

    // Baer: the verdict depends only on the invariant factors.
    #[test]
    fn baer_depends_on_isomorphism_type(orders in prop::collection::vec(2u64..=36, 1..=4)) {
        let direct = baer_abelian(&orders).decision;
        prop_assert_eq!(direct, baer_abelian(&invariant_factors(&orders)).decision);
        let mut rev = orders.clone();
        rev.reverse();
        prop_assert_eq!(direct, baer_abelian(&rev).decision);
    }

    // The verdict never contradicts the necessary condition, and is invariant
    // under reordering the exponents.
    #[test]
    fn verdict_respects_necessity(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        k in 1usize..=5,
        alphas in prop::collection::vec(1u32..=4, 1..=4),
    ) {
        let v = capable_params(p, k, &alphas).unwrap();
        let mut sorted = alphas.clone();
        sorted.sort_unstable();
        if k > 1 && !necessary_condition(p, k as u64, &sorted) {
            prop_assert_eq!(v.decision, Decision::NotCapable);
        }
        let mut rev = alphas.clone();
        rev.reverse();
        prop_assert_eq!(v.decision, capable_params(p, k, &rev).unwrap().decision);
    }
}
