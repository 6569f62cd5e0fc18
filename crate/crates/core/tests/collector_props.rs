use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use nilcap::collector::{free_group, magnus_multiply, FreeNilElement, FreeNilpotentGroup};

fn group(r: usize, k: usize) -> Arc<FreeNilpotentGroup> {
    free_group(r, k).unwrap()
}

fn element(g: &Arc<FreeNilpotentGroup>, v: &[i64]) -> FreeNilElement {
    g.element(v.iter().take(g.len()).map(|&e| BigInt::from(e)).collect()).unwrap()
}

fn shapes() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (2, 5)])
}

fn exps() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn associative((r, k) in shapes(), a in exps(), b in exps(), c in exps()) {
        let g = group(r, k);
        let (a, b, c) = (element(&g, &a), element(&g, &b[3..]), element(&g, &c[7..]));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_and_identity((r, k) in shapes(), a in exps()) {
        let g = group(r, k);
        let a = element(&g, &a);
        prop_assert!(a.multiply(&a.inverse()).unwrap().is_identity());
        prop_assert!(a.inverse().multiply(&a).unwrap().is_identity());
        prop_assert_eq!(a.multiply(&g.identity()).unwrap(), a.clone());
    }

    // Collection agrees with multiplication in the Magnus embedding.
    #[test]
    fn collection_matches_magnus((r, k) in shapes(), a in exps(), b in exps()) {
        let g = group(r, k);
        let (a, b) = (element(&g, &a), element(&g, &b));
        prop_assert_eq!(a.multiply(&b).unwrap(), magnus_multiply(&a, &b).unwrap());
    }

    #[test]
    fn powers_add((r, k) in shapes(), a in exps(), m in -9i64..=9, n in -9i64..=9) {
        let g = group(r, k);
        let a = element(&g, &a);
        let lhs = a.power(&BigInt::from(m)).multiply(&a.power(&BigInt::from(n))).unwrap();
        prop_assert_eq!(lhs, a.power(&BigInt::from(m + n)));
    }

    // Commutators of elements of weight u and v have weight at least u + v.
    #[test]
    fn commutator_weight((r, k) in shapes(), a in exps(), b in exps()) {
        let g = group(r, k);
        let (a, b) = (element(&g, &a), element(&g, &b));
        let c = a.commutator(&b).unwrap();
        prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap().multiply(&c).unwrap());
        if !c.is_identity() {
            prop_assert!(c.weight_of() >= a.weight_of());
        }
    }
}
