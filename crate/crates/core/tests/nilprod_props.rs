use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use nilcap::nilprod::{self, make_group, reduce, Element, GroupSpec, NilGroup};

fn specs() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(vec![
        GroupSpec::generic(2, &[2, 2]).unwrap(),
        GroupSpec::generic(2, &[3, 9]).unwrap(),
        GroupSpec::generic(2, &[4, 8, 8]).unwrap(),
        GroupSpec::generic(2, &[6, 10]).unwrap(),
        GroupSpec::generic(2, &[0, 3]).unwrap(),
        GroupSpec::generic(3, &[3, 3]).unwrap(),
        GroupSpec::generic(3, &[9, 27]).unwrap(),
        GroupSpec::generic(3, &[5, 5, 5]).unwrap(),
        GroupSpec::generic(4, &[5, 25]).unwrap(),
        GroupSpec::special(&[2, 4]).unwrap(),
        GroupSpec::special(&[4, 8]).unwrap(),
        GroupSpec::special(&[2, 2, 2]).unwrap(),
        GroupSpec::abelian(&[4, 6]).unwrap(),
    ])
}

fn raw(g: &Arc<NilGroup>, v: &[i64]) -> Element {
    reduce(g, v.iter().take(g.len()).map(|&e| BigInt::from(e)).collect()).unwrap()
}

fn exps() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-40i64..=40, 40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_axioms(spec in specs(), a in exps(), b in exps(), c in exps()) {
        let g = make_group(&spec).unwrap();
        let (a, b, c) = (raw(&g, &a), raw(&g, &b), raw(&g, &c));
        let e = nilprod::identity(&g);
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&e).unwrap(), a.clone());
        prop_assert!(a.mul(&a.inv()).unwrap().is_identity());
    }

    #[test]
    fn reduce_is_idempotent(spec in specs(), a in exps()) {
        let g = make_group(&spec).unwrap();
        let a = raw(&g, &a);
        prop_assert_eq!(reduce(&g, a.exponents().to_vec()).unwrap(), a);
    }

    #[test]
    fn parse_format_round_trip(spec in specs(), a in exps()) {
        let g = make_group(&spec).unwrap();
        let a = raw(&g, &a);
        prop_assert_eq!(nilprod::parse(&g, &nilprod::format(&a)).unwrap(), a);
    }

    #[test]
    fn codes_round_trip(spec in specs(), a in exps()) {
        let g = make_group(&spec).unwrap();
        prop_assume!(g.order_u64().is_some());
        let a = raw(&g, &a);
        prop_assert_eq!(nilprod::decode(&g, nilprod::encode(&a)), a);
    }

    #[test]
    fn closed_formulas_match_collection(spec in specs(), a in exps(), b in exps()) {
        let g = make_group(&spec).unwrap();
        let (a, b) = (raw(&g, &a), raw(&g, &b));
        prop_assert_eq!(a.mul(&b).unwrap(), a.mul_by_collection(&b).unwrap());
    }

    #[test]
    fn power_laws(spec in specs(), a in exps(), m in -30i64..=30, n in -30i64..=30) {
        let g = make_group(&spec).unwrap();
        let a = raw(&g, &a);
        prop_assert_eq!(a.pow_i(m).mul(&a.pow_i(n)).unwrap(), a.pow_i(m + n));
        prop_assert_eq!(a.pow_i(m).pow_i(n), a.pow_i(m * n));
    }

    #[test]
    fn element_order_divides_group_order(spec in specs(), a in exps()) {
        let g = make_group(&spec).unwrap();
        prop_assume!(g.order().is_some());
        let a = raw(&g, &a);
        let o = a.element_order().unwrap();
        prop_assert!(a.pow(&BigInt::from(o.clone())).is_identity());
        prop_assert!((g.order().unwrap() % &o) == BigUint::from(0u32));
        // Minimal: no proper divisor o/q kills a.
        let o64 = u64::try_from(&o).unwrap();
        for q in nilprod::prime_divisors(o64) {
            prop_assert!(!a.pow(&BigInt::from(o64 / q)).is_identity());
        }
    }

    #[test]
    fn commutator_identity(spec in specs(), a in exps(), b in exps()) {
        let g = make_group(&spec).unwrap();
        let (a, b) = (raw(&g, &a), raw(&g, &b));
        let c = a.comm(&b).unwrap();
        prop_assert_eq!(b.mul(&a).unwrap().mul(&c).unwrap(), a.mul(&b).unwrap());
    }
}
