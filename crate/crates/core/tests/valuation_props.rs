use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use nilcap::valuation::{binom, carries_base_p, floor_log, is_prime, ord_p, ord_p_u64, prime_power_binom_valuation};

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

proptest! {
    // Kummer: ord_p C(a+b, a) = carries when adding a and b in base p.
    #[test]
    fn kummer(p in prime(), a in 0u64..400, b in 0u64..400) {
        let v = ord_p(p, &BigInt::from(binom(a + b, a))).unwrap().finite().unwrap();
        prop_assert_eq!(v, carries_base_p(p, a, b).unwrap());
    }

    #[test]
    fn ord_p_is_additive(p in prime(), a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let va = ord_p_u64(p, a).unwrap().finite().unwrap();
        let vb = ord_p_u64(p, b).unwrap().finite().unwrap();
        let vab = ord_p(p, &(BigInt::from(a) * b)).unwrap().finite().unwrap();
        prop_assert_eq!(vab, va + vb);
    }

    #[test]
    fn ord_p_of_zero_is_infinite(p in prime()) {
        prop_assert!(ord_p(p, &BigInt::zero()).unwrap().finite().is_none());
    }

    #[test]
    fn binom_symmetry_and_pascal(n in 1u64..150, m in 0u64..150) {
        let m = m % (n + 1);
        prop_assert_eq!(binom(n, m), binom(n, n - m));
        if m > 0 {
            prop_assert_eq!(binom(n, m), binom(n - 1, m - 1) + binom(n - 1, m));
        }
    }

    // ord_p C(p^n, a) = n - ord_p(a) for 0 < a <= p^n.
    #[test]
    fn prime_power_binom(p in prime(), n in 1u64..5, a in 1u64..10_000) {
        let q = p.pow(n as u32);
        let a = a % q + 1;
        let direct = ord_p(p, &BigInt::from(binom(q, a))).unwrap().finite().unwrap();
        prop_assert_eq!(prime_power_binom_valuation(p, n, a).unwrap(), direct);
        prop_assert_eq!(direct, n - ord_p_u64(p, a).unwrap().finite().unwrap());
    }

    #[test]
    fn floor_log_brackets(base in 2u64..20, m in 1u64..u32::MAX as u64) {
        let e = floor_log(base, m) as u32;
        prop_assert!(base.pow(e) <= m);
        prop_assert!((base as u128).pow(e + 1) > m as u128);
    }

    #[test]
    fn primality_by_trial_division(n in 0u64..5000) {
        let slow = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        prop_assert_eq!(is_prime(n), slow);
    }
}
