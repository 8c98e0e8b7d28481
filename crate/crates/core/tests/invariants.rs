use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use smoothsum::characters::{CharValue, DirichletCharacter};
use smoothsum::congruence::{count_roots_bruteforce, count_roots_lifting};
use smoothsum::differencing::{fourier_interval_bound, pair_count};
use smoothsum::modarith::{crt, factor_u64, gcd, is_prime};
use smoothsum::periodic::summand;
use smoothsum::poly::Polynomial;
use smoothsum::RationalFunction;

fn odd_modulus() -> impl Strategy<Value = u64> {
    (1u64..20_000).prop_map(|n| 2 * n + 1)
}

fn char_for(q: u64, seed: u64) -> DirichletCharacter {
    DirichletCharacter::random(q, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorization_recombines(n in 1u64..10_000_000) {
        let f = factor_u64(n);
        prop_assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
        prop_assert!(f.iter().all(|&(p, _)| is_prime(p)));
        let parts: Vec<(u64, u64)> = f.iter().map(|&(p, e)| (n % p.pow(e), p.pow(e))).collect();
        if !parts.is_empty() {
            prop_assert_eq!(crt(&parts), Some((0, n)));
        }
    }

    #[test]
    fn characters_are_multiplicative(q in odd_modulus(), seed: u64, a in -5000i64..5000, b in -5000i64..5000) {
        let chi = char_for(q, seed);
        let prod = chi.value(a).mul(chi.value(b));
        let ab = chi.value(a * b);
        prop_assert_eq!(ab.is_zero(), prod.is_zero());
        prop_assert!((ab.to_complex() - prod.to_complex()).norm() < 1e-9);
        prop_assert_eq!(chi.value(a).is_zero(), gcd(a.unsigned_abs(), q) != 1);
    }

    #[test]
    fn primitive_character_induces(q in odd_modulus(), seed: u64, n in 0i64..100_000) {
        let chi = char_for(q, seed);
        let pr = chi.primitive();
        prop_assert_eq!(pr.modulus(), chi.conductor());
        prop_assert!(pr.is_primitive());
        if gcd(n as u64, q) == 1 {
            prop_assert!((pr.value(n).to_complex() - chi.value(n).to_complex()).norm() < 1e-9);
        }
    }

    #[test]
    fn principal_character_is_coprimality(q in odd_modulus(), n in -10_000i64..10_000) {
        let chi = DirichletCharacter::principal(q).unwrap();
        let v = chi.value(n);
        prop_assert_eq!(v == CharValue::one(), gcd(n.unsigned_abs(), q) == 1);
    }

    #[test]
    fn display_parses_back(num in prop::collection::vec(-30i64..30, 1..5), den in prop::collection::vec(-30i64..30, 1..4)) {
        if let Ok(f) = RationalFunction::new(Polynomial::from_ints(&num), Polynomial::from_ints(&den)) {
            prop_assert_eq!(RationalFunction::parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn interval_sums_are_additive(q in odd_modulus(), seed: u64, start in -50_000i64..50_000, a in 0u64..3000, b in 0u64..3000) {
        let chi = char_for(q, seed);
        let s = summand(&RationalFunction::x(), &RationalFunction::parse("x^2").unwrap(), &chi, 1).unwrap();
        let lhs = s.interval_sum(start, a + b);
        let rhs = s.interval_sum(start, a) + s.interval_sum(start + a as i64, b);
        prop_assert!((lhs - rhs).norm() < 1e-7 * (a + b + 1) as f64);
        let direct: Complex64 = (1..=a as i64).map(|i| s.eval(start + i)).sum();
        prop_assert!((s.interval_sum(start, a) - direct).norm() < 1e-7 * (a + 1) as f64);
    }

    #[test]
    fn interval_bound_dominates(q in 3u64..400, seed: u64, start in -1000i64..1000, n in 1u64..2000) {
        let q = q | 1;
        let chi = char_for(q, seed);
        let s = summand(&RationalFunction::x(), &RationalFunction::x(), &chi, 1).unwrap();
        let (exact, bound) = fourier_interval_bound(&s, start, n);
        prop_assert!(exact <= bound + 1e-9);
        prop_assert!((exact - s.interval_mean(start, n).norm()).abs() < 1e-9);
    }

    #[test]
    fn pair_count_matches_enumeration(m in 1u64..120, d in 1u64..60) {
        let mut c = 0u128;
        for h0 in 1..=m {
            for h1 in 1..=m {
                c += (h0 != h1 && (h0 % d == h1 % d)) as u128;
            }
        }
        prop_assert_eq!(pair_count(m, d), c);
    }

    #[test]
    fn lifting_agrees_with_brute_force(c in prop::collection::vec(-12i64..12, 2..5), pi in 0usize..4, m in 1u32..5) {
        let p = [3u64, 5, 7, 11][pi];
        let h: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        if h.iter().all(|x| x % p == BigInt::from(0)) || p.pow(m) > 20_000 {
            return Ok(());
        }
        let l = count_roots_lifting(&h, p, m).unwrap();
        let b = count_roots_bruteforce(&h, p, m).unwrap();
        prop_assert_eq!(l.count, b.count);
        prop_assert!(l.count <= l.bound);
    }
}
