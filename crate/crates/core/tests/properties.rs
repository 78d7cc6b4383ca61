mod common;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isodense_core::count::trace_frobenius;
use isodense_core::curve::{CurveOverField, Point};
use isodense_core::density::{eval_density, rational, validate_profile, DensityProfile, ExactRational, LevelEntry, Tail};
use isodense_core::structure::{brute_force_structure, factor, group_structure};

use common::{naive_trace, primes_upto, Small};

fn ell_strategy() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(11)]
}

/// d-values in {0, 1 - 1/l} for quartic growth, any k/l for quadratic.
fn d_value(ell: u64, g: u32, pick: u64) -> ExactRational {
    if g == 4 {
        if pick.is_multiple_of(2) {
            ExactRational::zero()
        } else {
            rational(ell as i64 - 1, ell as i64)
        }
    } else {
        rational((pick % ell) as i64, ell as i64)
    }
}

/// Valid profiles whose sizes are large enough that the density stays in [0, 1].
fn profile_strategy() -> impl Strategy<Value = DensityProfile> {
    (ell_strategy(), prop_oneof![Just(2u32), Just(4)], 1u32..4, proptest::collection::vec((0u64..4, 0u64..8, 0u64..8, 0u8..3), 4))
        .prop_map(|(ell, g, level, picks)| {
            let size = |m: u32, scale: u64, shift: u8| {
                let base = 4 * ell.pow(m - 1) * (1 + scale);
                match shift {
                    0 => (base, base),
                    1 => (base, base * ell),
                    _ => (base * ell, base),
                }
            };
            let head = (1..level)
                .map(|m| {
                    let (s, pd, pdp, shift) = picks[m as usize - 1];
                    let (sg, sgp) = size(m, s, shift);
                    LevelEntry { m, size_g: sg, size_gp: sgp, d: d_value(ell, g, pd), dp: d_value(ell, g, pdp) }
                })
                .collect();
            let (s, pd, pdp, shift) = picks[3];
            let (sg, sgp) = size(level, s, shift);
            DensityProfile {
                ell,
                head,
                tail: Tail { level, size_g: sg, size_gp: sgp, d: d_value(ell, g, pd), dp: d_value(ell, g, pdp), g },
            }
        })
}

/// The same profile with the first tail level written out as a head entry.
fn unroll(p: &DensityProfile) -> DensityProfile {
    let mut q = p.clone();
    let t = &p.tail;
    q.head.push(LevelEntry { m: t.level, size_g: t.size_g, size_gp: t.size_gp, d: t.d.clone(), dp: t.dp.clone() });
    let step = p.ell.pow(t.g);
    q.tail.level += 1;
    q.tail.size_g *= step;
    q.tail.size_gp *= step;
    q
}

fn small_curve() -> impl Strategy<Value = (u64, u64, u64)> {
    let primes: Vec<u64> = primes_upto(2000).into_iter().filter(|&p| p > 3).collect();
    (proptest::sample::select(primes), any::<u64>(), any::<u64>())
        .prop_map(|(p, a, b)| (p, a % p, b % p))
        .prop_filter("nonsingular", |&(p, a, b)| !Small::new(p, a, b).is_singular())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_profiles_are_valid(p in profile_strategy()) {
        prop_assert!(validate_profile(&p).is_empty(), "{:?}", validate_profile(&p));
    }

    #[test]
    fn density_lies_in_unit_interval(p in profile_strategy()) {
        let v = eval_density(&p).unwrap();
        prop_assert!(v >= ExactRational::zero() && v <= ExactRational::one());
    }

    #[test]
    fn density_decreases_as_d_grows(p in profile_strategy(), bump in 0usize..8) {
        let base = eval_density(&p).unwrap();
        let mut q = p.clone();
        let one = ExactRational::one();
        let n = q.head.len();
        match bump % 2 {
            0 if bump / 2 < n => q.head[bump / 2].d = one,
            1 if bump / 2 < n => q.head[bump / 2].dp = one,
            0 => q.tail.d = one,
            _ => q.tail.dp = one,
        }
        prop_assert!(eval_density(&q).unwrap() <= base);
    }

    #[test]
    fn unrolling_the_tail_preserves_the_value(p in profile_strategy()) {
        prop_assert_eq!(eval_density(&unroll(&p)).unwrap(), eval_density(&p).unwrap());
    }

    #[test]
    fn all_zero_d_gives_one(p in profile_strategy()) {
        let mut q = p;
        for e in &mut q.head {
            e.d = ExactRational::zero();
            e.dp = ExactRational::zero();
        }
        q.tail.d = ExactRational::zero();
        q.tail.dp = ExactRational::zero();
        prop_assert_eq!(eval_density(&q).unwrap(), ExactRational::one());
    }

    #[test]
    fn group_law((p, a, b) in small_curve(), seed in any::<u64>(), k1 in 0u128..5000, k2 in 0u128..5000) {
        let c = CurveOverField::from_coefficients(p, a, b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (c.random_point(&mut rng), c.random_point(&mut rng), c.random_point(&mut rng));
        prop_assert!(c.contains(&x));
        prop_assert_eq!(c.add(&x, &y), c.add(&y, &x));
        prop_assert_eq!(c.add(&c.add(&x, &y), &z), c.add(&x, &c.add(&y, &z)));
        prop_assert_eq!(c.add(&x, &Point::Infinity), x);
        prop_assert_eq!(c.add(&x, &c.neg(&x)), Point::Infinity);
        prop_assert_eq!(c.mul(&x, k1 + k2), c.add(&c.mul(&x, k1), &c.mul(&x, k2)));
        prop_assert_eq!(c.to_affine(&c.mul_jacobian(&x, k1)), c.mul(&x, k1));
        let n = (p as i64 + 1 - naive_trace(p, a, b)) as u128;
        prop_assert!(c.mul_is_identity(&x, n));
    }

    #[test]
    fn structure_is_consistent_and_exact((p, a, b) in small_curve(), seed in any::<u64>()) {
        let c = CurveOverField::from_coefficients(p, a, b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tr = trace_frobenius(&c, &mut rng);
        prop_assert!(tr.satisfies_hasse());
        let shape = group_structure(&c, &factor(tr.n as u128), &mut rng).unwrap();
        prop_assert_eq!(shape.order(), tr.n as u128);
        prop_assert!(shape.is_consistent(p as u128));
        prop_assert_eq!(shape, brute_force_structure(&c).unwrap());
    }

    #[test]
    fn factorisation_multiplies_back(n in prop_oneof![1u128..(1u128 << 64), 1u128..(1u128 << 80)]) {
        let f = factor(n);
        let mut prod = BigInt::one();
        for &(q, e) in &f.factors {
            prop_assert!(isodense_core::structure::is_prime(q));
            prod *= num_traits::pow(BigInt::from(q), e as usize);
        }
        prop_assert_eq!(prod, BigInt::from(n));
    }
}
