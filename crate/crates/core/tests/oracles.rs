//! Library results checked against independent computations.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isodense_core::count::{trace_bsgs, trace_frobenius, trace_naive};
use isodense_core::curve::{CurveOverField, RationalCurve, Reduction};
use isodense_core::dataset::bundled;
use isodense_core::density::{eval_density, f_closed_form, maximal_profile, DensityProfile, ExactRational};
use isodense_core::structure::{factor, group_structure};
use isodense_core::sweep::prime_count;

use common::*;

#[test]
fn prime_counts_match_plain_sieve() {
    let is_prime = sieve(10_000_000);
    let mut count = 0u64;
    for (n, &b) in is_prime.iter().enumerate() {
        count += b as u64;
        if [10, 100, 1000, 65_536, 100_000, 1_000_000, 10_000_000].contains(&n) {
            assert_eq!(prime_count(n as u64), count, "pi({n})");
        }
    }
    assert_eq!(count, 664_579);
    assert_eq!(prime_count(1_000_000), 78_498);
}

/// 1 - sum_{m=1}^{terms} (d_m/|G(l^m)| + d'_m/|G'(l^m)|), level by level.
fn partial_series(p: &DensityProfile, terms: u32) -> ExactRational {
    let ell = BigInt::from(p.ell);
    let step = num_traits::pow(ell, p.tail.g as usize);
    let mut total = ExactRational::one();
    let mut size_g = BigInt::from(p.tail.size_g);
    let mut size_gp = BigInt::from(p.tail.size_gp);
    for m in 1..=terms {
        if let Some(e) = p.head.iter().find(|e| e.m == m) {
            total -= &e.d / BigInt::from(e.size_g) + &e.dp / BigInt::from(e.size_gp);
            continue;
        }
        if m > p.tail.level {
            size_g *= &step;
            size_gp *= &step;
        }
        total -= &p.tail.d / size_g.clone() + &p.tail.dp / size_gp.clone();
    }
    total
}

#[test]
fn series_summed_term_by_term_agrees_with_closed_tail() {
    let mut profiles: Vec<DensityProfile> = bundled().into_iter().filter_map(|r| r.profile).collect();
    profiles.extend([2, 3, 5, 7, 11, 13].map(maximal_profile));
    for p in profiles {
        let exact = eval_density(&p).unwrap();
        let partial = partial_series(&p, 40);
        assert!(partial >= exact);
        let gap = partial - &exact;
        // remainder after level 40 is at most 2 l^(-g (40 - M + 1)) l^g / (l^g - 1)
        let exponent = p.tail.g * (40 - p.tail.level);
        let bound = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p.ell), exponent as usize));
        assert!(gap <= bound, "ell = {}", p.ell);
        assert!(!gap.is_zero() || (p.tail.d.is_zero() && p.tail.dp.is_zero()));
    }
}

#[test]
fn maximal_closed_form() {
    for ell in [2u64, 3, 5, 7, 11, 13] {
        let l2 = BigInt::from(ell * ell);
        let l4 = &l2 * &l2;
        let direct = BigRational::new(&l4 - 2 * &l2 - 1, l4 - 1);
        assert_eq!(f_closed_form(ell).unwrap(), direct);
        assert_eq!(eval_density(&maximal_profile(ell)).unwrap(), direct);
    }
}

#[test]
fn reductions_match_independent_short_models() {
    for (label, a, conductor) in bundled_curves() {
        let e = RationalCurve::from_i64(a, conductor, &label).unwrap();
        for p in primes_upto(400).into_iter().filter(|&p| p > 3) {
            let reduction = e.reduce_mod_p(p).unwrap();
            let (sa, sb) = short_model(&a, p);
            match reduction {
                Reduction::Bad => assert_eq!(conductor % p, 0, "{label} at {p}"),
                Reduction::Good(c) => {
                    assert_ne!(conductor % p, 0);
                    assert_eq!(c.coefficients(), (sa, sb), "{label} at {p}");
                }
            }
        }
    }
}

#[test]
fn group_structure_matches_enumeration_up_to_499() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for (label, a, conductor) in bundled_curves() {
        let e = RationalCurve::from_i64(a, conductor, &label).unwrap();
        for p in primes_upto(499).into_iter().filter(|&p| p > 3 && conductor % p != 0) {
            let Reduction::Good(c) = e.reduce_mod_p(p).unwrap() else {
                panic!("{label} has bad reduction at {p}")
            };
            let (sa, sb) = short_model(&a, p);
            let (n1, n2) = Small::new(p, sa, sb).structure();
            let tr = trace_frobenius(&c, &mut rng);
            assert_eq!(tr.n, n1 * n2, "{label} at {p}");
            let shape = group_structure(&c, &factor(tr.n as u128), &mut rng).unwrap();
            assert_eq!((shape.n1, shape.n2), (n1 as u128, n2 as u128), "{label} at {p}");
            checked += 1;
        }
    }
    assert!(checked > 1400);
}

#[test]
fn bsgs_matches_counting_on_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let primes: Vec<u64> = primes_upto(100_000).into_iter().filter(|&p| p >= 10_000).collect();
    let mut done = 0;
    while done < 500 {
        let p = primes[rng.gen_range(0..primes.len())];
        let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let small = Small::new(p, a, b);
        if small.is_singular() {
            continue;
        }
        let c = CurveOverField::from_coefficients(p, a, b).unwrap();
        let expected = naive_trace(p, a, b);
        assert_eq!(trace_naive(&c), expected, "naive p={p} a={a} b={b}");
        assert_eq!(trace_bsgs(&c, &mut rng), Some(expected), "bsgs p={p} a={a} b={b}");
        done += 1;
    }
}

#[test]
fn bsgs_handles_special_j_invariants_near_threshold() {
    // j = 0 and j = 1728 have the most automorphisms, hence the most
    // repeated point orders.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let primes: Vec<u64> = primes_upto(70_000).into_iter().filter(|&p| p >= 60_000).collect();
    for &p in primes.iter().step_by(40) {
        for (a, b) in [(0, 1), (0, 2), (1, 0), (3, 0)] {
            let c = CurveOverField::from_coefficients(p, a, b).unwrap();
            assert_eq!(trace_bsgs(&c, &mut rng), Some(naive_trace(p, a, b)), "p={p} a={a} b={b}");
        }
    }
}
