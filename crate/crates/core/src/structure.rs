//! Group structure E(F_q) = Z/n1 x Z/n2 with n1 | n2, and integer factorization.
//!
//! The exponent n2 is found as the lcm of orders of random points. Only the
//! primes r with r^2 | N and r | q - 1 can contribute to n1, so only those are
//! sampled; every other Sylow subgroup is cyclic.
//!
//! For a prime r, a uniform random element misses the maximal r-power order
//! with probability at most 1/r <= 1/2, so 64 consecutive non-improving draws
//! leave an error probability of at most 2^-64 per prime.

use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

use crate::arith::{
    gcd_u128, is_prime_u128, is_prime_u64, isqrt_u128, lcm_u128, mul_mod_u128, valuation,
    Montgomery,
};
use crate::curve::{CurveOverField, Point};
use crate::ffield::{Field, PrimeField};

/// Consecutive non-improving draws required before an r-part is accepted.
pub const STABILITY_WINDOW: u32 = 64;
/// Total sample budget for one structure computation.
pub const SAMPLE_CAP: u32 = 4096;

const TRIAL_BOUND: u32 = 1 << 21;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("{n} * P is not the identity")]
    NotAMultiple { n: u128 },
    #[error("group exponent did not stabilise after {SAMPLE_CAP} samples (N = {n})")]
    Exhausted { n: u128 },
    #[error("brute force enumeration supports p <= 2000, got {0}")]
    TooLarge(u64),
    #[error("inconsistent shape n1 = {n1}, n2 = {n2} for N = {n}, q = {q}")]
    Inconsistent { n1: u128, n2: u128, n: u128, q: u128 },
}

/// E(F_q) = Z/n1 x Z/n2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GroupShape {
    pub n1: u128,
    pub n2: u128,
}

impl GroupShape {
    pub fn order(&self) -> u128 {
        self.n1 * self.n2
    }

    /// n1 | n2 and n1 | q - 1.
    pub fn is_consistent(&self, q: u128) -> bool {
        self.n1 >= 1 && self.n2.is_multiple_of(self.n1) && (q - 1).is_multiple_of(self.n1)
    }
}

/// l-valuations (a, b) of (n1, n2).
pub fn sylow_shape(s: &GroupShape, ell: u64) -> (u32, u32) {
    (valuation(s.n1, ell as u128), valuation(s.n2, ell as u128))
}

/// Whether E(F_q) contains the full l^m-torsion, i.e. l^m | n1.
pub fn has_full_torsion(s: &GroupShape, ell: u64, m: u32) -> bool {
    valuation(s.n1, ell as u128) >= m
}

/// The shape with all l-power factors removed from n1 and n2.
pub fn prime_to_ell_part(s: &GroupShape, ell: u64) -> GroupShape {
    let (a, b) = sylow_shape(s, ell);
    let l = ell as u128;
    GroupShape {
        n1: s.n1 / l.pow(a),
        n2: s.n2 / l.pow(b),
    }
}

/// A positive integer with its factorization, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInteger {
    pub value: u128,
    pub factors: Vec<(u128, u32)>,
}

impl FactoredInteger {
    pub fn from_factors(mut factors: Vec<(u128, u32)>) -> Self {
        factors.sort_unstable();
        let mut merged: Vec<(u128, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ if e > 0 => merged.push((p, e)),
                _ => {}
            }
        }
        let value = merged.iter().map(|&(p, e)| p.pow(e)).product();
        FactoredInteger {
            value,
            factors: merged,
        }
    }

    /// Factorization of a product from those of its factors.
    pub fn mul(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        FactoredInteger::from_factors(f)
    }

    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn divisors(&self) -> Vec<u128> {
        let mut out = vec![1u128];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut composite = vec![false; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

/// Factor 1 <= n < 2^126: trial division below 2^21, then Pollard-Brent rho.
pub fn factor(n: u128) -> FactoredInteger {
    assert!(n >= 1, "factor(0) is undefined");
    let mut n = n;
    let mut out = Vec::new();
    for &q in small_primes() {
        let q = q as u128;
        if q * q > n {
            break;
        }
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
    }
    if n > 1 {
        let bound = TRIAL_BOUND as u128;
        if n < bound * bound {
            // no factor below 2^21 and n < 2^42: prime
            out.push((n, 1));
        } else {
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                if is_prime_u128(m) {
                    out.push((m, 1));
                } else {
                    let d = find_divisor(m);
                    stack.push(d);
                    stack.push(m / d);
                }
            }
        }
    }
    FactoredInteger::from_factors(out)
}

/// A nontrivial divisor of an odd composite n without small factors.
fn find_divisor(n: u128) -> u128 {
    if let Some(r) = perfect_square_root(n) {
        return r;
    }
    if n < 1 << 63 {
        let n64 = n as u64;
        let mont = Montgomery::new(n64);
        for c in 1.. {
            if let Some(d) = brent_u64(&mont, c) {
                return d as u128;
            }
        }
    }
    for c in 1.. {
        if let Some(d) = brent_u128(n, c) {
            return d;
        }
    }
    unreachable!()
}

fn perfect_square_root(n: u128) -> Option<u128> {
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

fn brent_u64(mont: &Montgomery, c: u64) -> Option<u64> {
    let n = mont.modulus();
    let c = mont.to_mont(c % n);
    let f = |x: u64| mont.add(mont.mul(x, x), c);
    let gcd = |a: u64, b: u64| gcd_u128(a as u128, b as u128) as u64;
    let mut y = mont.to_mont(2);
    let mut r = 1u64;
    let mut q = mont.one();
    let mut x;
    let mut ys;
    let m = 128;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mont.mul(q, x.abs_diff(y));
            }
            let g = gcd(mont.from_mont(q), n);
            k += m;
            if g != 1 {
                if g == n {
                    // backtrack one step at a time
                    loop {
                        ys = f(ys);
                        let g = gcd(x.abs_diff(ys) % n, n);
                        if g != 1 {
                            return (g != n).then_some(g);
                        }
                    }
                }
                return Some(g);
            }
            if k >= r {
                break;
            }
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
}

fn brent_u128(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
    let mut y = 2u128;
    let mut r = 1u64;
    let mut q = 1u128;
    let mut x;
    let mut ys;
    let m = 128;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod_u128(q, x.abs_diff(y), n);
            }
            let g = gcd_u128(q, n);
            k += m;
            if g != 1 {
                if g == n {
                    loop {
                        ys = f(ys);
                        let g = gcd_u128(x.abs_diff(ys), n);
                        if g != 1 {
                            return (g != n).then_some(g);
                        }
                    }
                }
                return Some(g);
            }
            if k >= r {
                break;
            }
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
}

/// Exact order of P given a multiple N of it (usually the group order).
pub fn point_order<F: Field>(
    c: &CurveOverField<F>,
    p: &Point<F::Elem>,
    n: &FactoredInteger,
) -> Result<u128, StructureError> {
    if !c.mul_is_identity(p, n.value) {
        return Err(StructureError::NotAMultiple { n: n.value });
    }
    let mut order = n.value;
    for &(q, e) in &n.factors {
        for _ in 0..e {
            let candidate = order / q;
            if c.mul_is_identity(p, candidate) {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Group structure from the exact group order, by random sampling.
pub fn group_structure<F: Field, R: Rng + ?Sized>(
    c: &CurveOverField<F>,
    n: &FactoredInteger,
    rng: &mut R,
) -> Result<GroupShape, StructureError> {
    let q = c.field().order();
    let big_n = n.value;
    let qm1 = q - 1;

    struct Pending {
        r: u128,
        e: u32,
        cofactor: u128,
        best: u32,
        stable: u32,
        done: bool,
    }
    let mut pending: Vec<Pending> = n
        .factors
        .iter()
        .filter(|&&(r, e)| e >= 2 && qm1.is_multiple_of(r))
        .map(|&(r, e)| Pending {
            r,
            e,
            cofactor: big_n / r.pow(e),
            best: 0,
            stable: 0,
            done: false,
        })
        .collect();

    let mut samples = 0;
    while pending.iter().any(|s| !s.done) {
        if samples >= SAMPLE_CAP {
            return Err(StructureError::Exhausted { n: big_n });
        }
        samples += 1;
        let pt = c.random_point(rng);
        for s in pending.iter_mut().filter(|s| !s.done) {
            let mut acc = c.mul_jacobian(&pt, s.cofactor);
            let mut k = 0;
            while !c.is_identity(&acc) {
                acc = c.jacobian_mul(&acc, s.r);
                k += 1;
            }
            debug_assert!(k <= s.e, "cofactor multiple has order above r^e");
            if k > s.best {
                s.best = k;
                s.stable = 0;
            } else {
                s.stable += 1;
            }
            if s.best == s.e {
                s.done = true;
            } else if s.stable >= STABILITY_WINDOW {
                let n1_r = s.e - s.best;
                if n1_r <= s.best && qm1.is_multiple_of(s.r.pow(n1_r)) {
                    s.done = true;
                } else {
                    s.stable = 0;
                }
            }
        }
    }

    let mut n2 = 1u128;
    for &(r, e) in &n.factors {
        let k = pending.iter().find(|s| s.r == r).map_or(e, |s| s.best);
        n2 *= r.pow(k);
    }
    let shape = GroupShape {
        n1: big_n / n2,
        n2,
    };
    if !shape.is_consistent(q) || !gcd_u128(big_n, qm1).is_multiple_of(shape.n1) {
        return Err(StructureError::Inconsistent {
            n1: shape.n1,
            n2: shape.n2,
            n: big_n,
            q,
        });
    }
    Ok(shape)
}

/// Exhaustive structure by enumerating every point of E(F_p), p <= 2000.
pub fn brute_force_structure(c: &CurveOverField<PrimeField>) -> Result<GroupShape, StructureError> {
    let p = c.p();
    if p > 2000 {
        return Err(StructureError::TooLarge(p));
    }
    let f = c.field();
    let mut points = vec![Point::Infinity];
    for x in 0..p {
        let x = f.elem(x);
        let rhs = c.rhs(x);
        for y in 0..p {
            let y = f.elem(y);
            if f.sqr(y) == rhs {
                points.push(Point::Affine(x, y));
            }
        }
    }
    let n = points.len() as u128;
    let divisors: Vec<u128> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut exponent = 1u128;
    for pt in &points {
        let order = *divisors
            .iter()
            .find(|&&d| c.mul(pt, d).is_infinity())
            .expect("N kills every point");
        exponent = lcm_u128(exponent, order);
    }
    Ok(GroupShape {
        n1: n / exponent,
        n2: exponent,
    })
}

/// Primality of a small factor candidate; re-exported for callers that build
/// factorizations by hand.
pub fn is_prime(n: u128) -> bool {
    if n < 1 << 64 {
        is_prime_u64(n as u64)
    } else {
        is_prime_u128(n)
    }
}
