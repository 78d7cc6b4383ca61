//! Arithmetic in F_p (3 < p < 2^62) and in F_{p^2} = F_p(s), s^2 = delta.
//!
//! Elements are plain `Copy` values; every operation goes through the field
//! context, which keeps the hot loops free of reference counting. F_p
//! elements are stored in Montgomery form, so their raw bits are not the
//! residue: use [`PrimeField::value`] for the canonical representative.
//!
//! `delta` is the least positive quadratic nonresidue mod p. It fixes the
//! representation of F_{p^2} and is also the twisting parameter used by the
//! point counter.

use std::fmt;
use std::hash::Hash;

use rand::Rng;
use thiserror::Error;

use crate::arith::{self, Montgomery};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported characteristic {0}: need a prime with 3 < p < 2^62")]
    UnsupportedPrime(u64),
}

/// The operations the curve code needs from a finite field.
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Copy + Eq + Hash + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    /// Number of elements q.
    fn order(&self) -> u128;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, v: u64) -> Self::Elem;

    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem, FieldError>;

    fn is_square(&self, a: Self::Elem) -> bool;
    fn sqrt(&self, a: Self::Elem) -> Option<Self::Elem>;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn from_i64(&self, v: i64) -> Self::Elem {
        let x = self.from_u64(v.unsigned_abs());
        if v < 0 {
            self.neg(x)
        } else {
            x
        }
    }

    #[inline]
    fn sqr(&self, a: Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    #[inline]
    fn double(&self, a: Self::Elem) -> Self::Elem {
        self.add(a, a)
    }

    #[inline]
    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow(&self, mut base: Self::Elem, mut e: u128) -> Self::Elem {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.sqr(base);
            e >>= 1;
        }
        acc
    }
}

/// An element of F_p in Montgomery form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(u64);

/// The prime field F_p.
#[derive(Clone, Debug)]
pub struct PrimeField {
    mont: Montgomery,
    delta: Fp,
    // p - 1 = odd * 2^two_adicity, used by Tonelli-Shanks
    two_adicity: u32,
    odd_part: u64,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.mont.modulus() == other.mont.modulus()
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p <= 3 || p >= (1 << 62) || !arith::is_prime_u64(p) {
            return Err(FieldError::UnsupportedPrime(p));
        }
        let mont = Montgomery::new(p);
        let delta = (2..p)
            .find(|&d| arith::jacobi(d, p) == -1)
            .expect("odd primes have nonresidues");
        let two_adicity = (p - 1).trailing_zeros();
        Ok(PrimeField {
            mont,
            delta: Fp(mont.to_mont(delta)),
            two_adicity,
            odd_part: (p - 1) >> two_adicity,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.mont.modulus()
    }

    /// Canonical residue in [0, p).
    #[inline]
    pub fn value(&self, x: Fp) -> u64 {
        self.mont.from_mont(x.0)
    }

    #[inline]
    pub fn elem(&self, v: u64) -> Fp {
        Fp(self.mont.to_mont(v))
    }

    /// The least positive quadratic nonresidue.
    pub fn nonresidue(&self) -> Fp {
        self.delta
    }

    /// Legendre symbol of `x`: 0, 1 or -1.
    pub fn legendre(&self, x: Fp) -> i32 {
        arith::jacobi(self.value(x), self.p())
    }

    fn tonelli_shanks(&self, a: Fp) -> Fp {
        let p = self.p();
        if p % 4 == 3 {
            return self.pow(a, ((p + 1) / 4) as u128);
        }
        let mut m = self.two_adicity;
        let mut c = self.pow(self.delta, self.odd_part as u128);
        let mut t = self.pow(a, self.odd_part as u128);
        let mut r = self.pow(a, self.odd_part.div_ceil(2) as u128);
        let one = self.one();
        while t != one {
            let mut i = 0;
            let mut t2 = t;
            while t2 != one {
                t2 = self.sqr(t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.sqr(b);
            }
            m = i;
            c = self.sqr(b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        r
    }
}

impl Field for PrimeField {
    type Elem = Fp;

    fn characteristic(&self) -> u64 {
        self.p()
    }

    fn order(&self) -> u128 {
        self.p() as u128
    }

    #[inline]
    fn zero(&self) -> Fp {
        Fp(0)
    }

    #[inline]
    fn one(&self) -> Fp {
        Fp(self.mont.one())
    }

    fn from_u64(&self, v: u64) -> Fp {
        self.elem(v)
    }

    #[inline]
    fn add(&self, a: Fp, b: Fp) -> Fp {
        Fp(self.mont.add(a.0, b.0))
    }

    #[inline]
    fn sub(&self, a: Fp, b: Fp) -> Fp {
        Fp(self.mont.sub(a.0, b.0))
    }

    #[inline]
    fn neg(&self, a: Fp) -> Fp {
        Fp(self.mont.sub(0, a.0))
    }

    #[inline]
    fn mul(&self, a: Fp, b: Fp) -> Fp {
        Fp(self.mont.mul(a.0, b.0))
    }

    fn inv(&self, a: Fp) -> Result<Fp, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let v = arith::inv_mod(self.value(a), self.p()).ok_or(FieldError::DivisionByZero)?;
        Ok(self.elem(v))
    }

    fn is_square(&self, a: Fp) -> bool {
        self.legendre(a) >= 0
    }

    /// Square root with the canonical choice `r <= p - r`.
    fn sqrt(&self, a: Fp) -> Option<Fp> {
        match self.legendre(a) {
            0 => Some(Fp(0)),
            -1 => None,
            _ => {
                let r = self.tonelli_shanks(a);
                let v = self.value(r);
                Some(if v > self.p() - v { self.neg(r) } else { r })
            }
        }
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        self.elem(rng.gen_range(0..self.p()))
    }
}

/// An element `a + b*s` of F_{p^2}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp2 {
    pub a: Fp,
    pub b: Fp,
}

/// F_{p^2} = F_p[s]/(s^2 - delta).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticExtension {
    base: PrimeField,
    delta: Fp,
}

impl QuadraticExtension {
    pub fn new(base: PrimeField) -> Self {
        let delta = base.nonresidue();
        QuadraticExtension { base, delta }
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn delta(&self) -> Fp {
        self.delta
    }

    pub fn embed(&self, x: Fp) -> Fp2 {
        Fp2 { a: x, b: Fp(0) }
    }

    pub fn elem(&self, a: u64, b: u64) -> Fp2 {
        Fp2 {
            a: self.base.elem(a),
            b: self.base.elem(b),
        }
    }

    /// Canonical coordinates `(a, b)`.
    pub fn value(&self, x: Fp2) -> (u64, u64) {
        (self.base.value(x.a), self.base.value(x.b))
    }

    /// Norm to F_p: a^2 - delta b^2.
    pub fn norm(&self, x: Fp2) -> Fp {
        let f = &self.base;
        f.sub(f.sqr(x.a), f.mul(self.delta, f.sqr(x.b)))
    }

    pub fn conjugate(&self, x: Fp2) -> Fp2 {
        Fp2 {
            a: x.a,
            b: self.base.neg(x.b),
        }
    }
}

impl Field for QuadraticExtension {
    type Elem = Fp2;

    fn characteristic(&self) -> u64 {
        self.base.p()
    }

    fn order(&self) -> u128 {
        let p = self.base.p() as u128;
        p * p
    }

    fn zero(&self) -> Fp2 {
        Fp2::default()
    }

    fn one(&self) -> Fp2 {
        self.embed(self.base.one())
    }

    fn from_u64(&self, v: u64) -> Fp2 {
        self.embed(self.base.elem(v))
    }

    #[inline]
    fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2 {
            a: self.base.add(x.a, y.a),
            b: self.base.add(x.b, y.b),
        }
    }

    #[inline]
    fn sub(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2 {
            a: self.base.sub(x.a, y.a),
            b: self.base.sub(x.b, y.b),
        }
    }

    #[inline]
    fn neg(&self, x: Fp2) -> Fp2 {
        Fp2 {
            a: self.base.neg(x.a),
            b: self.base.neg(x.b),
        }
    }

    #[inline]
    fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let f = &self.base;
        let ac = f.mul(x.a, y.a);
        let bd = f.mul(x.b, y.b);
        let cross = f.mul(f.add(x.a, x.b), f.add(y.a, y.b));
        Fp2 {
            a: f.add(ac, f.mul(self.delta, bd)),
            b: f.sub(cross, f.add(ac, bd)),
        }
    }

    #[inline]
    fn sqr(&self, x: Fp2) -> Fp2 {
        let f = &self.base;
        let ab = f.mul(x.a, x.b);
        Fp2 {
            a: f.add(f.sqr(x.a), f.mul(self.delta, f.sqr(x.b))),
            b: f.double(ab),
        }
    }

    fn inv(&self, x: Fp2) -> Result<Fp2, FieldError> {
        let n = self.norm(x);
        let n_inv = self.base.inv(n)?;
        let c = self.conjugate(x);
        Ok(Fp2 {
            a: self.base.mul(c.a, n_inv),
            b: self.base.mul(c.b, n_inv),
        })
    }

    /// x is a square in F_{p^2} iff its norm is a square in F_p.
    fn is_square(&self, x: Fp2) -> bool {
        self.base.is_square(self.norm(x))
    }

    fn sqrt(&self, x: Fp2) -> Option<Fp2> {
        let f = &self.base;
        let root = if f.is_zero(x.b) {
            if let Some(r) = f.sqrt(x.a) {
                Fp2 { a: r, b: Fp(0) }
            } else {
                // a = delta * c^2 for some c
                let c = f.sqrt(f.div(x.a, self.delta).ok()?)?;
                Fp2 { a: Fp(0), b: c }
            }
        } else {
            let m = f.sqrt(self.norm(x))?;
            let half = f.inv(f.elem(2)).ok()?;
            let mut c2 = f.mul(f.add(x.a, m), half);
            if !f.is_square(c2) {
                c2 = f.mul(f.sub(x.a, m), half);
            }
            let c = f.sqrt(c2)?;
            let d = f.div(x.b, f.double(c)).ok()?;
            Fp2 { a: c, b: d }
        };
        debug_assert_eq!(self.sqr(root), x);
        // canonical: the root whose first nonzero coordinate is <= its negation
        let (ra, rb) = self.value(root);
        let p = f.p();
        let flip = if ra != 0 { ra > p - ra } else { rb > p - rb };
        Some(if flip { self.neg(root) } else { root })
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp2 {
        Fp2 {
            a: self.base.random(rng),
            b: self.base.random(rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn rejects_small_or_composite_characteristic() {
        for p in [0, 1, 2, 3, 9, 15, 1 << 62] {
            assert!(PrimeField::new(p).is_err(), "p = {p}");
        }
        assert!(PrimeField::new(5).is_ok());
    }

    #[test]
    fn legendre_examples() {
        let f = f7();
        assert_eq!(f.legendre(f.elem(0)), 0);
        assert_eq!(f.legendre(f.elem(4)), 1);
        // squares mod 7 are {1, 2, 4}
        let squares: Vec<u64> = (1..7).map(|x| x * x % 7).collect();
        assert!(!squares.contains(&3));
        assert_eq!(f.legendre(f.elem(3)), -1);
    }

    #[test]
    fn sqrt_examples() {
        let f = f7();
        assert_eq!(f.sqrt(f.elem(0)).map(|r| f.value(r)), Some(0));
        // 3^2 = 9 = 2 and 4^2 = 16 = 2 mod 7; canonical is the smaller
        assert_eq!(f.sqrt(f.elem(2)).map(|r| f.value(r)), Some(3));
        assert_eq!(f.sqrt(f.elem(3)), None);
    }

    #[test]
    fn least_nonresidue_is_delta() {
        assert_eq!(f7().value(f7().nonresidue()), 3);
        let f = PrimeField::new(17).unwrap();
        assert_eq!(f.value(f.nonresidue()), 3);
        let f = PrimeField::new(73).unwrap();
        assert_eq!(f.value(f.nonresidue()), 5);
    }

    #[test]
    fn fp2_examples() {
        let k = QuadraticExtension::new(f7());
        assert_eq!(k.base().value(k.delta()), 3);
        let x = k.elem(5, 2);
        assert_eq!(k.mul(k.one(), x), x);
        let one_plus_s = k.elem(1, 1);
        let one_minus_s = k.elem(1, 6);
        assert_eq!(k.value(k.mul(one_plus_s, one_minus_s)), (5, 0));
        assert_eq!(k.inv(k.zero()), Err(FieldError::DivisionByZero));
        assert_eq!(k.base().inv(k.base().zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn sqrt_count_is_half_the_units() {
        for p in [5u64, 7, 13, 101, 257, 65537] {
            let f = PrimeField::new(p).unwrap();
            let mut count = 0;
            for x in 1..p {
                if let Some(r) = f.sqrt(f.elem(x)) {
                    assert_eq!(f.value(f.sqr(r)), x);
                    assert!(f.value(r) <= p - f.value(r));
                    count += 1;
                }
            }
            assert_eq!(count, (p - 1) / 2, "p = {p}");
        }
    }

    #[test]
    fn inverses_and_group_orders_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[5u64, 1_000_003, (1 << 61) - 1] {
            let f = PrimeField::new(p).unwrap();
            let k = QuadraticExtension::new(f.clone());
            let q2 = k.order();
            for _ in 0..1000 {
                let x = f.random(&mut rng);
                if !f.is_zero(x) {
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
                }
                let y = k.random(&mut rng);
                if !k.is_zero(y) {
                    assert_eq!(k.mul(y, k.inv(y).unwrap()), k.one());
                    assert_eq!(k.pow(y, q2 - 1), k.one());
                }
            }
        }
    }

    #[test]
    fn legendre_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = PrimeField::new(1_000_003).unwrap();
        for _ in 0..500 {
            let (a, b) = (f.random(&mut rng), f.random(&mut rng));
            if f.is_zero(a) || f.is_zero(b) {
                continue;
            }
            assert_eq!(f.legendre(f.mul(a, b)), f.legendre(a) * f.legendre(b));
        }
    }

    #[test]
    fn fp2_sqrt_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &p in &[5u64, 13, 10007, 1_000_003] {
            let k = QuadraticExtension::new(PrimeField::new(p).unwrap());
            for _ in 0..300 {
                let x = k.random(&mut rng);
                let sq = k.sqr(x);
                let r = k.sqrt(sq).expect("squares have roots");
                assert_eq!(k.sqr(r), sq);
                assert!(k.is_square(sq));
                assert_eq!(k.sqrt(k.neg(sq)).map(|r| k.sqr(r)), Some(k.neg(sq)));
            }
            // every element of F_p is a square in F_{p^2}
            let f = k.base();
            assert!(k.is_square(k.embed(f.nonresidue())));
        }
    }
}
