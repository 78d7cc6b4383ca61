//! Rational curve models, reduction modulo p and the group law over finite fields.
//!
//! Reduction uses the standard short model y^2 = x^3 - 27 c4 x - 54 c6,
//! which is isomorphic to the long model over F_p for p > 3.
//!
//! Points are exposed in affine coordinates. Scalar multiplication runs in
//! Jacobian coordinates internally and only normalises at the end; the
//! results are the same as affine double-and-add.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::density::DensityProfile;
use crate::ffield::{Field, PrimeField, QuadraticExtension};

/// Discriminants of the imaginary quadratic orders of class number one.
pub const CM_DISCRIMINANTS: [i64; 13] = [-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular model (discriminant vanishes)")]
    Singular,
    #[error("reduction requires p > 3, got {0}")]
    SmallPrime(u64),
    #[error("model has bad reduction at {0}, which does not divide the conductor")]
    NotMinimalAt(u64),
    #[error("{0} is not a class-number-one CM discriminant")]
    BadCmDiscriminant(i64),
    #[error("conductor must be positive")]
    BadConductor,
    #[error("isogeny degree {0} is not prime")]
    BadIsogenyDegree(u64),
    #[error("isogenous curves must share a conductor ({0} vs {1})")]
    ConductorMismatch(u64, u64),
    #[error(transparent)]
    Field(#[from] crate::ffield::FieldError),
}

/// Standard invariants of a long Weierstrass model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub c4: BigInt,
    pub c6: BigInt,
    pub discriminant: BigInt,
}

/// An elliptic curve over Q given by an integral (minimal) long Weierstrass model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCurve {
    /// `[a1, a2, a3, a4, a6]`
    pub ainvs: [BigInt; 5],
    pub conductor: u64,
    pub label: String,
    pub cm_discriminant: Option<i64>,
    invariants: Invariants,
}

impl RationalCurve {
    pub fn new(
        ainvs: [BigInt; 5],
        conductor: u64,
        label: impl Into<String>,
        cm_discriminant: Option<i64>,
    ) -> Result<Self, CurveError> {
        if conductor == 0 {
            return Err(CurveError::BadConductor);
        }
        if let Some(d) = cm_discriminant {
            if !CM_DISCRIMINANTS.contains(&d) {
                return Err(CurveError::BadCmDiscriminant(d));
            }
        }
        let invariants = compute_invariants(&ainvs);
        if invariants.discriminant.is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(RationalCurve {
            ainvs,
            conductor,
            label: label.into(),
            cm_discriminant,
            invariants,
        })
    }

    /// Convenience constructor for small coefficients.
    pub fn from_i64(ainvs: [i64; 5], conductor: u64, label: &str) -> Result<Self, CurveError> {
        RationalCurve::new(ainvs.map(BigInt::from), conductor, label, None)
    }

    pub fn invariants(&self) -> &Invariants {
        &self.invariants
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.invariants.discriminant
    }

    /// Checks that every prime dividing the model's discriminant divides the
    /// conductor (as it must for a minimal model). Returns the prime part of
    /// the discriminant left over after removing conductor primes.
    pub fn discriminant_outside_conductor(&self) -> BigInt {
        let mut rest = self.invariants.discriminant.abs();
        let mut n = self.conductor;
        let mut d = 2u64;
        while n > 1 {
            if n.is_multiple_of(d) {
                while n.is_multiple_of(d) {
                    n /= d;
                }
                let bd = BigInt::from(d);
                while (&rest % &bd).is_zero() {
                    rest /= &bd;
                }
            }
            d += 1;
        }
        rest
    }

    /// Reduce modulo a prime p > 3.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Reduction, CurveError> {
        if p <= 3 {
            return Err(CurveError::SmallPrime(p));
        }
        if self.conductor.is_multiple_of(p) {
            return Ok(Reduction::Bad);
        }
        let field = PrimeField::new(p)?;
        let bp = BigInt::from(p);
        let residue = |x: &BigInt| -> u64 { x.mod_floor(&bp).to_u64().expect("residue fits") };
        let c4 = field.elem(residue(&self.invariants.c4));
        let c6 = field.elem(residue(&self.invariants.c6));
        let a = field.neg(field.mul(field.elem(27), c4));
        let b = field.neg(field.mul(field.elem(54), c6));
        match CurveOverField::new(field, a, b) {
            Ok(c) => Ok(Reduction::Good(c)),
            Err(CurveError::Singular) => Err(CurveError::NotMinimalAt(p)),
            Err(e) => Err(e),
        }
    }
}

fn compute_invariants(a: &[BigInt; 5]) -> Invariants {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4: BigInt = &b2 * &b2 - 24 * &b4;
    let b2_cubed: BigInt = &b2 * &b2 * &b2;
    let c6: BigInt = -b2_cubed + 36 * &b2 * &b4 - 216 * &b6;
    let b2b2b8: BigInt = &b2 * &b2 * &b8;
    let discriminant: BigInt =
        -b2b2b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
    Invariants {
        c4,
        c6,
        discriminant,
    }
}

/// Outcome of reducing a rational curve at a prime.
#[derive(Clone, Debug)]
pub enum Reduction {
    Good(CurveOverField<PrimeField>),
    Bad,
}

/// A pair of l-isogenous curves over Q.
#[derive(Clone, Debug)]
pub struct RationalCurvePair {
    pub label: String,
    pub e: RationalCurve,
    pub e_prime: RationalCurve,
    pub ell: u64,
    pub profile: Option<DensityProfile>,
}

impl RationalCurvePair {
    pub fn new(
        label: impl Into<String>,
        e: RationalCurve,
        e_prime: RationalCurve,
        ell: u64,
        profile: Option<DensityProfile>,
    ) -> Result<Self, CurveError> {
        if !crate::arith::is_prime_u64(ell) {
            return Err(CurveError::BadIsogenyDegree(ell));
        }
        if e.conductor != e_prime.conductor {
            return Err(CurveError::ConductorMismatch(e.conductor, e_prime.conductor));
        }
        Ok(RationalCurvePair {
            label: label.into(),
            e,
            e_prime,
            ell,
            profile,
        })
    }

    pub fn conductor(&self) -> u64 {
        self.e.conductor
    }
}

/// A point in affine coordinates, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point<E> {
    Infinity,
    Affine(E, E),
}

impl<E: Copy> Point<E> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<E> {
        match self {
            Point::Affine(x, _) => Some(*x),
            Point::Infinity => None,
        }
    }
}

/// Jacobian coordinates: (X, Y, Z) represents (X/Z^2, Y/Z^3); Z = 0 is infinity.
#[derive(Clone, Copy, Debug)]
pub struct Jacobian<E> {
    x: E,
    y: E,
    z: E,
}

/// Short Weierstrass curve y^2 = x^3 + a x + b over a finite field.
#[derive(Clone, Debug)]
pub struct CurveOverField<F: Field> {
    field: F,
    a: F::Elem,
    b: F::Elem,
}

impl<F: Field> CurveOverField<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem) -> Result<Self, CurveError> {
        // 4a^3 + 27b^2
        let f = &field;
        let disc = f.add(
            f.mul(f.from_u64(4), f.mul(a, f.sqr(a))),
            f.mul(f.from_u64(27), f.sqr(b)),
        );
        if f.is_zero(disc) {
            return Err(CurveError::Singular);
        }
        Ok(CurveOverField { field, a, b })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn a(&self) -> F::Elem {
        self.a
    }

    pub fn b(&self) -> F::Elem {
        self.b
    }

    /// x^3 + a x + b
    #[inline]
    pub fn rhs(&self, x: F::Elem) -> F::Elem {
        let f = &self.field;
        f.add(f.mul(f.add(f.sqr(x), self.a), x), self.b)
    }

    pub fn contains(&self, p: &Point<F::Elem>) -> bool {
        match *p {
            Point::Infinity => true,
            Point::Affine(x, y) => self.field.sqr(y) == self.rhs(x),
        }
    }

    pub fn neg(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        match *p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x, self.field.neg(y)),
        }
    }

    pub fn add(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Point<F::Elem> {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (*p, *q) {
            (Point::Infinity, _) => return *q,
            (_, Point::Infinity) => return *p,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if f.is_zero(f.add(y1, y2)) {
                return Point::Infinity;
            }
            let num = f.add(f.mul(f.from_u64(3), f.sqr(x1)), self.a);
            f.div(num, f.double(y1)).expect("y1 != 0 here")
        } else {
            f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("x1 != x2 here")
        };
        let x3 = f.sub(f.sub(f.sqr(lambda), x1), x2);
        let y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        self.add(p, p)
    }

    /// k * P for k >= 0 (use [`CurveOverField::neg`] for negative multiples).
    pub fn mul(&self, p: &Point<F::Elem>, k: u128) -> Point<F::Elem> {
        self.to_affine(&self.mul_jacobian(p, k))
    }

    /// Whether k * P is the identity, without normalising.
    pub fn mul_is_identity(&self, p: &Point<F::Elem>, k: u128) -> bool {
        self.is_identity(&self.mul_jacobian(p, k))
    }

    /// Random point: uniform x until x^3 + ax + b is a square, then the
    /// canonical root with a sign taken from one more random bit.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<F::Elem> {
        let f = &self.field;
        loop {
            let x = f.random(rng);
            if let Some(y) = f.sqrt(self.rhs(x)) {
                let y = if rng.gen::<bool>() { f.neg(y) } else { y };
                return Point::Affine(x, y);
            }
        }
    }

    // ---- Jacobian arithmetic -------------------------------------------------

    pub fn to_jacobian(&self, p: &Point<F::Elem>) -> Jacobian<F::Elem> {
        let f = &self.field;
        match *p {
            Point::Infinity => Jacobian {
                x: f.one(),
                y: f.one(),
                z: f.zero(),
            },
            Point::Affine(x, y) => Jacobian { x, y, z: f.one() },
        }
    }

    pub fn to_affine(&self, p: &Jacobian<F::Elem>) -> Point<F::Elem> {
        let f = &self.field;
        if f.is_zero(p.z) {
            return Point::Infinity;
        }
        let zi = f.inv(p.z).expect("z != 0");
        let zi2 = f.sqr(zi);
        Point::Affine(f.mul(p.x, zi2), f.mul(p.y, f.mul(zi2, zi)))
    }

    #[inline]
    pub fn is_identity(&self, p: &Jacobian<F::Elem>) -> bool {
        self.field.is_zero(p.z)
    }

    pub fn jacobian_double(&self, p: &Jacobian<F::Elem>) -> Jacobian<F::Elem> {
        let f = &self.field;
        if f.is_zero(p.z) || f.is_zero(p.y) {
            return self.to_jacobian(&Point::Infinity);
        }
        let xx = f.sqr(p.x);
        let yy = f.sqr(p.y);
        let yyyy = f.sqr(yy);
        let zz = f.sqr(p.z);
        let s = f.double(f.double(f.mul(p.x, yy)));
        let m = f.add(f.add(f.double(xx), xx), f.mul(self.a, f.sqr(zz)));
        let x3 = f.sub(f.sqr(m), f.double(s));
        let eight_yyyy = f.double(f.double(f.double(yyyy)));
        let y3 = f.sub(f.mul(m, f.sub(s, x3)), eight_yyyy);
        let z3 = f.double(f.mul(p.y, p.z));
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// P + Q with Q affine (mixed addition).
    pub fn jacobian_add_affine(&self, p: &Jacobian<F::Elem>, q: &Point<F::Elem>) -> Jacobian<F::Elem> {
        let f = &self.field;
        let (qx, qy) = match *q {
            Point::Infinity => return *p,
            Point::Affine(x, y) => (x, y),
        };
        if f.is_zero(p.z) {
            return self.to_jacobian(q);
        }
        let z1z1 = f.sqr(p.z);
        let u2 = f.mul(qx, z1z1);
        let s2 = f.mul(qy, f.mul(p.z, z1z1));
        let h = f.sub(u2, p.x);
        let r = f.sub(s2, p.y);
        if f.is_zero(h) {
            return if f.is_zero(r) {
                self.jacobian_double(p)
            } else {
                self.to_jacobian(&Point::Infinity)
            };
        }
        let hh = f.sqr(h);
        let hhh = f.mul(h, hh);
        let v = f.mul(p.x, hh);
        let x3 = f.sub(f.sub(f.sqr(r), hhh), f.double(v));
        let y3 = f.sub(f.mul(r, f.sub(v, x3)), f.mul(p.y, hhh));
        let z3 = f.mul(p.z, h);
        Jacobian { x: x3, y: y3, z: z3 }
    }

    pub fn jacobian_add(&self, p: &Jacobian<F::Elem>, q: &Jacobian<F::Elem>) -> Jacobian<F::Elem> {
        let f = &self.field;
        if f.is_zero(p.z) {
            return *q;
        }
        if f.is_zero(q.z) {
            return *p;
        }
        let z1z1 = f.sqr(p.z);
        let z2z2 = f.sqr(q.z);
        let u1 = f.mul(p.x, z2z2);
        let u2 = f.mul(q.x, z1z1);
        let s1 = f.mul(p.y, f.mul(q.z, z2z2));
        let s2 = f.mul(q.y, f.mul(p.z, z1z1));
        let h = f.sub(u2, u1);
        let r = f.sub(s2, s1);
        if f.is_zero(h) {
            return if f.is_zero(r) {
                self.jacobian_double(p)
            } else {
                self.to_jacobian(&Point::Infinity)
            };
        }
        let hh = f.sqr(h);
        let hhh = f.mul(h, hh);
        let v = f.mul(u1, hh);
        let x3 = f.sub(f.sub(f.sqr(r), hhh), f.double(v));
        let y3 = f.sub(f.mul(r, f.sub(v, x3)), f.mul(s1, hhh));
        let z3 = f.mul(f.mul(p.z, q.z), h);
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// k * P for an affine P, left-to-right double-and-add.
    pub fn mul_jacobian(&self, p: &Point<F::Elem>, k: u128) -> Jacobian<F::Elem> {
        let mut acc = self.to_jacobian(&Point::Infinity);
        if k == 0 || p.is_infinity() {
            return acc;
        }
        for i in (0..128 - k.leading_zeros()).rev() {
            acc = self.jacobian_double(&acc);
            if (k >> i) & 1 == 1 {
                acc = self.jacobian_add_affine(&acc, p);
            }
        }
        acc
    }

    /// k * P for a Jacobian P.
    pub fn jacobian_mul(&self, p: &Jacobian<F::Elem>, k: u128) -> Jacobian<F::Elem> {
        let mut acc = self.to_jacobian(&Point::Infinity);
        if k == 0 || self.is_identity(p) {
            return acc;
        }
        for i in (0..128 - k.leading_zeros()).rev() {
            acc = self.jacobian_double(&acc);
            if (k >> i) & 1 == 1 {
                acc = self.jacobian_add(&acc, p);
            }
        }
        acc
    }
}

impl CurveOverField<PrimeField> {
    /// The quadratic twist y^2 = x^3 + a d^2 x + b d^3 by the field's least
    /// nonresidue d.
    pub fn quadratic_twist(&self) -> Self {
        let f = &self.field;
        let d = f.nonresidue();
        let d2 = f.sqr(d);
        CurveOverField {
            field: f.clone(),
            a: f.mul(self.a, d2),
            b: f.mul(self.b, f.mul(d2, d)),
        }
    }

    /// The same curve over F_{p^2}.
    pub fn base_change(&self) -> CurveOverField<QuadraticExtension> {
        let k = QuadraticExtension::new(self.field.clone());
        CurveOverField {
            a: k.embed(self.a),
            b: k.embed(self.b),
            field: k,
        }
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// Canonical coefficients `(A, B)`.
    pub fn coefficients(&self) -> (u64, u64) {
        (self.field.value(self.a), self.field.value(self.b))
    }

    /// Convenience constructor from canonical residues.
    pub fn from_coefficients(p: u64, a: u64, b: u64) -> Result<Self, CurveError> {
        let field = PrimeField::new(p)?;
        let (a, b) = (field.elem(a), field.elem(b));
        CurveOverField::new(field, a, b)
    }
}
