//! Trace of Frobenius and group orders over F_p and F_{p^2}.
//!
//! Below [`NAIVE_THRESHOLD`] the trace is the character sum over x; above it,
//! Mestre's baby-step giant-step method on the curve and its quadratic twist
//! narrows the Hasse interval down to a single candidate.

use std::collections::HashMap;

use rand::Rng;

use crate::arith::{crt, isqrt_u128, lcm_u128};
use crate::curve::{CurveOverField, Point};
use crate::ffield::{Field, Fp, PrimeField};
use crate::structure::{factor, point_order, FactoredInteger};

pub const NAIVE_THRESHOLD: u64 = 1 << 16;
/// Points drawn (on each of the curve and its twist) before falling back to
/// the naive count.
pub const BSGS_ITERATION_CAP: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TraceRecord {
    pub p: u64,
    pub t: i64,
    /// #E(F_p)
    pub n: u64,
    /// #E(F_{p^2})
    pub n2: u128,
    pub supersingular: bool,
}

impl TraceRecord {
    pub fn from_trace(p: u64, t: i64) -> Self {
        let n = (p as i64 + 1 - t) as u64;
        let mut r = TraceRecord {
            p,
            t,
            n,
            n2: 0,
            supersingular: t == 0,
        };
        r.n2 = order_fp2(&r);
        r
    }

    /// |t| <= 2 sqrt(p)
    pub fn satisfies_hasse(&self) -> bool {
        let t = self.t.unsigned_abs() as u128;
        t * t <= 4 * self.p as u128
    }

    /// Order of the quadratic twist over F_p, p + 1 + t.
    pub fn twist_order(&self) -> u64 {
        (self.p as i64 + 1 + self.t) as u64
    }

    /// Factorization of #E(F_{p^2}) = #E(F_p) * #E^t(F_p).
    pub fn factor_n2(&self) -> FactoredInteger {
        factor(self.n as u128).mul(&factor(self.twist_order() as u128))
    }
}

/// #E(F_{p^2}) = p^2 + 1 - (t^2 - 2p).
pub fn order_fp2(tr: &TraceRecord) -> u128 {
    let p = tr.p as u128;
    let t2 = (tr.t as i128 * tr.t as i128) as u128;
    p * p + 1 + 2 * p - t2
}

/// Exact trace of Frobenius for a curve over F_p, p > 3.
pub fn trace_frobenius<R: Rng + ?Sized>(c: &CurveOverField<PrimeField>, rng: &mut R) -> TraceRecord {
    let p = c.p();
    let t = if p < NAIVE_THRESHOLD {
        trace_naive(c)
    } else {
        trace_bsgs(c, rng).unwrap_or_else(|| trace_naive(c))
    };
    TraceRecord::from_trace(p, t)
}

/// t = -sum_x (x^3 + A x + B | p), walking the cubic by finite differences
/// and reading characters from a table of squares.
pub fn trace_naive(c: &CurveOverField<PrimeField>) -> i64 {
    let p = c.p();
    let (a, b) = c.coefficients();
    let pu = p as usize;
    let mut chi = vec![-1i8; pu];
    chi[0] = 0;
    for y in 1..=(p - 1) / 2 {
        chi[((y * y) % p) as usize] = 1;
    }
    let add = |x: u64, y: u64| {
        let s = x + y;
        if s >= p {
            s - p
        } else {
            s
        }
    };
    // f(x) = x^3 + a x + b, d1(x) = f(x+1) - f(x) = 3x^2 + 3x + 1 + a,
    // d2(x) = d1(x+1) - d1(x) = 6x + 6, d3 = 6
    let mut f = b;
    let mut d1 = add(1, a);
    let mut d2 = 6 % p;
    let d3 = 6 % p;
    let mut sum: i64 = 0;
    for _ in 0..p {
        sum += chi[f as usize] as i64;
        f = add(f, d1);
        d1 = add(d1, d2);
        d2 = add(d2, d3);
    }
    -sum
}

/// Hasse interval [lo, hi] for #E(F_p).
pub fn hasse_interval(p: u64) -> (u128, u128) {
    let w = isqrt_u128(4 * p as u128);
    let mid = p as u128 + 1;
    (mid - w, mid + w)
}

/// Mestre's method. Returns `None` if the iteration cap is reached.
pub fn trace_bsgs<R: Rng + ?Sized>(c: &CurveOverField<PrimeField>, rng: &mut R) -> Option<i64> {
    let p = c.p();
    let twist = c.quadratic_twist();
    let (lo, hi) = hasse_interval(p);
    let sum = 2 * p as u128 + 2;
    // exponent multiples known so far on E and on its twist
    let mut m_e = 1u128;
    let mut m_t = 1u128;
    for _ in 0..BSGS_ITERATION_CAP {
        // #E lies in [lo, hi]; #E^t = 2p + 2 - #E lies in the same interval
        let pt = c.random_point(rng);
        m_e = lcm_u128(m_e, order_with_known(c, &pt, m_e, lo, hi)?);
        if let Some(n) = unique_candidate(m_e, m_t, sum, lo, hi) {
            return Some(p as i64 + 1 - n as i64);
        }
        let pt = twist.random_point(rng);
        m_t = lcm_u128(m_t, order_with_known(&twist, &pt, m_t, lo, hi)?);
        if let Some(n) = unique_candidate(m_e, m_t, sum, lo, hi) {
            return Some(p as i64 + 1 - n as i64);
        }
    }
    None
}

/// The only N in [lo, hi] with N = 0 mod m_e and sum - N = 0 mod m_t, if unique.
fn unique_candidate(m_e: u128, m_t: u128, sum: u128, lo: u128, hi: u128) -> Option<u128> {
    let (r, l) = crt(0, m_e, sum % m_t, m_t)?;
    let first = if lo <= r {
        r
    } else {
        r + (lo - r).div_ceil(l) * l
    };
    // `first` is the smallest candidate >= lo; unique iff the next is past hi
    (first <= hi && first + l > hi).then_some(first)
}

/// Exact order of P, given that the group order lies in [lo, hi] and is a
/// multiple of `known`. Returns `None` only on an internal inconsistency.
fn order_with_known(
    c: &CurveOverField<PrimeField>,
    pt: &Point<Fp>,
    known: u128,
    lo: u128,
    hi: u128,
) -> Option<u128> {
    let q = c.mul(pt, known);
    let k_lo = lo.div_ceil(known).max(1);
    let k_hi = hi / known;
    let k = if k_lo > k_hi {
        return None;
    } else {
        bsgs_multiple(c, &q, k_lo, k_hi)?
    };
    let multiple = factor(k).mul(&factor(known));
    point_order(c, pt, &multiple).ok()
}

/// Some k >= 1 with k Q = O, searching [k_lo, k_hi] by baby-step giant-step.
/// The result is a multiple of ord(Q), possibly outside the range when a
/// baby step already hits the identity.
fn bsgs_multiple(c: &CurveOverField<PrimeField>, q: &Point<Fp>, k_lo: u128, k_hi: u128) -> Option<u128> {
    if q.is_infinity() {
        return Some(1);
    }
    let width = k_hi - k_lo + 1;
    let s = isqrt_u128(width) / 2 + 1;
    // baby steps j Q for j = 1..=s, keyed by x
    let mut table: HashMap<Fp, (u128, Fp)> = HashMap::with_capacity(s as usize);
    let mut jq = *q;
    for j in 1..=s {
        match jq {
            Point::Infinity => return Some(j),
            Point::Affine(x, y) => {
                table.entry(x).or_insert((j, y));
            }
        }
        jq = c.add(&jq, q);
    }
    // giant steps: centres c = k_lo + s, k_lo + s + (2s + 1), ...
    let stride = 2 * s + 1;
    let step = c.mul(q, stride);
    let mut centre = k_lo + s;
    let mut g = c.mul(q, centre);
    let f = c.field();
    loop {
        match g {
            Point::Infinity => return Some(centre),
            Point::Affine(x, y) => {
                if let Some(&(j, yj)) = table.get(&x) {
                    // cQ = jQ  => (c - j) Q = O;  cQ = -jQ => (c + j) Q = O
                    return Some(if y == yj { centre - j } else { debug_assert_eq!(y, f.neg(yj)); centre + j });
                }
            }
        }
        if centre > k_hi + s {
            return None;
        }
        centre += stride;
        g = c.add(&g, &step);
    }
}
