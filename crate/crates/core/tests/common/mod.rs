//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's field or curve arithmetic.
#![allow(dead_code)]

use isodense_core::dataset::bundled;
use num_traits::ToPrimitive;

/// Plain sieve of Eratosthenes; `is_prime[n]` for n <= limit.
pub fn sieve(limit: usize) -> Vec<bool> {
    let mut is_prime = vec![true; limit + 1];
    is_prime[0] = false;
    if limit >= 1 {
        is_prime[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if is_prime[i] {
            let mut j = i * i;
            while j <= limit {
                is_prime[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_prime
}

pub fn primes_upto(limit: usize) -> Vec<u64> {
    sieve(limit)
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// (label, ainvs) for every curve in the bundled dataset.
pub fn bundled_curves() -> Vec<(String, [i64; 5], u64)> {
    let mut out = Vec::new();
    for rec in bundled() {
        for c in &rec.curves {
            let a = c.ainvs.clone().map(|x| x.to_i64().expect("small coefficients"));
            out.push((c.label.clone(), a, rec.conductor));
        }
    }
    out
}

/// c4 and c6 of a long Weierstrass model.
pub fn c4_c6(a: &[i64; 5]) -> (i128, i128) {
    let [a1, a2, a3, a4, a6] = a.map(|x| x as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    (b2 * b2 - 24 * b4, -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6)
}

fn md(x: i128, p: u64) -> u64 {
    x.rem_euclid(p as i128) as u64
}

/// Short model y^2 = x^3 + A x + B with A = -27 c4, B = -54 c6, reduced mod p.
pub fn short_model(a: &[i64; 5], p: u64) -> (u64, u64) {
    let (c4, c6) = c4_c6(a);
    (md(-27 * c4, p), md(-54 * c6, p))
}

/// Curve over a small prime field with textbook affine arithmetic.
pub struct Small {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

pub type Pt = Option<(u64, u64)>;

impl Small {
    pub fn new(p: u64, a: u64, b: u64) -> Self {
        Small { p, a: a % p, b: b % p }
    }

    pub fn is_singular(&self) -> bool {
        let p = self.p as u128;
        let (a, b) = (self.a as u128, self.b as u128);
        (4 * a * a % p * a + 27 * b * b).is_multiple_of(p)
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        (x as u128 * y as u128 % self.p as u128) as u64
    }

    fn inv(&self, x: u64) -> u64 {
        // Fermat
        let mut r = 1u64;
        let mut b = x % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn rhs(&self, x: u64) -> u64 {
        let x2 = self.mul(x, x);
        (self.mul(x2, x) + self.mul(self.a, x) + self.b) % self.p
    }

    pub fn add(&self, u: Pt, v: Pt) -> Pt {
        let p = self.p;
        let (x1, y1) = match u {
            None => return v,
            Some(q) => q,
        };
        let (x2, y2) = match v {
            None => return u,
            Some(q) => q,
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return None;
            }
            let num = (3 * self.mul(x1, x1) + self.a) % p;
            self.mul(num, self.inv(2 * y1 % p))
        } else {
            let num = (y2 + p - y1) % p;
            self.mul(num, self.inv((x2 + p - x1) % p))
        };
        let x3 = (self.mul(lambda, lambda) + 2 * p - x1 - x2) % p;
        let y3 = (self.mul(lambda, (x1 + p - x3) % p) + p - y1) % p;
        Some((x3, y3))
    }

    pub fn scalar(&self, pt: Pt, mut k: u64) -> Pt {
        let mut acc = None;
        let mut base = pt;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Every point, the identity first.
    pub fn points(&self) -> Vec<Pt> {
        let p = self.p as usize;
        let mut roots: Vec<Vec<u64>> = vec![Vec::new(); p];
        for y in 0..self.p {
            roots[(y * y % self.p) as usize].push(y);
        }
        let mut out = vec![None];
        for x in 0..self.p {
            for &y in &roots[self.rhs(x) as usize] {
                out.push(Some((x, y)));
            }
        }
        out
    }

    /// (n1, n2) with n1 | n2 from the exponent of the enumerated group.
    pub fn structure(&self) -> (u64, u64) {
        let pts = self.points();
        let n = pts.len() as u64;
        let primes: Vec<u64> = (2..=n).filter(|&q| n.is_multiple_of(q) && (2..q).all(|r| q % r != 0)).collect();
        let mut exponent = 1u64;
        for &pt in &pts {
            let mut order = n;
            for &q in &primes {
                while order.is_multiple_of(q) && self.scalar(pt, order / q).is_none() {
                    order /= q;
                }
            }
            exponent = lcm(exponent, order);
        }
        (n / exponent, exponent)
    }
}

/// Trace by counting with a table of squares.
pub fn naive_trace(p: u64, a: u64, b: u64) -> i64 {
    let c = Small::new(p, a, b);
    let mut is_sq = vec![false; p as usize];
    for y in 1..p {
        is_sq[(y * y % p) as usize] = true;
    }
    let mut sum = 0i64;
    for x in 0..p {
        let r = c.rhs(x);
        if r != 0 {
            sum += if is_sq[r as usize] { 1 } else { -1 };
        }
    }
    -sum
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
