//! Machine-word integer helpers shared by the field, counting and factoring code.
//!
//! `Montgomery` is a plain odd-modulus Montgomery context; `PrimeField` wraps
//! it for field arithmetic and the Pollard rho factoriser uses it directly
//! for composite moduli.

/// Montgomery arithmetic modulo an odd `n < 2^63` with `R = 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Montgomery {
    n: u64,
    n_neg_inv: u64,
    r_mod_n: u64,
    r2_mod_n: u64,
}

impl Montgomery {
    pub fn new(n: u64) -> Self {
        assert!(n % 2 == 1 && n < (1 << 63), "Montgomery modulus must be odd and < 2^63");
        // Newton iteration doubles the number of correct low bits each step.
        let mut inv: u64 = n;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let r_mod_n = ((1u128 << 64) % n as u128) as u64;
        let r2_mod_n = ((r_mod_n as u128 * r_mod_n as u128) % n as u128) as u64;
        Montgomery {
            n,
            n_neg_inv: inv.wrapping_neg(),
            r_mod_n,
            r2_mod_n,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.n
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.n_neg_inv);
        let u = ((t + m as u128 * self.n as u128) >> 64) as u64;
        if u >= self.n {
            u - self.n
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.redc((a % self.n) as u128 * self.r2_mod_n as u128)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline]
    pub fn one(&self) -> u64 {
        self.r_mod_n
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.n - b
        }
    }

    pub fn pow(&self, mut base: u64, mut e: u128) -> u64 {
        let mut acc = self.r_mod_n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

#[inline]
fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

/// `a * b mod m` for full-width moduli. Falls back to shift-and-add when the
/// product does not fit.
pub fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (a, mut b) = (a % m, b % m);
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    let mut acc = 0u128;
    let mut x = a;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_u128(acc, x, m);
        }
        x = add_mod_u128(x, x, m);
        b >>= 1;
    }
    acc
}

pub fn pow_mod_u128(mut base: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        e >>= 1;
    }
    acc
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit inputs (the first twelve prime bases
/// are a proven witness set below 3.3 * 10^24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin beyond 64 bits. Deterministic below 3.3 * 10^24; above that the
/// twenty prime bases make a false positive astronomically unlikely.
pub fn is_prime_u128(n: u128) -> bool {
    if n <= u64::MAX as u128 {
        return is_prime_u64(n as u64);
    }
    const BASES: [u128; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u128(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u128(a, b) * b
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt_u64(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}

/// Exponent of the prime `q` in `n` (`n > 0`).
pub fn valuation(mut n: u128, q: u128) -> u32 {
    debug_assert!(n > 0 && q > 1);
    let mut v = 0;
    while n.is_multiple_of(q) {
        n /= q;
        v += 1;
    }
    v
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Jacobi symbol (a / n) for odd n.
pub fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Solve `x = r1 mod m1`, `x = r2 mod m2`; returns `(r, lcm)` or `None` when
/// the congruences are incompatible.
pub fn crt(r1: u128, m1: u128, r2: u128, m2: u128) -> Option<(u128, u128)> {
    let g = gcd_u128(m1, m2);
    let (r1, r2) = (r1 % m1, r2 % m2);
    let diff = if r2 >= r1 { r2 - r1 } else { m2 - (r1 - r2) % m2 };
    if diff % g != 0 {
        return None;
    }
    let l = m1 / g * m2;
    let m2g = m2 / g;
    if m2g == 1 {
        return Some((r1 % l, l));
    }
    let inv = inv_mod_u128((m1 / g) % m2g, m2g)?;
    let k = mul_mod_u128((diff / g) % m2g, inv, m2g);
    Some(((r1 + mul_mod_u128(k, m1, l)) % l, l))
}

fn inv_mod_u128(a: u128, m: u128) -> Option<u128> {
    if m <= (1u128 << 62) {
        return inv_mod(a as u64, m as u64).map(u128::from);
    }
    // m is a lcm of point orders here, so it stays below the Hasse bound;
    // this path is only reached for enormous fields.
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}
