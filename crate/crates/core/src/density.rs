//! Exact evaluation of the isomorphism density series.
//!
//! A profile lists the exceptional levels m = 1..M-1 explicitly and describes
//! levels m >= M by a geometric tail: constant d-values and image sizes growing
//! by l^g per level. The tail is summed in closed form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational number (always reduced, positive denominator).
pub type ExactRational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("growth exponent must be 2 or 4, got {0}")]
    BadGrowth(u32),
    #[error("image size at level {level} must be positive")]
    NonPositiveSize { level: u32 },
    #[error("relative degree {degree} is neither 1 nor {ell}")]
    BadDegree { degree: u64, ell: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid rational {0:?}")]
    BadRational(String),
}

/// One exceptional level of a profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub m: u32,
    #[serde(rename = "sizeG")]
    pub size_g: u64,
    #[serde(rename = "sizeGp")]
    pub size_gp: u64,
    #[serde(with = "rational_string")]
    pub d: ExactRational,
    #[serde(with = "rational_string")]
    pub dp: ExactRational,
}

/// Levels m >= `level`: sizes `size_g * l^(g (m - level))`, d-values constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    #[serde(rename = "M")]
    pub level: u32,
    #[serde(rename = "sizeG")]
    pub size_g: u64,
    #[serde(rename = "sizeGp")]
    pub size_gp: u64,
    #[serde(with = "rational_string")]
    pub d: ExactRational,
    #[serde(with = "rational_string")]
    pub dp: ExactRational,
    pub g: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub ell: u64,
    #[serde(default)]
    pub head: Vec<LevelEntry>,
    pub tail: Tail,
}

impl DensityProfile {
    /// `(d, d')` at level `m >= 1`.
    pub fn d_at(&self, m: u32) -> (ExactRational, ExactRational) {
        match self.head.iter().find(|e| e.m == m) {
            Some(e) if m < self.tail.level => (e.d.clone(), e.dp.clone()),
            _ => (self.tail.d.clone(), self.tail.dp.clone()),
        }
    }
}

/// A broken profile constraint, located at a level (`None` for profile-wide).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub level: Option<u32>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(m) => write!(f, "level {m}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

pub fn rational(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"num/den"` or an integer string.
pub fn parse_rational(s: &str) -> Result<ExactRational, DensityError> {
    let bad = || DensityError::BadRational(s.to_string());
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// `"num/den"`, with integers rendered as `"n/1"` so the form is uniform.
pub fn format_rational(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion truncated after `digits` fractional digits; a trailing
/// "…" marks a truncated (non-terminating or longer) expansion.
pub fn to_decimal(r: &ExactRational, digits: usize) -> String {
    let neg = r.is_negative();
    let r = r.abs();
    let (int, mut rem) = r.numer().div_rem(r.denom());
    let den = r.denom();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if rem.is_zero() {
        return out;
    }
    out.push('.');
    let ten = BigInt::from(10);
    for _ in 0..digits {
        rem *= &ten;
        let (q, r2) = rem.div_rem(den);
        out.push(char::from(b'0' + q.to_u8().expect("single digit")));
        rem = r2;
        if rem.is_zero() {
            return out;
        }
    }
    out.push('…');
    out
}

pub mod rational_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &ExactRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

fn pow(ell: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(ell), e as usize)
}

/// Evaluate the series exactly:
/// 1 - sum_{m<M} (d_m/|G(l^m)| + d'_m/|G'(l^m)|) - (d/|G(l^M)| + d'/|G'(l^M)|) * l^g/(l^g - 1).
pub fn eval_density(profile: &DensityProfile) -> Result<ExactRational, DensityError> {
    let tail = &profile.tail;
    if tail.g != 2 && tail.g != 4 {
        return Err(DensityError::BadGrowth(tail.g));
    }
    let mut total = ExactRational::one();
    for e in &profile.head {
        if e.size_g == 0 || e.size_gp == 0 {
            return Err(DensityError::NonPositiveSize { level: e.m });
        }
        total -= &e.d / BigInt::from(e.size_g) + &e.dp / BigInt::from(e.size_gp);
    }
    if tail.size_g == 0 || tail.size_gp == 0 {
        return Err(DensityError::NonPositiveSize { level: tail.level });
    }
    let growth = pow(profile.ell, tail.g);
    let factor = BigRational::new(growth.clone(), growth - 1);
    total -= (&tail.d / BigInt::from(tail.size_g) + &tail.dp / BigInt::from(tail.size_gp)) * factor;
    Ok(total)
}

/// (l^4 - 2 l^2 - 1) / (l^4 - 1), the density for a pair with maximal images.
pub fn f_closed_form(ell: u64) -> Result<ExactRational, DensityError> {
    if !crate::arith::is_prime_u64(ell) {
        return Err(DensityError::NotPrime(ell));
    }
    let l2 = pow(ell, 2);
    let l4 = pow(ell, 4);
    Ok(BigRational::new(&l4 - 2 * &l2 - 1, l4 - 1))
}

/// Profile of a pair whose l-adic images are as large as possible:
/// level 1, |G(l)| = (l-1) l, d = d' = 1 - 1/l, quartic growth.
pub fn maximal_profile(ell: u64) -> DensityProfile {
    let size = (ell - 1) * ell;
    let d = BigRational::new(BigInt::from(ell - 1), BigInt::from(ell));
    DensityProfile {
        ell,
        head: Vec::new(),
        tail: Tail {
            level: 1,
            size_g: size,
            size_gp: size,
            d: d.clone(),
            dp: d,
            g: 4,
        },
    }
}

/// d = 1 - 1/[L L' : L] from the relative degree of the compositum.
pub fn d_from_degree(relative_degree: u64, ell: u64) -> Result<ExactRational, DensityError> {
    if relative_degree != 1 && relative_degree != ell {
        return Err(DensityError::BadDegree {
            degree: relative_degree,
            ell,
        });
    }
    Ok(ExactRational::one() - BigRational::new(BigInt::one(), BigInt::from(relative_degree)))
}

/// All broken invariants of a profile; empty iff it is valid.
pub fn validate_profile(profile: &DensityProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    let ell = profile.ell;
    let mut push = |level: Option<u32>, message: String| out.push(Violation { level, message });

    if !crate::arith::is_prime_u64(ell) {
        push(None, format!("ell = {ell} is not prime"));
        return out;
    }
    let tail = &profile.tail;
    if tail.g != 2 && tail.g != 4 {
        push(None, format!("growth exponent g = {} is not 2 or 4", tail.g));
    }
    if tail.level < 1 {
        push(None, "tail level M must be at least 1".to_string());
    }
    let levels: Vec<u32> = profile.head.iter().map(|e| e.m).collect();
    let expected: Vec<u32> = (1..tail.level.max(1)).collect();
    if levels != expected {
        push(
            None,
            format!("head levels {levels:?} should be exactly 1..M-1 = {expected:?}"),
        );
    }

    let zero = ExactRational::zero();
    let one = ExactRational::one();
    let generic = BigRational::new(BigInt::from(ell - 1), BigInt::from(ell));
    let non_cm = tail.g == 4;
    let entries = profile
        .head
        .iter()
        .map(|e| (e.m, e.size_g, e.size_gp, &e.d, &e.dp))
        .chain(std::iter::once((tail.level, tail.size_g, tail.size_gp, &tail.d, &tail.dp)));
    for (m, sg, sgp, d, dp) in entries {
        for (name, v) in [("d", d), ("dp", dp)] {
            if *v < zero || *v > one {
                push(Some(m), format!("{name} = {} outside [0, 1]", format_rational(v)));
            } else if non_cm && !v.is_zero() && *v != generic {
                push(
                    Some(m),
                    format!(
                        "{name} = {} must be 0 or {} for a non-CM profile",
                        format_rational(v),
                        format_rational(&generic)
                    ),
                );
            }
        }
        if sg == 0 || sgp == 0 {
            push(Some(m), "image sizes must be positive".to_string());
            continue;
        }
        let ok = sg == sgp || sg == sgp * ell || sgp == sg * ell;
        if !ok {
            push(
                Some(m),
                format!("sizeG/sizeGp = {sg}/{sgp} is not 1, {ell} or 1/{ell}"),
            );
        }
    }
    out
}
