//! Densities of primes at which two isogenous elliptic curves have isomorphic
//! groups of points.
//!
//! The [`density`] module evaluates the exact series for a density profile;
//! [`sweep`] measures the same quantity by computing and comparing the group
//! structures of both reductions at every prime up to a bound.

pub mod arith;
pub mod curve;
pub mod dataset;
pub mod density;
pub mod ffield;
pub mod count;
pub mod structure;
pub mod sweep;
