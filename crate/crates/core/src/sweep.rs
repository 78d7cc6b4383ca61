//! Prime sweeps: compare the reductions of an isogenous pair at every prime up
//! to a bound and tally how often their groups are isomorphic.
//!
//! Conventions:
//! * p = 2 and p = 3 are skipped (no short Weierstrass model) and, together
//!   with primes of bad reduction, counted as isomorphic in `iso_ratio`, whose
//!   denominator is pi(X). `good_iso_ratio` uses good primes only.
//! * Every random choice at a prime comes from a generator seeded by
//!   (seed, p, curve index), so results do not depend on scheduling.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::{trace_frobenius, TraceRecord};
use crate::curve::{CurveError, CurveOverField, RationalCurvePair, Reduction};
use crate::ffield::PrimeField;
use crate::structure::{
    factor, group_structure, prime_to_ell_part, sylow_shape, GroupShape, StructureError,
};

/// Number of primes handed to a worker at a time.
pub const BLOCK_SIZE: usize = 1 << 14;
pub const DEFAULT_M_MAX: u32 = 7;

const CURVE_E: u64 = 0;
const CURVE_E_PRIME: u64 = 1;
const CURVE_E_FP2: u64 = 2;
const CURVE_E_PRIME_FP2: u64 = 3;

/// A theorem-level invariant failed, or an internal computation gave up.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error("p = {p}: traces differ ({t_e} vs {t_ep})")]
    TraceMismatch { p: u64, t_e: i64, t_ep: i64 },
    #[error("p = {p}: trace {t} violates the Hasse bound")]
    Hasse { p: u64, t: i64 },
    #[error("p = {p}: shapes {e:?} and {ep:?} are not one volcano step apart")]
    VolcanoStep { p: u64, e: GroupShape, ep: GroupShape },
    #[error("p = {p}: prime-to-l parts of {e:?} and {ep:?} differ")]
    PrimeToEll { p: u64, e: GroupShape, ep: GroupShape },
    #[error("p = {p}: supersingular reduction but shapes {e:?} and {ep:?} differ")]
    SupersingularNoniso { p: u64, e: GroupShape, ep: GroupShape },
    #[error("p = {p}: supersingular reduction with shape {shape:?}, expected Z/(p+1) or Z/2 x Z/((p+1)/2)")]
    SupersingularShape { p: u64, shape: GroupShape },
    #[error("p = {p}: {source}")]
    Structure { p: u64, source: StructureError },
    #[error("p = {p}: {source}")]
    Curve { p: u64, source: CurveError },
    #[error("sweep bound must be at least 5, got {0}")]
    BoundTooSmall(u64),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

impl SweepError {
    /// The prime at which the failure occurred, if any.
    pub fn prime(&self) -> Option<u64> {
        match self {
            SweepError::TraceMismatch { p, .. }
            | SweepError::Hasse { p, .. }
            | SweepError::VolcanoStep { p, .. }
            | SweepError::PrimeToEll { p, .. }
            | SweepError::SupersingularNoniso { p, .. }
            | SweepError::SupersingularShape { p, .. }
            | SweepError::Structure { p, .. }
            | SweepError::Curve { p, .. } => Some(*p),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Bad,
    SupersingularIso,
    Iso,
    Noniso,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Bad => "bad",
            Status::SupersingularIso => "supersingular_iso",
            Status::Iso => "iso",
            Status::Noniso => "noniso",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeOutcome {
    pub p: u64,
    pub status: Status,
    pub trace: Option<i64>,
    pub shape_e: Option<GroupShape>,
    pub shape_ep: Option<GroupShape>,
    /// Largest m <= m_max with full l^m-torsion over F_p, for E and E'.
    pub torsion_level_e: u32,
    pub torsion_level_ep: u32,
    /// Shapes over F_{p^2}, computed only for isomorphic primes when requested.
    pub shapes_fp2: Option<(GroupShape, GroupShape)>,
    pub anomalous: bool,
}

impl PrimeOutcome {
    pub fn full_torsion_e(&self, m: u32) -> bool {
        m <= self.torsion_level_e
    }

    pub fn full_torsion_ep(&self, m: u32) -> bool {
        m <= self.torsion_level_ep
    }

    fn bad(p: u64) -> Self {
        PrimeOutcome {
            p,
            status: Status::Bad,
            trace: None,
            shape_e: None,
            shape_ep: None,
            torsion_level_e: 0,
            torsion_level_ep: 0,
            shapes_fp2: None,
            anomalous: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub seed: u64,
    pub workers: usize,
    pub m_max: u32,
    pub anomalous: bool,
    /// Keep every per-prime outcome (for CSV export).
    pub record_outcomes: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            seed: 0,
            workers: 1,
            m_max: DEFAULT_M_MAX,
            anomalous: false,
            record_outcomes: false,
        }
    }
}

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for the random choices made for one curve at one prime.
pub fn prime_rng(seed: u64, p: u64, curve_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed) ^ p) ^ curve_index))
}

// ---------------------------------------------------------------- sieve

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in [lo, hi], in increasing order, by a segmented sieve.
pub struct PrimeSegments {
    base: Vec<u64>,
    next: u64,
    hi: u64,
    buffer: Vec<u64>,
    pos: usize,
}

const SEGMENT: u64 = 1 << 18;

impl PrimeSegments {
    pub fn new(lo: u64, hi: u64) -> Self {
        let root = crate::arith::isqrt_u64(hi);
        PrimeSegments {
            base: simple_sieve(root),
            next: lo.max(2),
            hi,
            buffer: Vec::new(),
            pos: 0,
        }
    }

    fn fill(&mut self) -> bool {
        while self.next <= self.hi {
            let start = self.next;
            let end = (start + SEGMENT - 1).min(self.hi);
            self.next = end + 1;
            let mut composite = vec![false; (end - start + 1) as usize];
            for &q in &self.base {
                if q * q > end {
                    break;
                }
                let mut m = (start.div_ceil(q) * q).max(q * q);
                while m <= end {
                    composite[(m - start) as usize] = true;
                    m += q;
                }
            }
            self.buffer.clear();
            self.pos = 0;
            self.buffer.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| start + i as u64),
            );
            if !self.buffer.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for PrimeSegments {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buffer.len() && !self.fill() {
            return None;
        }
        let p = self.buffer[self.pos];
        self.pos += 1;
        Some(p)
    }
}

/// Primes p <= x in increasing order.
pub fn sieve_primes(x: u64) -> PrimeSegments {
    PrimeSegments::new(2, x)
}

/// pi(x).
pub fn prime_count(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    sieve_primes(x).count() as u64
}

// ------------------------------------------------------------ per prime

fn reduce(pair: &RationalCurvePair, p: u64) -> Result<Option<[CurveOverField<PrimeField>; 2]>, SweepError> {
    let err = |source| SweepError::Curve { p, source };
    let e = pair.e.reduce_mod_p(p).map_err(err)?;
    let ep = pair.e_prime.reduce_mod_p(p).map_err(err)?;
    Ok(match (e, ep) {
        (Reduction::Good(e), Reduction::Good(ep)) => Some([e, ep]),
        _ => None,
    })
}

fn torsion_level(s: &GroupShape, ell: u64, m_max: u32) -> u32 {
    sylow_shape(s, ell).0.min(m_max)
}

/// Check the invariants relating the two shapes over F_p at a good prime.
///
/// At a supersingular prime E(F_p) is Z/(p+1) or, when p = 3 mod 4,
/// possibly Z/2 x Z/((p+1)/2). For odd l the two reductions therefore agree
/// (their 2-parts cannot differ); for l = 2 they may land on different
/// shapes of that pair, which is one volcano step.
fn check_shapes(p: u64, ell: u64, tr: &TraceRecord, e: &GroupShape, ep: &GroupShape) -> Result<(), SweepError> {
    if tr.supersingular {
        let q = p as u128 + 1;
        for shape in [e, ep] {
            let ok = *shape == GroupShape { n1: 1, n2: q }
                || (p % 4 == 3 && *shape == GroupShape { n1: 2, n2: q / 2 });
            if !ok {
                return Err(SweepError::SupersingularShape { p, shape: *shape });
            }
        }
        if ell != 2 && e != ep {
            return Err(SweepError::SupersingularNoniso { p, e: *e, ep: *ep });
        }
    }
    check_step(p, ell, e, ep)
}

/// Prime-to-l parts agree, and differing shapes are one volcano step apart.
fn check_step(p: u64, ell: u64, e: &GroupShape, ep: &GroupShape) -> Result<(), SweepError> {
    if prime_to_ell_part(e, ell) != prime_to_ell_part(ep, ell) {
        return Err(SweepError::PrimeToEll { p, e: *e, ep: *ep });
    }
    if e == ep {
        return Ok(());
    }
    let (a, b) = sylow_shape(e, ell);
    let (a2, b2) = sylow_shape(ep, ell);
    if (a2 == a + 1 && b2 + 1 == b) || (a2 + 1 == a && b2 == b + 1) {
        Ok(())
    } else {
        Err(SweepError::VolcanoStep { p, e: *e, ep: *ep })
    }
}

/// Compare the reductions of a pair at a prime p > 3.
pub fn compare_at_prime(
    pair: &RationalCurvePair,
    p: u64,
    opts: &SweepOptions,
) -> Result<PrimeOutcome, SweepError> {
    let Some([e, ep]) = reduce(pair, p)? else {
        return Ok(PrimeOutcome::bad(p));
    };
    let mut rng_e = prime_rng(opts.seed, p, CURVE_E);
    let mut rng_ep = prime_rng(opts.seed, p, CURVE_E_PRIME);

    let tr = trace_frobenius(&e, &mut rng_e);
    let tr_p = trace_frobenius(&ep, &mut rng_ep);
    if tr.t != tr_p.t {
        return Err(SweepError::TraceMismatch {
            p,
            t_e: tr.t,
            t_ep: tr_p.t,
        });
    }
    if !tr.satisfies_hasse() {
        return Err(SweepError::Hasse { p, t: tr.t });
    }

    let n = factor(tr.n as u128);
    let structure_err = |source| SweepError::Structure { p, source };
    let shape_e = group_structure(&e, &n, &mut rng_e).map_err(structure_err)?;
    let shape_ep = group_structure(&ep, &n, &mut rng_ep).map_err(structure_err)?;
    check_shapes(p, pair.ell, &tr, &shape_e, &shape_ep)?;

    // supersingular primes with differing shapes (possible only for l = 2)
    // count as non-isomorphic
    let status = match (shape_e == shape_ep, tr.supersingular) {
        (true, true) => Status::SupersingularIso,
        (true, false) => Status::Iso,
        (false, _) => Status::Noniso,
    };

    let mut shapes_fp2 = None;
    let mut anomalous = false;
    if opts.anomalous && status != Status::Noniso {
        let n2 = tr.factor_n2();
        let mut rng = prime_rng(opts.seed, p, CURVE_E_FP2);
        let s = group_structure(&e.base_change(), &n2, &mut rng).map_err(structure_err)?;
        let mut rng = prime_rng(opts.seed, p, CURVE_E_PRIME_FP2);
        let sp = group_structure(&ep.base_change(), &n2, &mut rng).map_err(structure_err)?;
        check_step(p, pair.ell, &s, &sp)?;
        anomalous = s != sp;
        shapes_fp2 = Some((s, sp));
    }

    Ok(PrimeOutcome {
        p,
        status,
        trace: Some(tr.t),
        torsion_level_e: torsion_level(&shape_e, pair.ell, opts.m_max),
        torsion_level_ep: torsion_level(&shape_ep, pair.ell, opts.m_max),
        shape_e: Some(shape_e),
        shape_ep: Some(shape_ep),
        shapes_fp2,
        anomalous,
    })
}

// ---------------------------------------------------------------- tally

/// Per-level torsion counts over good primes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelTally {
    pub m: u32,
    /// primes where E has full l^m-torsion
    pub full_e: u64,
    /// primes where E' has full l^m-torsion
    pub full_ep: u64,
    /// E has it, E' does not
    pub e_only: u64,
    /// E' has it, E does not
    pub ep_only: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    /// p = 2, 3
    pub skipped: u64,
    pub bad: u64,
    pub supersingular_iso: u64,
    pub iso: u64,
    pub noniso: u64,
}

impl StatusCounts {
    pub fn total(&self) -> u64 {
        self.skipped + self.bad + self.supersingular_iso + self.iso + self.noniso
    }

    pub fn good(&self) -> u64 {
        self.supersingular_iso + self.iso + self.noniso
    }
}

/// Mergeable counts over a set of primes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub counts: StatusCounts,
    pub levels: Vec<LevelTally>,
    pub anomalous: u64,
    pub outcomes: Vec<PrimeOutcome>,
}

impl Tally {
    pub fn new(m_max: u32) -> Self {
        Tally {
            levels: (1..=m_max)
                .map(|m| LevelTally {
                    m,
                    ..LevelTally::default()
                })
                .collect(),
            ..Tally::default()
        }
    }

    pub fn record(&mut self, o: PrimeOutcome, keep: bool) {
        match o.status {
            Status::Bad => self.counts.bad += 1,
            Status::SupersingularIso => self.counts.supersingular_iso += 1,
            Status::Iso => self.counts.iso += 1,
            Status::Noniso => self.counts.noniso += 1,
        }
        if o.status != Status::Bad {
            for lv in &mut self.levels {
                let (e, ep) = (o.full_torsion_e(lv.m), o.full_torsion_ep(lv.m));
                lv.full_e += e as u64;
                lv.full_ep += ep as u64;
                lv.e_only += (e && !ep) as u64;
                lv.ep_only += (ep && !e) as u64;
            }
        }
        self.anomalous += o.anomalous as u64;
        if keep {
            self.outcomes.push(o);
        }
    }

    /// Combine with the tally of a later range of primes.
    pub fn merge(mut self, other: Tally) -> Tally {
        let c = &mut self.counts;
        c.skipped += other.counts.skipped;
        c.bad += other.counts.bad;
        c.supersingular_iso += other.counts.supersingular_iso;
        c.iso += other.counts.iso;
        c.noniso += other.counts.noniso;
        for (a, b) in self.levels.iter_mut().zip(other.levels) {
            a.full_e += b.full_e;
            a.full_ep += b.full_ep;
            a.e_only += b.e_only;
            a.ep_only += b.ep_only;
        }
        self.anomalous += other.anomalous;
        self.outcomes.extend(other.outcomes);
        self
    }
}

/// Tally the primes in (lo, hi].
pub fn sweep_range(
    pair: &RationalCurvePair,
    lo: u64,
    hi: u64,
    opts: &SweepOptions,
) -> Result<Tally, SweepError> {
    if opts.workers == 0 {
        return Err(SweepError::NoWorkers);
    }
    let mut tally = Tally::new(opts.m_max);
    let mut primes = Vec::new();
    for p in PrimeSegments::new(lo + 1, hi) {
        if p <= 3 {
            tally.counts.skipped += 1;
        } else {
            primes.push(p);
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let blocks: Vec<Result<Tally, SweepError>> = pool.install(|| {
        primes
            .par_chunks(BLOCK_SIZE)
            .map(|block| {
                let mut t = Tally::new(opts.m_max);
                for &p in block {
                    t.record(compare_at_prime(pair, p, opts)?, opts.record_outcomes);
                }
                Ok(t)
            })
            .collect()
    });
    for b in blocks {
        tally = tally.merge(b?);
    }
    Ok(tally)
}

// --------------------------------------------------------------- report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub label: String,
    pub ell: u64,
    #[serde(rename = "X")]
    pub x: u64,
    pub pi_x: u64,
    pub seed: u64,
    pub m_max: u32,
    pub counts: StatusCounts,
    /// primes counted as isomorphic: iso + supersingular_iso + bad + skipped
    pub iso_count: u64,
    pub iso_ratio: f64,
    pub good_primes: u64,
    pub good_iso_ratio: f64,
    pub levels: Vec<LevelTally>,
    pub anomalous_checked: bool,
    pub anomalous_count: Option<u64>,
    pub anomalous_ratio: Option<f64>,
}

impl SweepReport {
    pub fn from_tally(pair: &RationalCurvePair, x: u64, opts: &SweepOptions, tally: &Tally) -> Self {
        let c = &tally.counts;
        let pi_x = c.total();
        let iso_count = c.iso + c.supersingular_iso + c.bad + c.skipped;
        let good = c.good();
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        SweepReport {
            label: pair.label.clone(),
            ell: pair.ell,
            x,
            pi_x,
            seed: opts.seed,
            m_max: opts.m_max,
            counts: c.clone(),
            iso_count,
            iso_ratio: ratio(iso_count, pi_x),
            good_primes: good,
            good_iso_ratio: ratio(c.iso + c.supersingular_iso, good),
            levels: tally.levels.clone(),
            anomalous_checked: opts.anomalous,
            anomalous_count: opts.anomalous.then_some(tally.anomalous),
            anomalous_ratio: opts.anomalous.then(|| ratio(tally.anomalous, pi_x)),
        }
    }
}

/// A finished sweep: the deterministic report plus per-prime outcomes when
/// they were requested.
#[derive(Clone, Debug)]
pub struct SweepRun {
    pub report: SweepReport,
    pub outcomes: Vec<PrimeOutcome>,
}

/// P(E, E')[X] and companion tallies over all primes p <= X.
pub fn empirical_p(pair: &RationalCurvePair, x: u64, opts: &SweepOptions) -> Result<SweepRun, SweepError> {
    if x < 5 {
        return Err(SweepError::BoundTooSmall(x));
    }
    let tally = sweep_range(pair, 0, x, opts)?;
    let report = SweepReport::from_tally(pair, x, opts, &tally);
    Ok(SweepRun {
        report,
        outcomes: tally.outcomes,
    })
}

/// Empirical d-values at one level with their supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DEstimate {
    pub m: u32,
    /// #{E full, E' not} / #{E full}; `None` when no prime has E full.
    pub d_hat: Option<f64>,
    pub dp_hat: Option<f64>,
    pub support_e: u64,
    pub support_ep: u64,
    pub defect_e: u64,
    pub defect_ep: u64,
}

impl DEstimate {
    /// Binomial standard error sqrt(q (1 - q) / n) around a reference value q.
    pub fn sigma(reference: f64, support: u64) -> f64 {
        if support == 0 {
            f64::INFINITY
        } else {
            (reference * (1.0 - reference) / support as f64).sqrt()
        }
    }
}

pub fn empirical_d(report: &SweepReport, m: u32) -> Option<DEstimate> {
    let lv = report.levels.iter().find(|l| l.m == m)?;
    let frac = |a: u64, b: u64| (b > 0).then(|| a as f64 / b as f64);
    Some(DEstimate {
        m,
        d_hat: frac(lv.e_only, lv.full_e),
        dp_hat: frac(lv.ep_only, lv.full_ep),
        support_e: lv.full_e,
        support_ep: lv.full_ep,
        defect_e: lv.e_only,
        defect_ep: lv.ep_only,
    })
}

/// Proportion of primes p <= X that are anomalous, with a binomial error bar.
pub fn anomalous_density(report: &SweepReport) -> Option<(f64, f64)> {
    let ratio = report.anomalous_ratio?;
    let sigma = (ratio * (1.0 - ratio) / report.pi_x as f64).sqrt();
    Some((ratio, sigma))
}

// ------------------------------------------------------------ rendering

pub fn render_text(r: &SweepReport) -> String {
    let mut s = String::new();
    let c = &r.counts;
    let rows: Vec<(&str, String)> = vec![
        ("pair", r.label.clone()),
        ("ell", r.ell.to_string()),
        ("X", r.x.to_string()),
        ("pi(X)", r.pi_x.to_string()),
        ("seed", r.seed.to_string()),
        ("skipped (p = 2, 3)", c.skipped.to_string()),
        ("bad", c.bad.to_string()),
        ("supersingular iso", c.supersingular_iso.to_string()),
        ("iso", c.iso.to_string()),
        ("noniso", c.noniso.to_string()),
        ("iso count", r.iso_count.to_string()),
        ("iso ratio", format!("{:.6}", r.iso_ratio)),
        ("good-prime iso ratio", format!("{:.6}", r.good_iso_ratio)),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<22} {v:>12}");
    }
    if let (Some(n), Some(ratio)) = (r.anomalous_count, r.anomalous_ratio) {
        let _ = writeln!(s, "{:<22} {:>12}", "anomalous", n);
        let _ = writeln!(s, "{:<22} {:>12}", "anomalous ratio", format!("{ratio:.6}"));
    }
    s
}

pub fn render_outcomes_csv(outcomes: &[PrimeOutcome]) -> String {
    let mut s = String::from("p,status,n1,n2,n1',n2'\n");
    let cell = |x: Option<u128>| x.map_or(String::new(), |v| v.to_string());
    for o in outcomes {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            o.p,
            o.status.as_str(),
            cell(o.shape_e.map(|g| g.n1)),
            cell(o.shape_e.map(|g| g.n2)),
            cell(o.shape_ep.map(|g| g.n1)),
            cell(o.shape_ep.map(|g| g.n2)),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::RationalCurve;

    fn pair_69a() -> RationalCurvePair {
        let e = RationalCurve::from_i64([1, 0, 1, -1, -1], 69, "69.a2").unwrap();
        let ep = RationalCurve::from_i64([1, 0, 1, -16, -25], 69, "69.a1").unwrap();
        RationalCurvePair::new("69.a", e, ep, 2, None).unwrap()
    }

    #[test]
    fn small_sieve_values() {
        assert_eq!(sieve_primes(10).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert_eq!(prime_count(10), 4);
        assert_eq!(prime_count(1), 0);
        assert_eq!(prime_count(2), 1);
        assert_eq!(prime_count(100), 25);
        let window: Vec<u64> = PrimeSegments::new(1_000_000, 1_000_100).collect();
        assert_eq!(window, vec![1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081, 1_000_099]);
    }

    #[test]
    fn segmented_matches_simple_across_boundaries() {
        let x = 3 * SEGMENT + 12345;
        assert_eq!(sieve_primes(x).collect::<Vec<_>>(), simple_sieve(x));
    }

    #[test]
    fn bad_prime_and_small_sweep() {
        let pair = pair_69a();
        let opts = SweepOptions::default();
        assert_eq!(compare_at_prime(&pair, 23, &opts).unwrap().status, Status::Bad);
        let run = empirical_p(&pair, 1000, &opts).unwrap();
        let r = &run.report;
        assert_eq!(r.pi_x, 168);
        assert_eq!(r.counts.total(), 168);
        assert_eq!(r.counts.skipped, 2);
        assert_eq!(r.counts.bad, 1);
        assert!(r.iso_ratio > 0.0 && r.iso_ratio < 1.0);
        assert_eq!(empirical_p(&pair, 4, &opts).unwrap_err(), SweepError::BoundTooSmall(4));
    }

    #[test]
    fn partition_law() {
        let pair = pair_69a();
        let opts = SweepOptions {
            anomalous: true,
            ..SweepOptions::default()
        };
        let whole = sweep_range(&pair, 0, 20_000, &opts).unwrap();
        let parts = sweep_range(&pair, 0, 7_000, &opts)
            .unwrap()
            .merge(sweep_range(&pair, 7_000, 12_345, &opts).unwrap())
            .merge(sweep_range(&pair, 12_345, 20_000, &opts).unwrap());
        assert_eq!(whole, parts);
    }

    #[test]
    fn csv_rendering() {
        let pair = pair_69a();
        let opts = SweepOptions {
            record_outcomes: true,
            ..SweepOptions::default()
        };
        let run = empirical_p(&pair, 30, &opts).unwrap();
        let csv = render_outcomes_csv(&run.outcomes);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,status,n1,n2,n1',n2'");
        assert_eq!(lines.len(), 1 + 8); // 5..29 has 8 primes
        assert!(csv.contains("\n23,bad,,,,\n"));
    }

    #[test]
    fn supersingular_two_isogeny_can_change_the_two_part() {
        // 69.a is supersingular at 223 = 3 mod 4; the two reductions land on
        // the two possible supersingular shapes
        let pair = pair_69a();
        let o = compare_at_prime(&pair, 223, &SweepOptions::default()).unwrap();
        assert_eq!(o.trace, Some(0));
        assert_eq!(o.status, Status::Noniso);
        let mut shapes = [o.shape_e.unwrap(), o.shape_ep.unwrap()];
        shapes.sort_by_key(|s| s.n1);
        assert_eq!(shapes, [GroupShape { n1: 1, n2: 224 }, GroupShape { n1: 2, n2: 112 }]);
        let Some([e, ep]) = reduce(&pair, 223).unwrap() else { panic!() };
        let brute = [
            crate::structure::brute_force_structure(&e).unwrap(),
            crate::structure::brute_force_structure(&ep).unwrap(),
        ];
        assert_eq!([o.shape_e.unwrap(), o.shape_ep.unwrap()], brute);
    }

    #[test]
    fn supersingular_invariants() {
        let tr = TraceRecord::from_trace(223, 0);
        let cyclic = GroupShape { n1: 1, n2: 224 };
        let split = GroupShape { n1: 2, n2: 112 };
        assert!(check_shapes(223, 2, &tr, &cyclic, &split).is_ok());
        assert!(matches!(
            check_shapes(223, 3, &tr, &cyclic, &split),
            Err(SweepError::SupersingularNoniso { .. })
        ));
        let wrong = GroupShape { n1: 4, n2: 56 };
        assert!(matches!(
            check_shapes(223, 2, &tr, &wrong, &wrong),
            Err(SweepError::SupersingularShape { .. })
        ));
        // p = 1 mod 4 forces the cyclic shape
        let tr = TraceRecord::from_trace(229, 0);
        let split = GroupShape { n1: 2, n2: 115 };
        assert!(check_shapes(229, 2, &tr, &split, &split).is_err());
    }

    #[test]
    fn step_law() {
        let tr = TraceRecord::from_trace(1009, 10);
        let n = 1000;
        let a = GroupShape { n1: 2, n2: n / 2 };
        let b = GroupShape { n1: 1, n2: n };
        let c = GroupShape { n1: 10, n2: n / 10 };
        assert!(check_shapes(1009, 2, &tr, &a, &b).is_ok());
        assert!(matches!(check_shapes(1009, 2, &tr, &a, &c), Err(SweepError::PrimeToEll { .. })));
        let d = GroupShape { n1: 4, n2: n / 4 };
        assert!(matches!(check_shapes(1009, 2, &tr, &b, &d), Err(SweepError::VolcanoStep { .. })));
    }

    #[test]
    fn rng_depends_on_all_inputs() {
        use rand::RngCore;
        let a = prime_rng(0, 101, 0).next_u64();
        assert_eq!(a, prime_rng(0, 101, 0).next_u64());
        assert_ne!(a, prime_rng(1, 101, 0).next_u64());
        assert_ne!(a, prime_rng(0, 103, 0).next_u64());
        assert_ne!(a, prime_rng(0, 101, 1).next_u64());
    }
}
