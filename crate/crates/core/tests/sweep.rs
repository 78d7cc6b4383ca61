//! Whole-sweep properties: invariants never trip, results do not depend on
//! the worker count, and the tallies partition pi(X).

use isodense_core::dataset::bundled;
use isodense_core::sweep::{empirical_p, prime_count, SweepError, SweepOptions, Status};

#[test]
fn invariants_hold_over_full_sweep_of_every_pair() {
    for rec in bundled() {
        let pair = rec.to_pair().unwrap();
        let opts = SweepOptions { workers: 2, ..Default::default() };
        let run = empirical_p(&pair, 100_000, &opts).unwrap_or_else(|e| panic!("{}: {e}", rec.label));
        let r = &run.report;
        assert_eq!(r.pi_x, 9592);
        assert_eq!(r.counts.total(), 9592, "{}", rec.label);
        assert_eq!(r.counts.skipped, 2);
        assert_eq!(
            r.iso_count,
            r.counts.iso + r.counts.supersingular_iso + r.counts.bad + r.counts.skipped
        );
    }
}

#[test]
fn invariants_hold_over_fp2_comparison() {
    for rec in bundled() {
        let pair = rec.to_pair().unwrap();
        let opts = SweepOptions { anomalous: true, ..Default::default() };
        let run = empirical_p(&pair, 10_000, &opts).unwrap_or_else(|e| panic!("{}: {e}", rec.label));
        assert!(run.report.anomalous_count.is_some());
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    // 2^14 primes per block: X = 4 * 10^5 gives three blocks
    for label in ["69.a", "49.a"] {
        let rec = bundled().into_iter().find(|r| r.label == label).unwrap();
        let pair = rec.to_pair().unwrap();
        let render = |workers| {
            let opts = SweepOptions { workers, record_outcomes: true, seed: 11, ..Default::default() };
            let run = empirical_p(&pair, 400_000, &opts).unwrap();
            serde_json::to_string(&(&run.report, &run.outcomes)).unwrap()
        };
        let one = render(1);
        assert_eq!(one, render(2), "{label}");
        assert_eq!(one, render(8), "{label}");
    }
}

#[test]
fn outcomes_cover_every_prime_in_order() {
    let pair = bundled()[0].to_pair().unwrap();
    let opts = SweepOptions { record_outcomes: true, ..Default::default() };
    let run = empirical_p(&pair, 5000, &opts).unwrap();
    let ps: Vec<u64> = run.outcomes.iter().map(|o| o.p).collect();
    assert_eq!(ps.len() as u64, prime_count(5000) - 2);
    assert!(ps.windows(2).all(|w| w[0] < w[1]));
    let bad: Vec<u64> = run.outcomes.iter().filter(|o| o.status == Status::Bad).map(|o| o.p).collect();
    assert_eq!(bad, vec![23]);
}

#[test]
fn rejects_bad_options() {
    let pair = bundled()[0].to_pair().unwrap();
    assert!(matches!(empirical_p(&pair, 4, &SweepOptions::default()), Err(SweepError::BoundTooSmall(4))));
    let opts = SweepOptions { workers: 0, ..Default::default() };
    assert!(matches!(empirical_p(&pair, 100, &opts), Err(SweepError::NoWorkers)));
}
