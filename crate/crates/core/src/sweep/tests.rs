use proptest::prelude::*;

use super::*;

fn opts() -> RunOptions {
    RunOptions::default()
}

#[test]
fn verify_examples() {
    let r = cmd_verify(Family::Prop61, 5, 18, &opts()).unwrap();
    assert_eq!(r.cells.len(), 1);
    assert_eq!(r.cells[0].outcome, Outcome::Pass);
    assert_eq!(r.cells[0].classification.as_deref(), Some("alternating"));
    assert_eq!(r.cells[0].generator_orders, vec![5, 5, 5]);
    assert!(r.all_expected());

    let r = cmd_verify(Family::Conjecture, 3, 6, &opts()).unwrap();
    assert_eq!(r.cells[0].outcome, Outcome::ExpectedFail);
    assert_eq!(r.cells[0].detail.as_deref(), Some("known exception"));
    assert!(r.all_expected());

    assert!(matches!(cmd_verify(Family::Prop61, 5, 9, &opts()), Err(CommandError::Domain(_))));
}

#[test]
fn sweep_orders_cells_and_tallies() {
    let one = RunOptions { jobs: 1, ..opts() };
    let many = RunOptions { jobs: 4, ..opts() };
    let (a, _) = cmd_sweep(Family::Prop61, 3..=5, None, 14, &one).unwrap();
    let (b, _) = cmd_sweep(Family::Prop61, 3..=5, None, 14, &many).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let keys: Vec<(u64, u64)> = a.cells.iter().map(|c| (c.k, c.n.unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // n from 2k to 14: 9 + 7 + 5 cells
    assert_eq!(a.cells.len(), 21);
    assert_eq!(a.summary, Summary::tally(&a.cells));
    assert_eq!(a.summary.pass, 21);
}

#[test]
fn sweep_skips_out_of_domain_cells() {
    let (r, _) = cmd_sweep(Family::Prop62, 4..=5, Some(6), 8, &opts()).unwrap();
    // k = 5 is odd: every cell skipped; k = 4 from n = 6
    assert_eq!(r.summary.skip, 3);
    assert_eq!(r.summary.pass, 3);
    assert!(r.all_expected());
}

#[test]
fn empty_sweep() {
    #[allow(clippy::reversed_empty_ranges)]
    let (r, _) = cmd_sweep(Family::Conjecture, 5..=4, None, 10, &opts()).unwrap();
    assert!(r.cells.is_empty());
    assert!(r.all_expected());
    assert_eq!(r.summary, Summary::default());
}

#[test]
fn cache_reuses_and_spot_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path()).unwrap();
    let o = RunOptions {
        cache: Some(cache.clone()),
        ..opts()
    };
    let (first, s1) = cmd_sweep(Family::Conjecture, 3..=4, None, 12, &o).unwrap();
    assert_eq!((s1.hits, s1.misses), (0, first.cells.len()));
    let (second, s2) = cmd_sweep(Family::Conjecture, 3..=4, None, 12, &o).unwrap();
    assert_eq!(s2.hits, first.cells.len());
    assert!(s2.spot_checked >= 1);
    assert_eq!(s2.mismatches, 0);
    assert_eq!(first.to_json(), second.to_json());

    // corrupt every stored cell: the spot check catches the sampled one
    for entry in walk(dir.path()) {
        let text = std::fs::read_to_string(&entry).unwrap();
        let mut cell: Cell = serde_json::from_str(&text).unwrap();
        cell.witness = Some("tampered".into());
        std::fs::write(&entry, serde_json::to_string(&cell).unwrap()).unwrap();
    }
    let (_, s3) = cmd_sweep(Family::Conjecture, 3..=4, None, 12, &o).unwrap();
    assert!(s3.mismatches >= 1);
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn cache_keys_depend_on_everything() {
    let params = grid(&[("k", "3".into())]);
    let base = Cache::key("verify", &params, None);
    assert_ne!(base, Cache::key_for_version("0.0.0-old", "verify", &params, None));
    assert_ne!(base, Cache::key("sweep", &params, None));
    assert_ne!(base, Cache::key("verify", &params, Some(1)));
    assert_ne!(base, Cache::key("verify", &grid(&[("k", "4".into())]), None));
    assert_eq!(base.len(), 64);
}

#[test]
fn concurrent_writers_do_not_clash() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path()).unwrap();
    let cell = Cell::new(3, Outcome::Pass);
    std::thread::scope(|s| {
        for _ in 0..8 {
            s.spawn(|| cache.put("abcdef", &cell).unwrap());
        }
    });
    assert_eq!(cache.get("abcdef"), Some(cell));
    assert_eq!(walk(dir.path()).len(), 1);
}

#[test]
fn report_csv_and_json() {
    let r = cmd_verify(Family::Prop61, 3, 6, &opts()).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("command,k,n,g,outcome"));
    assert!(lines.next().unwrap().starts_with("verify,3,6,,pass,alternating"));
    let back: SweepReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.schema_version, SCHEMA_VERSION);
}

#[test]
fn timings_only_on_request() {
    let r = cmd_verify(Family::Prop61, 3, 6, &opts()).unwrap();
    assert_eq!(r.cells[0].elapsed_ms, None);
    let r = cmd_verify(Family::Prop61, 3, 6, &RunOptions { timings: true, ..opts() }).unwrap();
    assert!(r.cells[0].elapsed_ms.is_some());
}

#[test]
fn estimator_small_case_matches_enumeration() {
    let r = cmd_estimate(2, 4, 1000, Sampler::MaxDisjointKCycles, 1).unwrap();
    assert!(r.estimate < 1.0);
    let (s, t) = exhaustive_rate(2, 4, Sampler::MaxDisjointKCycles).unwrap();
    // three double transpositions, nine ordered pairs, never transitive
    assert_eq!((s, t), (0, 9));
    assert_eq!(r.successes, 0);
    assert_eq!(r, cmd_estimate(2, 4, 1000, Sampler::MaxDisjointKCycles, 1).unwrap());
}

#[test]
fn estimator_intervals_cover_exact_rates() {
    for (k, n, sampler) in [
        (3, 5, Sampler::UniformOrderK),
        (3, 6, Sampler::MaxDisjointKCycles),
        (4, 5, Sampler::UniformOrderK),
        (5, 5, Sampler::MaxDisjointKCycles),
    ] {
        let (s, t) = exhaustive_rate(k, n, sampler).unwrap();
        let exact = rate(s, t);
        let est = cmd_estimate(k, n, 400, sampler, 7).unwrap();
        assert!(
            est.interval.0 <= exact && exact <= est.interval.1,
            "k={k} n={n} {sampler}: exact {exact} outside {:?}",
            est.interval
        );
    }
}

#[test]
fn estimator_errors() {
    assert_eq!(cmd_estimate(3, 5, 0, Sampler::UniformOrderK, 1), Err(EstimateError::TrialsZero));
    assert!(matches!("bogus".parse::<Sampler>(), Err(EstimateError::InvalidSampler(_))));
    assert_eq!("max_disjoint".parse::<Sampler>(), Ok(Sampler::MaxDisjointKCycles));
    assert!(matches!(
        cmd_estimate(7, 5, 10, Sampler::UniformOrderK, 1),
        Err(EstimateError::NoSuchElement { .. })
    ));
    assert!(order_exists(6, 5));
    assert!(!order_exists(30, 9));
    assert!(order_exists(30, 10));
}

#[test]
fn mcg_examples() {
    let r = cmd_mcg(5, 18, Variant::Four, &opts()).unwrap();
    assert_eq!(r.cells[0].outcome, Outcome::Pass, "{:?}", r.cells[0].stages);
    let r = cmd_mcg(8, 21, Variant::Three, &opts()).unwrap();
    assert_eq!(r.cells[0].outcome, Outcome::Pass, "{:?}", r.cells[0].stages);
    assert!(matches!(cmd_mcg(5, 7, Variant::Four, &opts()), Err(CommandError::Domain(_))));
    assert!(matches!(cmd_mcg(5, 18, Variant::Three, &opts()), Err(CommandError::Domain(_))));
}

#[test]
fn genus_and_sympl_commands() {
    let r = cmd_genus(5..=8, None, &opts()).unwrap();
    assert_eq!(r.summary.pass, 4);
    let r = cmd_genus(5..=5, Some(18), &opts()).unwrap();
    assert_eq!(r.cells[0].classification.as_deref(), Some("18=2*5+2*4"));
    assert!(cmd_genus(5..=5, Some(7), &opts()).is_err());

    let r = cmd_sympl(2, None, 2, &opts()).unwrap();
    assert_eq!(r.cells[0].classification.as_deref(), Some("order 720"));
    assert_eq!(r.cells[0].outcome, Outcome::Pass);
    let r = cmd_sympl(18, Some(5), 2, &opts()).unwrap();
    assert_eq!(r.cells[0].outcome, Outcome::Pass);
    assert!(cmd_sympl(3, None, 3, &opts()).is_err());
}

proptest! {
    #[test]
    fn wilson_contains_estimate(trials in 1u64..5000, frac in 0.0f64..=1.0) {
        let successes = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(successes, trials);
        let p = successes as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }
}
