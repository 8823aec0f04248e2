mod common;

use common::*;

#[test]
fn concurrent_actors_conserve_resources() {
    for seed in [1, 2, 3] {
        let stats = stress_orchestrator(seed, 4, 1000, 0.0).unwrap();
        assert!(stats.committed > 0 && stats.conflicts > 0, "{stats:?}");
    }
}

#[test]
fn concurrent_actors_with_injected_conflicts() {
    let stats = stress_orchestrator(11, 4, 1000, 0.25).unwrap();
    assert!(stats.injected > 0);
}

#[test]
fn multi_commit_needs_fewer_reschedules() {
    for seed in 1..=3 {
        let multi = reschedule_events(3, seed, 0.3, 100);
        let single = reschedule_events(1, seed, 0.3, 100);
        assert!(multi <= single, "seed {seed}: multi {multi} single {single}");
    }
    assert_eq!(reschedule_events(3, 1, 0.0, 50), 0);
}
