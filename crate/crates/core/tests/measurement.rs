mod common;

use common::{grouping_operator, min_clique_cover};
use fermiforge_core::measurement::{
    covers, get_measurement_estimate, group_qwc, plan_measurements, plan_total_shots,
};
use fermiforge_core::simulator::get_expectation_value;
use fermiforge_core::{BackendConfig, Circuit, Gate, Pauli, PauliWord, QubitOperator};
use proptest::prelude::*;

fn w(s: &str) -> PauliWord {
    PauliWord::parse(s).unwrap()
}

fn check_partition(op: &QubitOperator, seed: u64) -> usize {
    let map = group_qwc(op, seed);
    let mut seen = 0;
    for (parent, members) in &map {
        for (word, c) in members.iter() {
            assert!(covers(parent, word), "{parent} does not cover {word}");
            assert_eq!(*c, op.coefficient(word));
            for other in members.words() {
                assert!(word.qwc_compatible(other));
            }
            seen += 1;
        }
    }
    assert_eq!(seen, op.words().filter(|w| !w.is_identity()).count());
    map.len()
}

#[test]
fn seed_zero_golden() {
    let op = grouping_operator();
    let map = group_qwc(&op, 0);
    assert_eq!(map.len(), 5);
    let group = &map[&w("X0 Z1")];
    let expected =
        QubitOperator::from_terms([(w("X0"), 0.25), (w("X0 Z1"), 0.25), (w("Z1"), 0.25)]);
    assert_eq!(group, &expected);
}

#[test]
fn hundred_seeds_are_minimal() {
    let op = grouping_operator();
    let words: Vec<PauliWord> = op.words().cloned().collect();
    let optimum = min_clique_cover(&words);
    assert_eq!(optimum, 5);
    for seed in 0..100 {
        assert_eq!(check_partition(&op, seed), optimum, "seed {seed}");
    }
}

#[test]
fn grouping_is_deterministic() {
    let op = grouping_operator();
    assert_eq!(group_qwc(&op, 42), group_qwc(&op, 42));
}

#[test]
fn shot_estimates() {
    let shots = get_measurement_estimate(&grouping_operator(), 2);
    assert_eq!(shots.len(), 9);
    assert!(shots.values().all(|&s| s == 62500));
    let op = QubitOperator::from_terms([(PauliWord::identity(), 3.0), (w("Z0"), 1e-9)]);
    let shots = get_measurement_estimate(&op, 1);
    assert_eq!(shots[&PauliWord::identity()], 0);
    assert_eq!(shots[&w("Z0")], 1);
    let plan = plan_measurements(&grouping_operator(), 0, 2);
    assert_eq!(plan_total_shots(&plan), 5 * 62500);
}

fn word_strategy(n: usize) -> impl Strategy<Value = PauliWord> {
    prop::collection::vec(0u8..4, n).prop_map(|codes| {
        let f = codes
            .iter()
            .enumerate()
            .filter_map(|(q, &c)| {
                [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)][c as usize].map(|a| (q, a))
            })
            .collect();
        PauliWord::new(f).unwrap()
    })
}

proptest! {
    #[test]
    fn random_groupings_are_valid_covers(words in prop::collection::vec(word_strategy(3), 1..10), seed in any::<u64>()) {
        let op = QubitOperator::from_terms(words.into_iter().map(|w| (w, 1.0)));
        let groups = check_partition(&op, seed);
        let nonid: Vec<PauliWord> = op.words().filter(|w| !w.is_identity()).cloned().collect();
        prop_assert!(groups >= min_clique_cover(&nonid));
    }
}

#[test]
fn grouped_shots_estimate_expectation() {
    let op = grouping_operator();
    let c = Circuit::new(vec![
        Gate::rotation("RY", 0, 0.4),
        Gate::cnot(0, 1),
        Gate::rotation("RX", 1, 0.3),
    ]);
    let exact = get_expectation_value(&op, &c, &BackendConfig::exact()).unwrap();
    let shots = 100_000;
    let est = get_expectation_value(&op, &c, &BackendConfig::shots(shots, 5)).unwrap();
    // each of 9 terms has variance at most 1/16 per shot
    let bound = 5.0 * (9.0f64 / 16.0 / shots as f64).sqrt() * 3.0;
    assert!((est - exact).abs() < bound, "{est} vs {exact}");
    assert_eq!(
        est,
        get_expectation_value(&op, &c, &BackendConfig::shots(shots, 5)).unwrap()
    );
}
