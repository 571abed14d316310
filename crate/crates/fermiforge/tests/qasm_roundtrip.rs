use fermiforge::qasm::{from_qasm, to_qasm};
use fermiforge_core::simulator::simulate;
use fermiforge_core::{BackendConfig, Circuit, Gate};
use proptest::prelude::*;

const WIDTH: usize = 4;

fn gate_strategy() -> impl Strategy<Value = Gate> {
    let one = (
        0..WIDTH,
        prop::sample::select(vec!["H", "X", "Y", "Z", "S", "SDAG", "T", "TDAG"]),
    )
        .prop_map(|(q, n)| Gate::single(n, q));
    let rot = (
        0..WIDTH,
        prop::sample::select(vec!["RX", "RY", "RZ"]),
        -7.0f64..7.0,
    )
        .prop_map(|(q, n, a)| Gate::rotation(n, q, a));
    let two = (
        0..WIDTH,
        1..WIDTH,
        prop::sample::select(vec!["CNOT", "CX", "CZ", "SWAP"]),
    )
        .prop_map(|(a, d, n)| {
            let b = (a + d) % WIDTH;
            match n {
                "SWAP" => Gate::new(n, &[a, b], &[]).unwrap(),
                _ => Gate::new(n, &[b], &[a]).unwrap(),
            }
        });
    prop_oneof![one, rot, two]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn histograms_survive_round_trip(gates in prop::collection::vec(gate_strategy(), 0..25)) {
        let c = Circuit::with_width(gates, WIDTH);
        let text = to_qasm(&c).unwrap();
        let back = from_qasm(&text).unwrap();
        prop_assert_eq!(back.size(), c.size());
        prop_assert_eq!(back.width(), WIDTH);
        let exact = BackendConfig::exact();
        let (h0, _) = simulate(&c, &exact, None, false).unwrap();
        let (h1, _) = simulate(&back, &exact, None, false).unwrap();
        for key in h0.0.keys().chain(h1.0.keys()) {
            prop_assert!((h0.get(key) - h1.get(key)).abs() < 1e-12, "{}", key);
        }
        // export is a fixed point after one round trip
        prop_assert_eq!(to_qasm(&back).unwrap(), text);
    }
}

#[test]
fn trailing_measurements_round_trip() {
    let c = Circuit::new(vec![
        Gate::single("H", 0),
        Gate::cnot(0, 2),
        Gate::single("MEASURE", 0),
        Gate::single("MEASURE", 2),
    ]);
    let text = to_qasm(&c).unwrap();
    assert!(text.ends_with("measure q[0] -> c[0];\nmeasure q[2] -> c[2];\n"));
    let back = from_qasm(&text).unwrap();
    assert_eq!(back.gates(), c.gates());
}

#[test]
fn hand_written_document_with_pi() {
    let doc = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nry(pi/2) q[0];\nrz(-pi) q[0];\n";
    let c = from_qasm(doc).unwrap();
    let (h, _) = simulate(&c, &BackendConfig::exact(), None, false).unwrap();
    assert!((h.get("0") - 0.5).abs() < 1e-12);
    assert!((h.get("1") - 0.5).abs() < 1e-12);
}
