mod common;

use common::dense;
use fermiforge_core::num_complex::Complex64;
use fermiforge_core::simulator::{
    bitstring, get_expectation_value, run_statevector, simulate, EXACT_CULL,
};
use fermiforge_core::{
    BackendConfig, Circuit, Gate, NoiseModel, PauliWord, QubitOperator, Statevector,
};
use proptest::prelude::*;

const ONE_QUBIT: [&str; 12] = [
    "H", "X", "Y", "Z", "S", "SDAG", "T", "TDAG", "RX", "RY", "RZ", "PHASE",
];
const TWO_QUBIT: [&str; 8] = ["CNOT", "CY", "CZ", "CRX", "CRY", "CRZ", "CPHASE", "SWAP"];

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let single = (0..ONE_QUBIT.len(), 0..n, -3.2f64..3.2).prop_map(|(k, q, t)| {
        let name = ONE_QUBIT[k];
        if matches!(name, "RX" | "RY" | "RZ" | "PHASE") {
            Gate::rotation(name, q, t)
        } else {
            Gate::single(name, q)
        }
    });
    let pair =
        (0..TWO_QUBIT.len(), 0..n, 1..n.max(2), -3.2f64..3.2).prop_map(move |(k, a, off, t)| {
            let b = (a + off) % n;
            let name = TWO_QUBIT[k];
            match name {
                "SWAP" => Gate::new("SWAP", &[a, b], &[]).unwrap(),
                "CRX" | "CRY" | "CRZ" | "CPHASE" => {
                    Gate::new(name, &[b], &[a]).unwrap().with_parameter(t)
                }
                _ => Gate::new(name, &[b], &[a]).unwrap(),
            }
        });
    let toffoli = (0..n, 1..n.max(2), 2..n.max(3)).prop_map(move |(a, x, y)| {
        let b = (a + x) % n;
        let mut c = (a + y) % n;
        if c == b {
            c = (c + 1) % n;
        }
        if c == a {
            c = (c + 1) % n;
        }
        Gate::new("CSWAP", &[b, c], &[a]).unwrap()
    });
    if n >= 3 {
        prop_oneof![4 => single, 3 => pair, 1 => toffoli].boxed()
    } else if n == 2 {
        prop_oneof![single, pair].boxed()
    } else {
        single.boxed()
    }
}

fn circuit_strategy() -> impl Strategy<Value = (usize, Vec<Gate>)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 0..25)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_histogram_matches_dense((n, gates) in circuit_strategy()) {
        let circuit = Circuit::with_width(gates.clone(), n);
        let (hist, state) = simulate(&circuit, &BackendConfig::exact(), None, true).unwrap();
        let oracle = dense::circuit_state(&gates, n);
        let state = state.unwrap();
        for (i, a) in state.amplitudes().iter().enumerate() {
            prop_assert!((a - oracle[i]).norm() < 1e-12);
            let p = oracle[i].norm_sqr();
            let key = bitstring(i, n);
            if p >= EXACT_CULL {
                prop_assert!((hist.get(&key) - p).abs() < 1e-12);
            } else {
                prop_assert!(hist.get(&key) == 0.0 || (hist.get(&key) - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_round_trip((n, gates) in circuit_strategy()) {
        let c = Circuit::with_width(gates, n);
        let round = &c + &c.inverse().unwrap();
        let s = run_statevector(&round, None, 24).unwrap();
        prop_assert!(s.fidelity(&Statevector::zero(n)) >= 1.0 - 1e-10);
    }

    #[test]
    fn expectation_matches_dense((n, gates) in circuit_strategy(), coeffs in prop::collection::vec(-1.0f64..1.0, 3)) {
        let mut op = QubitOperator::zero();
        op.add_term(PauliWord::identity(), coeffs[0]);
        op.add_term(PauliWord::parse("Z0").unwrap(), coeffs[1]);
        op.add_term(PauliWord::single(n - 1, fermiforge_core::Pauli::X), coeffs[2]);
        let c = Circuit::with_width(gates.clone(), n);
        let e = get_expectation_value(&op, &c, &BackendConfig::exact()).unwrap();
        let v = dense::circuit_state(&gates, n);
        let m = dense::operator(&op, n);
        let oracle = (v.adjoint() * &m * &v)[(0, 0)].re;
        prop_assert!((e - oracle).abs() < 1e-10);
    }
}

#[test]
fn little_endian_keys() {
    let c = Circuit::with_width(vec![Gate::single("X", 0)], 3);
    let (h, _) = simulate(&c, &BackendConfig::exact(), None, false).unwrap();
    assert_eq!(h.0.keys().collect::<Vec<_>>(), ["100"]);
    let c = Circuit::new(vec![Gate::single("H", 0), Gate::cnot(0, 1)]);
    let (h, _) = simulate(&c, &BackendConfig::exact(), None, false).unwrap();
    assert!((h.get("00") - 0.5).abs() < 1e-15 && (h.get("11") - 0.5).abs() < 1e-15);
}

#[test]
fn shots_are_reproducible_and_unbiased() {
    let c = Circuit::new(vec![Gate::rotation("RY", 0, 1.0)]);
    let cfg = BackendConfig::shots(100_000, 11);
    let (a, _) = simulate(&c, &cfg, None, false).unwrap();
    let (b, _) = simulate(&c, &cfg, None, false).unwrap();
    assert_eq!(a, b);
    let p1 = (0.5f64).sin().powi(2);
    let sigma = (p1 * (1.0 - p1) / 100_000.0).sqrt();
    assert!((a.get("1") - p1).abs() < 5.0 * sigma);
    for (_, v) in a.iter() {
        assert_eq!(v * 100_000.0, (v * 100_000.0).round());
    }
}

#[test]
fn initial_state_replaces_zero_state() {
    let start = Statevector::from_bitstring("10").unwrap();
    let c = Circuit::with_width(vec![Gate::cnot(0, 1)], 2);
    let s = run_statevector(&c, Some(&start), 10).unwrap();
    assert_eq!(s.amplitudes()[3], Complex64::new(1.0, 0.0));
}

/// Single-qubit depolarizing channel on a density matrix: ρ → (1−p)ρ + p/3 (XρX + YρY + ZρZ).
fn depolarized_z_after_x(p: f64) -> f64 {
    use fermiforge_core::Pauli;
    let x = dense::pauli(Some(Pauli::X));
    let rho0 = dense::M::from_row_slice(
        2,
        2,
        &[Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()],
    );
    let rho = &x * rho0 * x.adjoint();
    let mut out = &rho * Complex64::new(1.0 - p, 0.0);
    for a in [Pauli::X, Pauli::Y, Pauli::Z] {
        let m = dense::pauli(Some(a));
        out += &m * &rho * m.adjoint() * Complex64::new(p / 3.0, 0.0);
    }
    (dense::pauli(Some(Pauli::Z)) * out).trace().re
}

#[test]
fn depolarizing_decay_matches_density_matrix() {
    let p = 0.3;
    let mut noise = NoiseModel::new();
    noise.add_quantum_error("X", "depol", p).unwrap();
    let c = Circuit::new(vec![Gate::single("X", 0)]);
    let cfg = BackendConfig::shots(200_000, 7).with_noise(noise);
    let (h, _) = simulate(&c, &cfg, None, false).unwrap();
    let z = h.get("0") - h.get("1");
    let oracle = depolarized_z_after_x(p);
    assert!((oracle + (1.0 - 4.0 * p / 3.0)).abs() < 1e-14);
    assert!((z - oracle).abs() < 0.01, "{z} vs {oracle}");
}

#[test]
fn statevector_refused_under_noise() {
    let mut noise = NoiseModel::new();
    noise.add_quantum_error("H", "depol", 0.1).unwrap();
    let c = Circuit::new(vec![Gate::single("H", 0)]);
    let cfg = BackendConfig::shots(10, 0).with_noise(noise.clone());
    assert!(simulate(&c, &cfg, None, true).is_err());
    assert!(simulate(&c, &BackendConfig::exact().with_noise(noise), None, false).is_err());
}
