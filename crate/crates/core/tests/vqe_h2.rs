mod common;

use common::{dense, read_fermion, read_qubit, H2_FCI};
use fermiforge_core::linalg::exact_ground_energy;
use fermiforge_core::mapping::{Mapping, MappingConfig};
use fermiforge_core::simulator::run_statevector;
use fermiforge_core::vqe::qcc::{
    candidate_pool, qcc_circuit, qcc_gradients, qcc_screen_generators,
};
use fermiforge_core::vqe::{AnsatzSpec, Hamiltonian, InitialParams, VqeConfig, VqeSolver};
use fermiforge_core::{BackendConfig, Circuit, Gate, PauliWord, QubitOperator, Statevector};

const H2_HF: f64 = -1.1166843870853405;

fn h2(mapping: Mapping, ansatz: AnsatzSpec) -> VqeConfig {
    let mut m = MappingConfig::new(mapping, 4);
    m.n_electrons = Some(2);
    let mut cfg = VqeConfig::new(
        Hamiltonian::Fermion {
            operator: read_fermion("h2_sto3g_fermion.txt"),
            mapping: m,
        },
        ansatz,
    );
    cfg.optimizer.tolerance = 1e-12;
    cfg.optimizer.max_evaluations = 20_000;
    cfg
}

fn h2_qubit(ansatz: AnsatzSpec) -> VqeConfig {
    let mut cfg = VqeConfig::new(Hamiltonian::Qubit(read_qubit("h2_sto3g_jw.txt")), ansatz);
    cfg.reference = Some("1100".into());
    cfg.optimizer.tolerance = 1e-12;
    cfg.optimizer.max_evaluations = 20_000;
    cfg
}

#[test]
fn hea_reaches_exact() {
    let mut s = VqeSolver::new(h2_qubit(AnsatzSpec::hea(3)));
    s.build().unwrap();
    let e = s.simulate().unwrap();
    let exact = exact_ground_energy(s.qubit_hamiltonian().unwrap(), 4).unwrap();
    assert!((e - exact).abs() < 1e-6, "{e} vs {exact}");
    assert!(e >= exact - 1e-9);
}

#[test]
fn qcc_reaches_exact_for_each_mapping() {
    for mapping in [Mapping::JW, Mapping::BK] {
        let mut s = VqeSolver::new(h2(mapping, AnsatzSpec::qcc(1e-3)));
        s.build().unwrap();
        let e = s.simulate().unwrap();
        assert!((e - H2_FCI).abs() < 1e-6, "{mapping}: {e}");
        assert!(e >= H2_FCI - 1e-9);
    }
    let mut cfg = h2(Mapping::JW, AnsatzSpec::qcc(1e-3));
    cfg.hamiltonian = Hamiltonian::Fermion {
        operator: read_fermion("h2_sto3g_fermion.txt"),
        mapping: MappingConfig::scbk(4, 2),
    };
    let mut s = VqeSolver::new(cfg);
    s.build().unwrap();
    assert_eq!(s.reference().unwrap(), "10");
    let e = s.simulate().unwrap();
    assert!((e - H2_FCI).abs() < 1e-6, "scBK: {e}");
    let r = s.get_resources().unwrap();
    assert_eq!(
        (
            r.circuit_width,
            r.circuit_2qubit_gates,
            r.vqe_variational_parameters
        ),
        (2, 2, 1)
    );
}

#[test]
fn screening_gradients_match_finite_differences() {
    let h = read_qubit("h2_sto3g_jw.txt");
    let reference = Statevector::from_bitstring("1100").unwrap();
    let pool = candidate_pool(&h);
    assert!(!pool.is_empty());
    let grads = qcc_gradients(&h, &reference, &pool);
    let energy = |word: &PauliWord, tau: f64| {
        let mut c = qcc_circuit(std::slice::from_ref(word), 4, false);
        c.bind_parameters(&[tau]).unwrap();
        run_statevector(&c, Some(&reference), 10)
            .unwrap()
            .expectation(&h)
            .re
    };
    let step = 1e-5;
    for (word, g) in pool.iter().zip(&grads) {
        let fd = (energy(word, step) - energy(word, -step)) / (2.0 * step);
        assert!((fd - g).abs() < 1e-6, "{word}: analytic {g} vs fd {fd}");
    }
    let set = qcc_screen_generators(&h, &reference, 1e-3, None);
    assert!(!set.is_empty());
    assert!(set.gradients.iter().all(|g| g.abs() >= 1e-3));
}

#[test]
fn exponential_matches_dense() {
    let word = PauliWord::parse("Y0 X1").unwrap();
    let mut c = qcc_circuit(std::slice::from_ref(&word), 2, false);
    let tau = std::f64::consts::FRAC_PI_2;
    c.bind_parameters(&[tau]).unwrap();
    let s = run_statevector(&c, None, 10).unwrap();
    let u = dense::pauli_rotation(&dense::word(&word, 2), tau);
    for (i, a) in s.amplitudes().iter().enumerate() {
        assert!((a - u[(i, 0)]).norm() < 1e-10);
    }
}

#[test]
fn zero_parameters_give_reference_energy() {
    let mut s = VqeSolver::new(h2(Mapping::JW, AnsatzSpec::qcc(1e-3)));
    s.build().unwrap();
    let n = s.params().unwrap().len();
    let e = s.energy_estimation(&vec![0.0; n]).unwrap();
    assert!((e - H2_HF).abs() < 1e-10, "{e}");
    assert!(s.energy_estimation(&vec![0.0; n + 1]).is_err());
}

#[test]
fn resources_before_simulation() {
    let mut s = VqeSolver::new(h2(Mapping::JW, AnsatzSpec::hea(1)));
    assert!(s.get_resources().is_err());
    s.build().unwrap();
    let r = s.get_resources().unwrap();
    assert_eq!(r.qubit_hamiltonian_terms, 15);
    assert_eq!(r.circuit_width, 4);
    assert!(r.circuit_2qubit_gates <= r.circuit_gates);
    let json = serde_json::to_value(r).unwrap();
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    let mut expected = [
        "qubit_hamiltonian_terms",
        "circuit_width",
        "circuit_gates",
        "circuit_2qubit_gates",
        "circuit_var_gates",
        "vqe_variational_parameters",
    ];
    expected.sort();
    let mut got: Vec<&str> = keys.iter().map(|k| k.as_str()).collect();
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn random_start_is_reproducible() {
    let mut cfg = h2(Mapping::JW, AnsatzSpec::qcc(1e-3));
    cfg.initial_params = InitialParams::Random;
    cfg.optimizer.seed = 9;
    let mut a = VqeSolver::new(cfg.clone());
    a.build().unwrap();
    assert!(a.params().unwrap().iter().all(|t| t.abs() <= 1e-2));
    let mut b = VqeSolver::new(cfg);
    b.build().unwrap();
    assert_eq!(
        a.simulate().unwrap().to_bits(),
        b.simulate().unwrap().to_bits()
    );
}

#[test]
fn shot_backend_agrees_with_exact() {
    let mut s = VqeSolver::new(h2(Mapping::JW, AnsatzSpec::qcc(1e-3)));
    s.build().unwrap();
    let params = vec![0.1];
    let exact = s.energy_estimation(&params).unwrap();
    let mut cfg = s.config().clone();
    let shots = 1_000_000;
    cfg.backend = BackendConfig::shots(shots, 3);
    let mut noisy = VqeSolver::new(cfg);
    noisy.build().unwrap();
    let est = noisy.energy_estimation(&params).unwrap();
    // combined standard error: sum over terms of |c| / sqrt(shots)
    let h = noisy.qubit_hamiltonian().unwrap();
    let se: f64 = h
        .iter()
        .filter(|(w, _)| !w.is_identity())
        .map(|(_, c)| c.norm())
        .sum::<f64>()
        / (shots as f64).sqrt();
    assert!((est - exact).abs() < 5.0 * se, "{est} vs {exact} (se {se})");
}

fn toy_solver(scale: f64) -> VqeSolver {
    let h = QubitOperator::from_terms([
        (PauliWord::parse("Z0").unwrap(), scale),
        (PauliWord::parse("X0").unwrap(), 0.5 * scale),
    ]);
    let mut cfg = VqeConfig::new(
        Hamiltonian::Qubit(h),
        AnsatzSpec::Custom {
            circuit: Circuit::new(vec![Gate::rotation("RY", 0, 0.0).variational()]),
        },
    );
    cfg.reference = Some("0".into());
    cfg.optimizer.tolerance = 1e-15;
    let mut s = VqeSolver::new(cfg);
    s.build().unwrap();
    s
}

#[test]
fn scaling_the_hamiltonian() {
    let mut a = toy_solver(1.0);
    let mut b = toy_solver(2.0);
    let ea = a.simulate().unwrap();
    let eb = b.simulate().unwrap();
    assert!((eb - 2.0 * ea).abs() < 1e-8);
    assert!((ea + 1.25f64.sqrt()).abs() < 1e-8);
    let sa = a.state(&a.result().unwrap().params).unwrap();
    let sb = b.state(&b.result().unwrap().params).unwrap();
    assert!(sa.fidelity(&sb) >= 1.0 - 1e-6);
}
