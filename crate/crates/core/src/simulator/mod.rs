//! Statevector simulation, shot sampling and noisy trajectories.

mod noise;
mod statevector;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use noise::{apply_noise_trajectory, ChannelKind, NoiseChannel, NoiseModel};
pub use statevector::{bitstring, validate_gate, Statevector, SUPPORTED_GATES};

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::operator::{Pauli, PauliWord, QubitOperator};
use crate::rng::{self, unit_f64, StreamRng};

/// Exact-mode histogram entries below this probability are dropped.
pub const EXACT_CULL: f64 = 1e-10;
const PATTERN_CACHE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulatorError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("unsupported gate '{0}'")]
    UnsupportedGate(String),
    #[error("invalid gate {name}: {reason}")]
    InvalidGate { name: String, reason: String },
    #[error("circuit width {width} exceeds the {mode} cap of {cap} qubits")]
    WidthCap {
        width: usize,
        cap: usize,
        mode: &'static str,
    },
    #[error("gate needs {needed} qubits but the state has {available}")]
    WidthMismatch { needed: usize, available: usize },
    #[error("statevector is not available for noisy simulation")]
    StatevectorUnderNoise,
    #[error("a noise model requires n_shots to be set")]
    NoiseWithoutShots,
    #[error("n_shots must be positive")]
    ZeroShots,
    #[error("MEASURE on qubit {0} is followed by further gates; only trailing measurements are supported")]
    MidCircuitMeasure(usize),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("histogram key '{key}' is too short for term [{word}]")]
    ShortKey { key: String, word: PauliWord },
    #[error("expectation value has imaginary part {0:e}; operator is not Hermitian")]
    NonHermitian(f64),
}

/// Sparse outcome frequencies keyed by bitstring, character `i` = qubit `i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Histogram(pub BTreeMap<String, f64>);

impl Histogram {
    pub fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    /// Key length, taken from the first entry.
    pub fn n_qubits(&self) -> usize {
        self.0.keys().next().map_or(0, String::len)
    }

    fn from_counts(counts: &BTreeMap<usize, u64>, n_qubits: usize, shots: u64) -> Histogram {
        Histogram(
            counts
                .iter()
                .map(|(&idx, &k)| (bitstring(idx, n_qubits), k as f64 / shots as f64))
                .collect(),
        )
    }
}

fn default_target() -> String {
    "statevector".to_string()
}

fn default_exact_cap() -> usize {
    24
}

fn default_noisy_cap() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    #[serde(default = "default_target")]
    pub target: String,
    /// `None` means exact probabilities.
    #[serde(default)]
    pub n_shots: Option<u64>,
    #[serde(default)]
    pub noise_model: Option<NoiseModel>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_exact_cap")]
    pub max_exact_qubits: usize,
    #[serde(default = "default_noisy_cap")]
    pub max_noisy_qubits: usize,
}

impl Default for BackendConfig {
    fn default() -> BackendConfig {
        BackendConfig {
            target: default_target(),
            n_shots: None,
            noise_model: None,
            seed: None,
            max_exact_qubits: default_exact_cap(),
            max_noisy_qubits: default_noisy_cap(),
        }
    }
}

impl BackendConfig {
    pub fn exact() -> BackendConfig {
        BackendConfig::default()
    }

    pub fn shots(n_shots: u64, seed: u64) -> BackendConfig {
        BackendConfig {
            n_shots: Some(n_shots),
            seed: Some(seed),
            ..BackendConfig::default()
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> BackendConfig {
        self.noise_model = Some(noise);
        self
    }

    fn validate(&self) -> Result<(), SimulatorError> {
        if self.n_shots == Some(0) {
            return Err(SimulatorError::ZeroShots);
        }
        if self.noise_model.is_some() && self.n_shots.is_none() {
            return Err(SimulatorError::NoiseWithoutShots);
        }
        Ok(())
    }

    fn noise(&self) -> Option<&NoiseModel> {
        self.noise_model.as_ref()
    }
}

/// Static description of the backend: ordering convention, caps, gate set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackendInfo {
    pub target: String,
    pub statevector_ordering: &'static str,
    pub histogram_ordering: &'static str,
    pub max_exact_qubits: usize,
    pub max_noisy_qubits: usize,
    pub supported_gates: Vec<&'static str>,
    pub noise_channels: Vec<&'static str>,
}

pub fn backend_info(cfg: &BackendConfig) -> BackendInfo {
    BackendInfo {
        target: cfg.target.clone(),
        statevector_ordering: "basis index bit k = qubit k (little-endian)",
        histogram_ordering: "bitstring character i = qubit i",
        max_exact_qubits: cfg.max_exact_qubits,
        max_noisy_qubits: cfg.max_noisy_qubits,
        supported_gates: SUPPORTED_GATES.to_vec(),
        noise_channels: alloc::vec!["depol"],
    }
}

/// Rejects MEASURE gates that are followed by non-MEASURE gates.
fn check_measurements(c: &Circuit) -> Result<(), SimulatorError> {
    let mut measured: Option<usize> = None;
    for g in c.gates() {
        if g.name() == "MEASURE" {
            measured.get_or_insert(g.targets()[0]);
        } else if let Some(q) = measured {
            return Err(SimulatorError::MidCircuitMeasure(q));
        }
    }
    Ok(())
}

fn prepare(
    c: &Circuit,
    initial: Option<&Statevector>,
    cap: usize,
    mode: &'static str,
) -> Result<Statevector, SimulatorError> {
    check_measurements(c)?;
    for g in c.gates() {
        validate_gate(g)?;
    }
    let width = c.width();
    let state = match initial {
        Some(s) => {
            if s.n_qubits() < width {
                return Err(SimulatorError::WidthMismatch {
                    needed: width,
                    available: s.n_qubits(),
                });
            }
            s.clone()
        }
        None => Statevector::zero(width),
    };
    if state.n_qubits() > cap {
        return Err(SimulatorError::WidthCap {
            width: state.n_qubits(),
            cap,
            mode,
        });
    }
    Ok(state)
}

/// Runs `c` noiselessly from `initial` (or |0...0>) and returns the final state.
pub fn run_statevector(
    c: &Circuit,
    initial: Option<&Statevector>,
    cap: usize,
) -> Result<Statevector, SimulatorError> {
    let mut state = prepare(c, initial, cap, "exact")?;
    for g in c.gates() {
        state.apply(g)?;
    }
    Ok(state)
}

/// Inverse-CDF sampler over the nonzero entries of a probability vector.
struct Sampler {
    support: Vec<usize>,
    cdf: Vec<f64>,
}

impl Sampler {
    fn new(probs: &[f64]) -> Sampler {
        let mut support = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                support.push(i);
                cdf.push(acc);
            }
        }
        Sampler { support, cdf }
    }

    fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("normalised state has support");
        let u = unit_f64(rng) * total;
        let pos = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.support.len() - 1);
        self.support[pos]
    }
}

fn exact_histogram(state: &Statevector) -> Histogram {
    let n = state.n_qubits();
    Histogram(
        state
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= EXACT_CULL)
            .map(|(i, &p)| (bitstring(i, n), p))
            .collect(),
    )
}

fn sample_counts<R: RngCore + ?Sized>(
    state: &Statevector,
    shots: u64,
    rng: &mut R,
) -> BTreeMap<usize, u64> {
    let sampler = Sampler::new(&state.probabilities());
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(sampler.draw(rng)).or_insert(0) += 1;
    }
    counts
}

fn noisy_counts(
    c: &Circuit,
    start: &Statevector,
    noise: &NoiseModel,
    shots: u64,
    rng: &mut StreamRng,
) -> Result<BTreeMap<usize, u64>, SimulatorError> {
    let noisy: Vec<(usize, &[NoiseChannel])> = c
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| (i, noise.channels(g.name())))
        .filter(|(_, ch)| !ch.is_empty())
        .collect();
    let mut cache: BTreeMap<Vec<u32>, Sampler> = BTreeMap::new();
    let mut counts = BTreeMap::new();
    let mut pattern = Vec::new();
    for _ in 0..shots {
        pattern.clear();
        for &(i, ch) in &noisy {
            noise::sample_insertions(&c.gates()[i], ch, rng, &mut pattern);
        }
        let outcome = if let Some(s) = cache.get(&pattern) {
            s.draw(rng)
        } else {
            let state = run_with_pattern(c, start, noise, &pattern)?;
            let sampler = Sampler::new(&state.probabilities());
            let outcome = sampler.draw(rng);
            if cache.len() < PATTERN_CACHE_LIMIT {
                cache.insert(pattern.clone(), sampler);
            }
            outcome
        };
        *counts.entry(outcome).or_insert(0) += 1;
    }
    Ok(counts)
}

fn run_with_pattern(
    c: &Circuit,
    start: &Statevector,
    noise: &NoiseModel,
    pattern: &[u32],
) -> Result<Statevector, SimulatorError> {
    let mut state = start.clone();
    let mut picks = pattern.iter();
    for g in c.gates() {
        state.apply(g)?;
        for _ in noise.channels(g.name()) {
            let pick = *picks.next().expect("pattern covers every channel");
            if pick != 0 {
                for (q, code) in noise::insertion_paulis(g, pick) {
                    state.apply_pauli(q, code);
                }
            }
        }
    }
    Ok(state)
}

/// Simulates `c` and returns its outcome histogram, plus the final state when
/// requested (noiseless only).
pub fn simulate(
    c: &Circuit,
    cfg: &BackendConfig,
    initial_state: Option<&Statevector>,
    return_statevector: bool,
) -> Result<(Histogram, Option<Statevector>), SimulatorError> {
    cfg.validate()?;
    let noise = cfg.noise();
    if noise.is_some() && return_statevector {
        return Err(SimulatorError::StatevectorUnderNoise);
    }
    let mut rng = rng::seeded(cfg.seed.unwrap_or(0));
    match (cfg.n_shots, noise) {
        (Some(shots), Some(noise)) => {
            let start = prepare(c, initial_state, cfg.max_noisy_qubits, "noisy")?;
            let n = start.n_qubits();
            let counts = noisy_counts(c, &start, noise, shots, &mut rng)?;
            Ok((Histogram::from_counts(&counts, n, shots), None))
        }
        (shots, None) => {
            let state = run_statevector(c, initial_state, cfg.max_exact_qubits)?;
            let hist = match shots {
                None => exact_histogram(&state),
                Some(s) => {
                    Histogram::from_counts(&sample_counts(&state, s, &mut rng), state.n_qubits(), s)
                }
            };
            Ok((hist, return_statevector.then_some(state)))
        }
        (None, Some(_)) => Err(SimulatorError::NoiseWithoutShots),
    }
}

/// Appends the rotation that takes `basis` to the computational basis:
/// H for X, RX(π/2) for Y, nothing for Z.
pub fn append_measurement_basis(c: &Circuit, basis: &PauliWord) -> Circuit {
    let mut out = c.clone();
    for &(q, axis) in basis.factors() {
        match axis {
            Pauli::X => out.add_gate(Gate::single("H", q)),
            Pauli::Y => out.add_gate(Gate::rotation("RX", q, core::f64::consts::FRAC_PI_2)),
            Pauli::Z => {}
        }
    }
    out
}

/// Parity estimate of `term` from frequencies measured in its basis.
pub fn expectation_from_frequencies_oneterm(
    term: &PauliWord,
    freqs: &Histogram,
) -> Result<f64, SimulatorError> {
    let support = term.support();
    let mut total = 0.0;
    for (key, &f) in freqs.iter() {
        let bytes = key.as_bytes();
        let mut parity = 0;
        for &q in &support {
            match bytes.get(q) {
                Some(b'1') => parity ^= 1,
                Some(_) => {}
                None => {
                    return Err(SimulatorError::ShortKey {
                        key: key.clone(),
                        word: term.clone(),
                    })
                }
            }
        }
        total += if parity == 0 { f } else { -f };
    }
    Ok(total)
}

/// <ψ|op|ψ> for the state prepared by `c`. Exact mode reads the statevector;
/// shot mode measures each qubit-wise commuting group in its parent basis.
pub fn get_expectation_value(
    op: &QubitOperator,
    c: &Circuit,
    cfg: &BackendConfig,
) -> Result<f64, SimulatorError> {
    get_expectation_value_from(op, c, cfg, None)
}

pub fn get_expectation_value_from(
    op: &QubitOperator,
    c: &Circuit,
    cfg: &BackendConfig,
    initial_state: Option<&Statevector>,
) -> Result<f64, SimulatorError> {
    cfg.validate()?;
    if cfg.n_shots.is_none() {
        let width = c
            .width()
            .max(op.n_qubits())
            .max(initial_state.map_or(0, Statevector::n_qubits));
        let start = match initial_state {
            Some(s) => s.widened(width),
            None => Statevector::zero(width),
        };
        let state = run_statevector(c, Some(&start), cfg.max_exact_qubits)?;
        let e = state.expectation(op);
        if libm::fabs(e.im) > 1e-8 {
            return Err(SimulatorError::NonHermitian(e.im));
        }
        return Ok(e.re);
    }

    let width = c.width().max(op.n_qubits());
    let mut padded = c.clone();
    padded.set_declared_width(Some(width));
    let groups = crate::measurement::group_qwc(op, cfg.seed.unwrap_or(0));
    let mut total = op.constant();
    for (i, (parent, members)) in groups.iter().enumerate() {
        let mut sub = cfg.clone();
        sub.seed = Some(rng::stream_seed(cfg.seed.unwrap_or(0), "basis", i as u64));
        let (hist, _) = simulate(
            &append_measurement_basis(&padded, parent),
            &sub,
            initial_state,
            false,
        )?;
        for (word, coeff) in members.iter() {
            total += coeff * expectation_from_frequencies_oneterm(word, &hist)?;
        }
    }
    Ok(total.re)
}

/// Convenience wrapper bundling a configuration.
#[derive(Debug, Clone, Default)]
pub struct Simulator {
    pub config: BackendConfig,
}

impl Simulator {
    pub fn new(config: BackendConfig) -> Simulator {
        Simulator { config }
    }

    pub fn simulate(&self, c: &Circuit) -> Result<Histogram, SimulatorError> {
        simulate(c, &self.config, None, false).map(|r| r.0)
    }

    pub fn statevector(&self, c: &Circuit) -> Result<Statevector, SimulatorError> {
        run_statevector(c, None, self.config.max_exact_qubits)
    }

    pub fn expectation(&self, op: &QubitOperator, c: &Circuit) -> Result<f64, SimulatorError> {
        get_expectation_value(op, c, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bell() -> Circuit {
        Circuit::new(vec![Gate::single("H", 0), Gate::cnot(0, 1)])
    }

    #[test]
    fn bell_histogram() {
        let (h, sv) = simulate(&bell(), &BackendConfig::exact(), None, true).unwrap();
        assert_eq!(h.len(), 2);
        assert!((h.get("00") - 0.5).abs() < 1e-12);
        assert!((h.get("11") - 0.5).abs() < 1e-12);
        assert_eq!(sv.unwrap().n_qubits(), 2);
    }

    #[test]
    fn empty_circuit_with_width() {
        let c = Circuit::with_width(vec![], 2);
        let (h, _) = simulate(&c, &BackendConfig::exact(), None, false).unwrap();
        assert_eq!(h.0, [("00".to_string(), 1.0)].into_iter().collect());
    }

    #[test]
    fn little_endian_keys() {
        let c = Circuit::with_width(vec![Gate::single("X", 0)], 2);
        let (h, _) = simulate(&c, &BackendConfig::exact(), None, false).unwrap();
        assert_eq!(h.get("10"), 1.0);
    }

    #[test]
    fn shots_are_reproducible() {
        let c = Circuit::new(vec![Gate::single("H", 0)]);
        let cfg = BackendConfig::shots(10_000, 7);
        let a = simulate(&c, &cfg, None, false).unwrap().0;
        let b = simulate(&c, &cfg, None, false).unwrap().0;
        assert_eq!(a, b);
        assert!((a.get("0") - 0.5).abs() < 0.02);
        assert!((a.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_errors() {
        let c = Circuit::new(vec![Gate::single("H", 0)]);
        let noisy = BackendConfig::exact().with_noise(NoiseModel::new());
        assert_eq!(
            simulate(&c, &noisy, None, false),
            Err(SimulatorError::NoiseWithoutShots)
        );
        let noisy = BackendConfig::shots(10, 0).with_noise(NoiseModel::new());
        assert_eq!(
            simulate(&c, &noisy, None, true),
            Err(SimulatorError::StatevectorUnderNoise)
        );
        let sym = Circuit::new(vec![Gate::single("RZ", 0).with_parameter("t")]);
        assert!(matches!(
            simulate(&sym, &BackendConfig::exact(), None, false),
            Err(SimulatorError::Circuit(_))
        ));
        let unknown = Circuit::new(vec![Gate::single("FOO", 0)]);
        assert!(matches!(
            simulate(&unknown, &BackendConfig::exact(), None, false),
            Err(SimulatorError::UnsupportedGate(_))
        ));
        let mut cfg = BackendConfig::exact();
        cfg.max_exact_qubits = 3;
        let wide = Circuit::new(vec![Gate::single("H", 3)]);
        assert!(matches!(
            simulate(&wide, &cfg, None, false),
            Err(SimulatorError::WidthCap { .. })
        ));
        let mid = Circuit::new(vec![Gate::single("MEASURE", 0), Gate::single("H", 0)]);
        assert!(matches!(
            simulate(&mid, &BackendConfig::exact(), None, false),
            Err(SimulatorError::MidCircuitMeasure(0))
        ));
        let bare = Circuit::new(vec![Gate::new("CNOT", &[0], &[]).unwrap()]);
        assert!(matches!(
            simulate(&bare, &BackendConfig::exact(), None, false),
            Err(SimulatorError::InvalidGate { .. })
        ));
    }

    #[test]
    fn frequency_parities() {
        let z0 = PauliWord::parse("Z0").unwrap();
        let h = Histogram([("0".to_string(), 1.0)].into_iter().collect());
        assert_eq!(expectation_from_frequencies_oneterm(&z0, &h).unwrap(), 1.0);
        let zz = PauliWord::parse("Z0 Z1").unwrap();
        let h = Histogram(
            [("00".to_string(), 0.5), ("11".to_string(), 0.5)]
                .into_iter()
                .collect(),
        );
        assert_eq!(expectation_from_frequencies_oneterm(&zz, &h).unwrap(), 1.0);
        let h = Histogram(
            ["01", "10", "00", "11"]
                .iter()
                .map(|k| (k.to_string(), 0.25))
                .collect(),
        );
        assert_eq!(expectation_from_frequencies_oneterm(&z0, &h).unwrap(), 0.0);
        let z3 = PauliWord::parse("Z3").unwrap();
        assert!(matches!(
            expectation_from_frequencies_oneterm(&z3, &h),
            Err(SimulatorError::ShortKey { .. })
        ));
    }

    #[test]
    fn basis_rotations() {
        let c = Circuit::new(vec![Gate::single("H", 0)]);
        let x0 = PauliWord::parse("X0").unwrap();
        let (h, _) = simulate(
            &append_measurement_basis(&c, &x0),
            &BackendConfig::exact(),
            None,
            false,
        )
        .unwrap();
        assert!((h.get("0") - 1.0).abs() < 1e-12);
        let zz = PauliWord::parse("Z0 Z1").unwrap();
        assert_eq!(append_measurement_basis(&c, &zz), c);
    }

    #[test]
    fn simple_expectations() {
        let z0 = QubitOperator::term(PauliWord::parse("Z0").unwrap(), 1.0);
        let x0 = QubitOperator::term(PauliWord::parse("X0").unwrap(), 1.0);
        let e = get_expectation_value(&z0, &Circuit::default(), &BackendConfig::exact()).unwrap();
        assert_eq!(e, 1.0);
        let h = Circuit::new(vec![Gate::single("H", 0)]);
        assert!(
            (get_expectation_value(&x0, &h, &BackendConfig::exact()).unwrap() - 1.0).abs() < 1e-12
        );
        assert!(
            (get_expectation_value(&x0, &h, &BackendConfig::shots(100, 1)).unwrap() - 1.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn noise_insertions() {
        let g = Gate::single("X", 0);
        let mut rng = rng::seeded(3);
        let mut never = NoiseModel::new();
        never.add_quantum_error("X", "depol", 0.0).unwrap();
        assert_eq!(
            apply_noise_trajectory(&g, &never, &mut rng),
            vec![g.clone()]
        );
        let mut always = NoiseModel::new();
        always.add_quantum_error("x", "depol", 1.0).unwrap();
        for _ in 0..50 {
            let out = apply_noise_trajectory(&g, &always, &mut rng);
            assert_eq!(out.len(), 2);
            assert!(["X", "Y", "Z"].contains(&out[1].name()));
        }
        assert!(never.add_quantum_error("X", "depol", 1.5).is_err());
        assert!(never.add_quantum_error("X", "damping", 0.1).is_err());
    }
}
