use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::SimulatorError;
use crate::circuit::Gate;
use crate::linalg::CompiledOperator;
use crate::operator::QubitOperator;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Gate names understood by the simulator, as written in circuits.
pub const SUPPORTED_GATES: &[&str] = &[
    "H", "X", "Y", "Z", "S", "SDAG", "T", "TDAG", "RX", "RY", "RZ", "PHASE", "CNOT", "CX", "CY",
    "CZ", "CRX", "CRY", "CRZ", "CPHASE", "SWAP", "CSWAP", "MEASURE",
];

/// Pure state of `n` qubits. Basis index bit `k` holds qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

type Mat2 = [[Complex64; 2]; 2];

enum Kernel {
    Single {
        target: usize,
        controls: usize,
        m: Mat2,
    },
    Swap {
        a: usize,
        b: usize,
        controls: usize,
    },
    Nop,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn expi(theta: f64) -> Complex64 {
    c(libm::cos(theta), libm::sin(theta))
}

fn base_matrix(name: &str, theta: Option<f64>) -> Option<Mat2> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let t = theta.unwrap_or(0.0);
    let (ct, st) = (libm::cos(t / 2.0), libm::sin(t / 2.0));
    Some(match name {
        "H" => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        "X" => [[C0, C1], [C1, C0]],
        "Y" => [[C0, c(0.0, -1.0)], [c(0.0, 1.0), C0]],
        "Z" => [[C1, C0], [C0, -C1]],
        "S" => [[C1, C0], [C0, c(0.0, 1.0)]],
        "SDAG" => [[C1, C0], [C0, c(0.0, -1.0)]],
        "T" => [[C1, C0], [C0, expi(core::f64::consts::FRAC_PI_4)]],
        "TDAG" => [[C1, C0], [C0, expi(-core::f64::consts::FRAC_PI_4)]],
        "RX" => [[c(ct, 0.0), c(0.0, -st)], [c(0.0, -st), c(ct, 0.0)]],
        "RY" => [[c(ct, 0.0), c(-st, 0.0)], [c(st, 0.0), c(ct, 0.0)]],
        "RZ" => [[expi(-t / 2.0), C0], [C0, expi(t / 2.0)]],
        "PHASE" => [[C1, C0], [C0, expi(t)]],
        _ => return None,
    })
}

fn mask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << q))
}

fn kernel(gate: &Gate) -> Result<Kernel, SimulatorError> {
    let name = gate.name();
    let bad = |reason: &str| SimulatorError::InvalidGate {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    if name == "MEASURE" {
        return Ok(Kernel::Nop);
    }
    let (base, needs_control) = match name {
        "CNOT" | "CX" => ("X", true),
        "CY" => ("Y", true),
        "CZ" => ("Z", true),
        "CRX" => ("RX", true),
        "CRY" => ("RY", true),
        "CRZ" => ("RZ", true),
        "CPHASE" => ("PHASE", true),
        "CSWAP" => ("SWAP", true),
        other => (other, false),
    };
    if needs_control && gate.controls().is_empty() {
        return Err(bad("needs at least one control qubit"));
    }
    let controls = mask(gate.controls());
    if base == "SWAP" {
        return match gate.targets() {
            [a, b] => Ok(Kernel::Swap {
                a: *a,
                b: *b,
                controls,
            }),
            _ => Err(bad("needs exactly two targets")),
        };
    }
    let parametric = matches!(base, "RX" | "RY" | "RZ" | "PHASE");
    let theta = gate.parameter_value().map_err(SimulatorError::Circuit)?;
    if parametric && theta.is_none() {
        return Err(bad("needs a parameter"));
    }
    let m = base_matrix(base, theta)
        .ok_or_else(|| SimulatorError::UnsupportedGate(name.to_string()))?;
    match gate.targets() {
        [t] => Ok(Kernel::Single {
            target: *t,
            controls,
            m,
        }),
        _ => Err(bad("needs exactly one target")),
    }
}

/// Checks that the simulator can run `gate`, without applying it.
pub fn validate_gate(gate: &Gate) -> Result<(), SimulatorError> {
    kernel(gate).map(|_| ())
}

impl Statevector {
    /// |0...0> on `n` qubits.
    pub fn zero(n_qubits: usize) -> Statevector {
        Statevector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Statevector {
        let mut amps = vec![C0; 1 << n_qubits];
        amps[index] = C1;
        Statevector { n_qubits, amps }
    }

    /// Computational basis state from an occupation string, character `i` = qubit `i`.
    pub fn from_bitstring(bits: &str) -> Result<Statevector, SimulatorError> {
        let mut index = 0;
        for (i, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << i,
                _ => {
                    return Err(SimulatorError::InvalidState(alloc::format!(
                        "bad bitstring '{bits}'"
                    )))
                }
            }
        }
        Ok(Statevector::basis(bits.len(), index))
    }

    /// Wraps amplitudes; length must be a power of two and the norm 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Statevector, SimulatorError> {
        if !amps.len().is_power_of_two() {
            return Err(SimulatorError::InvalidState(alloc::format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if libm::fabs(norm - 1.0) > 1e-10 {
            return Err(SimulatorError::InvalidState(alloc::format!(
                "state norm² is {norm}"
            )));
        }
        Ok(Statevector {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// <self|other>.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Zero-pads to a larger register (new qubits in |0>).
    pub fn widened(&self, n_qubits: usize) -> Statevector {
        let mut amps = self.amps.clone();
        amps.resize(1 << n_qubits.max(self.n_qubits), C0);
        Statevector {
            n_qubits: n_qubits.max(self.n_qubits),
            amps,
        }
    }

    pub fn expectation(&self, op: &QubitOperator) -> Complex64 {
        CompiledOperator::new(op).expectation(&self.amps)
    }

    /// Applies one gate in place. MEASURE is accepted and ignored.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimulatorError> {
        if gate.width() > self.n_qubits {
            return Err(SimulatorError::WidthMismatch {
                needed: gate.width(),
                available: self.n_qubits,
            });
        }
        match kernel(gate)? {
            Kernel::Single {
                target,
                controls,
                m,
            } => self.apply_single(target, controls, &m),
            Kernel::Swap { a, b, controls } => self.apply_swap(a, b, controls),
            Kernel::Nop => {}
        }
        Ok(())
    }

    /// Applies a single-qubit Pauli (1 = X, 2 = Y, 3 = Z).
    pub(crate) fn apply_pauli(&mut self, qubit: usize, code: u32) {
        let name = match code {
            1 => "X",
            2 => "Y",
            3 => "Z",
            _ => return,
        };
        let m = base_matrix(name, None).expect("Pauli matrix");
        self.apply_single(qubit, 0, &m);
    }

    fn apply_single(&mut self, target: usize, controls: usize, m: &Mat2) {
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & tbit != 0 || i & controls != controls {
                continue;
            }
            let j = i | tbit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize, controls: usize) {
        let (abit, bbit) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & abit != 0 && i & bbit == 0 && i & controls == controls {
                self.amps.swap(i, (i & !abit) | bbit);
            }
        }
    }

    /// Basis label of `index` on this register, character `i` = qubit `i`.
    pub fn bitstring(&self, index: usize) -> String {
        bitstring(index, self.n_qubits)
    }
}

pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}
