//! Reference-state and hardware-efficient circuit builders.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    /// CNOT(q -> q+1) for each neighbouring pair.
    Linear,
    /// Linear plus CNOT(n-1 -> 0).
    Circular,
}

/// X on every qubit whose character is '1' (character `i` = qubit `i`).
pub fn reference_circuit(occupation: &str) -> Circuit {
    let gates = occupation
        .chars()
        .enumerate()
        .filter(|(_, c)| *c == '1')
        .map(|(q, _)| Gate::single("X", q))
        .collect();
    Circuit::with_width(gates, occupation.len())
}

/// `layers` rotation blocks with an entangling block between consecutive
/// rotation blocks. Every rotation is variational with angle 0.
pub fn hea_circuit(
    n_qubits: usize,
    layers: usize,
    rotations: &[String],
    entangler: Entangler,
) -> Circuit {
    let mut gates = Vec::new();
    for layer in 0..layers {
        if layer > 0 {
            for q in 0..n_qubits.saturating_sub(1) {
                gates.push(Gate::cnot(q, q + 1));
            }
            if entangler == Entangler::Circular && n_qubits > 2 {
                gates.push(Gate::cnot(n_qubits - 1, 0));
            }
        }
        for q in 0..n_qubits {
            for axis in rotations {
                gates.push(Gate::rotation(axis, q, 0.0).variational());
            }
        }
    }
    Circuit::with_width(gates, n_qubits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn reference_gates() {
        let c = reference_circuit("1100");
        assert_eq!(c.size(), 2);
        assert_eq!(c.width(), 4);
        assert_eq!(c.gates()[1], Gate::single("X", 1));
    }

    #[test]
    fn hea_counts() {
        let rot = vec!["RY".to_string(), "RZ".to_string()];
        let c = hea_circuit(4, 3, &rot, Entangler::Linear);
        assert_eq!(c.variational_gates().len(), 24);
        assert_eq!(c.two_qubit_gate_count(), 6);
        let c = hea_circuit(4, 2, &rot[..1], Entangler::Circular);
        assert_eq!(c.two_qubit_gate_count(), 4);
        let c = hea_circuit(1, 1, &rot[..1], Entangler::Linear);
        assert_eq!(c.size(), 1);
    }
}
