//! Qubit coupled-cluster generators: gradient screening and circuits.
//!
//! The energy derivative of `exp(-iτP/2)` at τ = 0 is `(i/2)<[P, H]>`, which
//! for a Hermitian `P` equals `-Im <Pψ|Hψ>`. Candidate generators are all
//! Pauli words with an odd number of Y factors whose support equals the
//! support of some Hamiltonian term.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::linalg::{pauli_action, CompiledOperator};
use crate::operator::{Pauli, PauliWord, QubitOperator};
use crate::simulator::Statevector;

/// Gradients closer than this are treated as one candidate set.
pub const GRADIENT_GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QccGeneratorSet {
    /// Generators in application order (the first acts on the reference first).
    pub generators: Vec<PauliWord>,
    /// Screening gradient dE/dτ of each generator.
    pub gradients: Vec<f64>,
}

impl QccGeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Words on `support` with an odd number of Y factors, in lexicographic order.
fn odd_y_words(support: &[usize]) -> Vec<PauliWord> {
    let k = support.len();
    let mut out = Vec::new();
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut factors = Vec::with_capacity(k);
        for &q in support.iter().rev() {
            let axis = [Pauli::X, Pauli::Y, Pauli::Z][c % 3];
            c /= 3;
            factors.push((q, axis));
        }
        let w = PauliWord::new(factors).expect("distinct qubits");
        if w.count(Pauli::Y) % 2 == 1 {
            out.push(w);
        }
    }
    out.sort();
    out
}

pub fn candidate_pool(h: &QubitOperator) -> Vec<PauliWord> {
    let supports: BTreeSet<Vec<usize>> = h
        .words()
        .filter(|w| !w.is_identity())
        .map(PauliWord::support)
        .collect();
    let mut pool: Vec<PauliWord> = supports.iter().flat_map(|s| odd_y_words(s)).collect();
    pool.sort();
    pool.dedup();
    pool
}

/// dE/dτ at τ = 0 for each word, given `hpsi = H|ψ>`.
fn gradient(word: &PauliWord, psi: &[Complex64], hpsi: &[Complex64]) -> f64 {
    let (x, z) = word.masks();
    let ny = word.count(Pauli::Y) as u32;
    let mut overlap = Complex64::new(0.0, 0.0);
    for (b, a) in psi.iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (phase, nb) = pauli_action(x, z, ny, b as u64);
        // <Pψ|Hψ> = Σ conj(phase a_b) (Hψ)_{b^x}
        overlap += (phase * a).conj() * hpsi[nb as usize];
    }
    -overlap.im
}

/// Screening gradients of `words` on `reference`.
pub fn qcc_gradients(h: &QubitOperator, reference: &Statevector, words: &[PauliWord]) -> Vec<f64> {
    let psi = reference.amplitudes();
    let hpsi = CompiledOperator::new(h).apply(psi);
    words.iter().map(|w| gradient(w, psi, &hpsi)).collect()
}

/// Picks generators from the candidate pool. Candidates are sorted by
/// decreasing |gradient| (ties in word order) and clustered when their
/// magnitudes agree within [`GRADIENT_GROUP_TOL`]. The lexicographically
/// smallest word of each cluster above `threshold` is kept; `max_generators`
/// truncates the resulting list.
pub fn qcc_screen_generators(
    h: &QubitOperator,
    reference: &Statevector,
    threshold: f64,
    max_generators: Option<usize>,
) -> QccGeneratorSet {
    let pool: Vec<PauliWord> = candidate_pool(h)
        .into_iter()
        .filter(|w| w.width() <= reference.n_qubits())
        .collect();
    let grads = qcc_gradients(h, reference, &pool);
    let mut ranked: Vec<(PauliWord, f64)> = pool.into_iter().zip(grads).collect();
    ranked.sort_by(|a, b| {
        libm::fabs(b.1)
            .total_cmp(&libm::fabs(a.1))
            .then_with(|| a.0.cmp(&b.0))
    });

    let mut generators = Vec::new();
    let mut gradients = Vec::new();
    let mut i = 0;
    while i < ranked.len() {
        let head = libm::fabs(ranked[i].1);
        let mut j = i + 1;
        while j < ranked.len() && head - libm::fabs(ranked[j].1) <= GRADIENT_GROUP_TOL {
            j += 1;
        }
        if head >= threshold && head > 0.0 {
            let rep = ranked[i..j]
                .iter()
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("non-empty cluster");
            generators.push(rep.0.clone());
            gradients.push(rep.1);
        }
        i = j;
    }
    if let Some(m) = max_generators {
        generators.truncate(m);
        gradients.truncate(m);
    }
    QccGeneratorSet {
        generators,
        gradients,
    }
}

/// Gates implementing `exp(-i τ P / 2)`: basis change, CNOT ladder, RZ(τ) on
/// the last qubit of the support, and the reverse. The RZ is variational.
pub fn pauli_exponential(word: &PauliWord, tau: f64) -> Vec<Gate> {
    let f = word.factors();
    let mut gates = Vec::new();
    if f.is_empty() {
        return gates;
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    for &(q, a) in f {
        match a {
            Pauli::X => gates.push(Gate::single("H", q)),
            Pauli::Y => gates.push(Gate::rotation("RX", q, half_pi)),
            Pauli::Z => {}
        }
    }
    for pair in f.windows(2) {
        gates.push(Gate::cnot(pair[0].0, pair[1].0));
    }
    gates.push(Gate::rotation("RZ", f[f.len() - 1].0, tau).variational());
    for pair in f.windows(2).rev() {
        gates.push(Gate::cnot(pair[0].0, pair[1].0));
    }
    for &(q, a) in f {
        match a {
            Pauli::X => gates.push(Gate::single("H", q)),
            Pauli::Y => gates.push(Gate::rotation("RX", q, -half_pi)),
            Pauli::Z => {}
        }
    }
    gates
}

/// Optional Bloch layer (RY(θ_j) then RZ(φ_j) on every qubit, angles 0)
/// followed by one exponential per generator, in list order. The reference
/// X layer is not included.
pub fn qcc_circuit(generators: &[PauliWord], n_qubits: usize, bloch_layer: bool) -> Circuit {
    let mut gates = Vec::new();
    if bloch_layer {
        for q in 0..n_qubits {
            gates.push(Gate::rotation("RY", q, 0.0).variational());
            gates.push(Gate::rotation("RZ", q, 0.0).variational());
        }
    }
    for g in generators {
        gates.extend(pauli_exponential(g, 0.0));
    }
    Circuit::with_width(gates, n_qubits)
}

/// Bloch angles (θ_j, φ_j) read back from parameters laid out as in
/// [`qcc_circuit`] with the Bloch layer on.
pub fn bloch_angles(params: &[f64], n_qubits: usize) -> Vec<(f64, f64)> {
    (0..n_qubits)
        .map(|j| (params[2 * j], params[2 * j + 1]))
        .collect()
}
