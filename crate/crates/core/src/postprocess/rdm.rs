//! One- and two-particle reduced density matrices in the spin-orbital basis.
//!
//! Conventions: `one[p][q] = <a†_p a_q>` and `two[p][q][r][s] = <a†_p a†_q a_s a_r>`,
//! so that the matrix with row `(p, q)` and column `(r, s)` is positive
//! semidefinite with trace N(N-1).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::PostprocessError;
use crate::mapping::{fermion_to_qubit_mapping, MappingConfig, MappingError};
use crate::operator::{FermionOperator, Ladder, PauliWord, QubitOperator};

/// Coefficients below this are treated as absent when reading words.
const COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdmPair {
    pub n_orbitals: usize,
    /// Row-major n×n.
    pub one: Vec<f64>,
    /// Row-major n×n×n×n.
    pub two: Vec<f64>,
    pub n_electrons: Option<usize>,
}

impl RdmPair {
    pub fn zeros(n: usize) -> RdmPair {
        RdmPair {
            n_orbitals: n,
            one: vec![0.0; n * n],
            two: vec![0.0; n * n * n * n],
            n_electrons: None,
        }
    }

    pub fn one(&self, p: usize, q: usize) -> f64 {
        self.one[p * self.n_orbitals + q]
    }

    pub fn two(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.two[((p * n + q) * n + r) * n + s]
    }

    pub fn set_one(&mut self, p: usize, q: usize, v: f64) {
        self.one[p * self.n_orbitals + q] = v;
    }

    pub fn set_two(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orbitals;
        self.two[((p * n + q) * n + r) * n + s] = v;
    }

    pub fn trace_one(&self) -> f64 {
        (0..self.n_orbitals).map(|p| self.one(p, p)).sum()
    }

    /// Expectation of a constant, `p^ q` or `p^ q^ r s` sequence.
    pub fn expectation(&self, ops: &[Ladder]) -> Result<f64, PostprocessError> {
        let creation: Vec<bool> = ops.iter().map(|l| l.creation).collect();
        match creation.as_slice() {
            [] => Ok(1.0),
            [true, false] => Ok(self.one(ops[0].index, ops[1].index)),
            [true, true, false, false] => {
                Ok(self.two(ops[0].index, ops[1].index, ops[3].index, ops[2].index))
            }
            _ => Err(PostprocessError::UnsupportedTerm(sequence_string(ops))),
        }
    }
}

fn sequence_string(ops: &[Ladder]) -> alloc::string::String {
    ops.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Ladder sequences whose expectations fill the RDMs: `p^ q` for all p, q and
/// `p^ q^ s r` for p ≠ q, r ≠ s.
pub fn rdm_terms(n: usize) -> Vec<Vec<Ladder>> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            out.push(vec![Ladder::create(p), Ladder::annihilate(q)]);
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    if p != q && r != s {
                        out.push(vec![
                            Ladder::create(p),
                            Ladder::create(q),
                            Ladder::annihilate(s),
                            Ladder::annihilate(r),
                        ]);
                    }
                }
            }
        }
    }
    out
}

/// Qubit image of one sequence. Terms that break a symmetry tapered by scBK
/// have vanishing expectation in the symmetry sector and map to zero.
fn image(ops: &[Ladder], mapping: &MappingConfig) -> Result<QubitOperator, MappingError> {
    let f = FermionOperator::term(ops.to_vec(), 1.0);
    match fermion_to_qubit_mapping(&f, mapping) {
        Ok(q) => Ok(q.compress(COEFF_EPS)),
        Err(MappingError::SymmetryViolation(_)) => Ok(QubitOperator::zero()),
        Err(e) => Err(e),
    }
}

/// Every non-identity word with a real coefficient needed by [`rdms_from_expectations`].
pub fn rdm_words(mapping: &MappingConfig) -> Result<BTreeSet<PauliWord>, PostprocessError> {
    let mut words = BTreeSet::new();
    for ops in rdm_terms(mapping.n_spinorbitals) {
        for (w, c) in image(&ops, mapping)?.iter() {
            if libm::fabs(c.re) > COEFF_EPS && !w.is_identity() {
                words.insert(w.clone());
            }
        }
    }
    Ok(words)
}

/// Assembles the RDMs from Pauli-word expectation values. Each element is
/// the sum of Re(coefficient) × expectation over the real-coefficient words
/// of its qubit image; imaginary-coefficient words do not contribute.
pub fn rdms_from_expectations(
    mapping: &MappingConfig,
    expectations: &BTreeMap<PauliWord, f64>,
) -> Result<RdmPair, PostprocessError> {
    let n = mapping.n_spinorbitals;
    let mut rdm = RdmPair::zeros(n);
    rdm.n_electrons = mapping.n_electrons;
    let mut cache: BTreeMap<Vec<Ladder>, f64> = BTreeMap::new();
    for ops in rdm_terms(n) {
        let mut v = 0.0;
        for (w, c) in image(&ops, mapping)?.iter() {
            if libm::fabs(c.re) <= COEFF_EPS {
                continue;
            }
            let e = if w.is_identity() {
                1.0
            } else {
                *expectations
                    .get(w)
                    .ok_or_else(|| PostprocessError::MissingExpectation(w.clone()))?
            };
            v += c.re * e;
        }
        cache.insert(ops, v);
    }
    for (ops, v) in cache {
        match ops.as_slice() {
            [a, b] => rdm.set_one(a.index, b.index, v),
            [p, q, s, r] => rdm.set_two(p.index, q.index, r.index, s.index, v),
            _ => unreachable!("rdm_terms yields 2- and 4-operator sequences"),
        }
    }
    Ok(rdm)
}

/// `Σ Re(c) <term>` over the terms of `h`.
pub fn energy_from_rdms(h: &FermionOperator, rdm: &RdmPair) -> Result<f64, PostprocessError> {
    let mut e = 0.0;
    for (ops, c) in h.iter() {
        if let Some(l) = ops.iter().find(|l| l.index >= rdm.n_orbitals) {
            return Err(PostprocessError::Invalid(alloc::format!(
                "term index {} outside the {}-orbital RDM",
                l.index,
                rdm.n_orbitals
            )));
        }
        e += c.re * rdm.expectation(ops)?;
    }
    Ok(e)
}
