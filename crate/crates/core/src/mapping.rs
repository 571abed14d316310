//! Fermion-to-qubit encodings.
//!
//! Jordan-Wigner, Bravyi-Kitaev and the parity encoding are all instances of one
//! construction: qubit `j` stores the parity of a subset `S_j` of occupation
//! numbers, described by a lower-triangular binary matrix. From that matrix we
//! read off the update, parity and flip sets of each mode and build
//!
//! ```text
//! a†_j = ½ X_U (X_j Z_P − i Y_j Z_R),   R = P Δ F
//! ```
//!
//! The symmetry-conserving variant (scBK) applies the parity encoding to
//! spin-blocked orbitals and removes the two qubits that hold the α-parity and
//! the total parity, both fixed by the electron count and spin sector.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::operator::{FermionOperator, Ladder, OperatorError, Pauli, PauliWord, QubitOperator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MappingError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("unknown mapping '{0}' (expected JW, BK or scBK)")]
    UnknownMapping(String),
    #[error("invalid mapping configuration: {0}")]
    InvalidConfig(String),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mapping {
    #[serde(alias = "jw")]
    JW,
    #[serde(alias = "bk")]
    BK,
    #[serde(rename = "scBK", alias = "scbk", alias = "SCBK")]
    ScBK,
}

impl FromStr for Mapping {
    type Err = MappingError;
    fn from_str(s: &str) -> Result<Mapping, MappingError> {
        match s.to_ascii_lowercase().as_str() {
            "jw" | "jordan_wigner" => Ok(Mapping::JW),
            "bk" | "bravyi_kitaev" => Ok(Mapping::BK),
            "scbk" => Ok(Mapping::ScBK),
            _ => Err(MappingError::UnknownMapping(s.to_string())),
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mapping::JW => "JW",
            Mapping::BK => "BK",
            Mapping::ScBK => "scBK",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingConfig {
    pub mapping: Mapping,
    pub n_spinorbitals: usize,
    /// Required by scBK only.
    #[serde(default)]
    pub n_electrons: Option<usize>,
    /// N_α − N_β, used by scBK to fix the α-parity sign.
    #[serde(default)]
    pub spin: i64,
    /// Input orbitals are interleaved (α0 β0 α1 β1 ...); when set, they are
    /// reordered so all α orbitals come first.
    #[serde(default)]
    pub up_then_down: bool,
}

impl MappingConfig {
    pub fn new(mapping: Mapping, n_spinorbitals: usize) -> MappingConfig {
        MappingConfig {
            mapping,
            n_spinorbitals,
            n_electrons: None,
            spin: 0,
            up_then_down: false,
        }
    }

    pub fn scbk(n_spinorbitals: usize, n_electrons: usize) -> MappingConfig {
        MappingConfig {
            mapping: Mapping::ScBK,
            n_spinorbitals,
            n_electrons: Some(n_electrons),
            spin: 0,
            up_then_down: true,
        }
    }

    /// Qubit count of the mapped operator.
    pub fn n_qubits(&self) -> usize {
        match self.mapping {
            Mapping::ScBK => self.n_spinorbitals.saturating_sub(2),
            _ => self.n_spinorbitals,
        }
    }
}

/// Which occupation numbers each qubit stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    JordanWigner,
    BravyiKitaev,
    Parity,
}

impl Encoding {
    /// `beta[j][k]` is true when qubit `j` includes occupation `n_k`.
    fn matrix(self, n: usize) -> Vec<Vec<bool>> {
        let mut beta = vec![vec![false; n]; n];
        for (j, row) in beta.iter_mut().enumerate() {
            let lo = match self {
                Encoding::JordanWigner => j,
                Encoding::BravyiKitaev => j & (j + 1),
                Encoding::Parity => 0,
            };
            for cell in &mut row[lo..=j] {
                *cell = true;
            }
        }
        beta
    }
}

/// Inverse over GF(2) of a unit lower-triangular matrix.
#[allow(clippy::needless_range_loop)]
fn gf2_inverse_lower(beta: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = beta.len();
    let mut inv = vec![vec![false; n]; n];
    // solve beta * inv = I column by column with forward substitution
    for col in 0..n {
        for row in 0..n {
            let mut v = row == col;
            for k in 0..row {
                v ^= beta[row][k] & inv[k][col];
            }
            inv[row][col] = v;
        }
    }
    inv
}

/// Update, parity and remainder sets for each mode.
struct LadderSets {
    update: Vec<Vec<usize>>,
    parity: Vec<Vec<usize>>,
    remainder: Vec<Vec<usize>>,
}

impl LadderSets {
    fn new(encoding: Encoding, n: usize) -> LadderSets {
        let beta = encoding.matrix(n);
        let inv = gf2_inverse_lower(&beta);
        let mut update = Vec::with_capacity(n);
        let mut parity = Vec::with_capacity(n);
        let mut remainder = Vec::with_capacity(n);
        for j in 0..n {
            update.push(((j + 1)..n).filter(|&i| beta[i][j]).collect::<Vec<_>>());
            let p: BTreeSet<usize> = (0..n)
                .filter(|&i| (0..j).filter(|&k| inv[k][i]).count() % 2 == 1)
                .collect();
            let f: BTreeSet<usize> = (0..j).filter(|&i| inv[j][i]).collect();
            remainder.push(p.symmetric_difference(&f).copied().collect());
            parity.push(p.into_iter().collect());
        }
        LadderSets {
            update,
            parity,
            remainder,
        }
    }

    fn ladder(&self, l: Ladder) -> QubitOperator {
        let j = l.index;
        let word = |axis: Pauli, zs: &[usize]| -> PauliWord {
            let mut f: Vec<(usize, Pauli)> =
                self.update[j].iter().map(|&q| (q, Pauli::X)).collect();
            f.push((j, axis));
            f.extend(zs.iter().map(|&q| (q, Pauli::Z)));
            PauliWord::new(f).expect("update, parity and mode sets are disjoint")
        };
        let sign = if l.creation { -0.5 } else { 0.5 };
        QubitOperator::from_terms([
            (word(Pauli::X, &self.parity[j]), Complex64::new(0.5, 0.0)),
            (
                word(Pauli::Y, &self.remainder[j]),
                Complex64::new(0.0, sign),
            ),
        ])
    }
}

/// Maps `f` with the given encoding on `n` modes.
pub fn encode(
    f: &FermionOperator,
    n: usize,
    encoding: Encoding,
) -> Result<QubitOperator, MappingError> {
    f.check_indices(n)?;
    let sets = LadderSets::new(encoding, n);
    let images: Vec<[QubitOperator; 2]> = (0..n)
        .map(|j| {
            [
                sets.ladder(Ladder::annihilate(j)),
                sets.ladder(Ladder::create(j)),
            ]
        })
        .collect();
    let mut out = QubitOperator::zero();
    for (ops, c) in f.iter() {
        let mut term = QubitOperator::identity(*c);
        for l in ops {
            term = term.multiply(&images[l.index][l.creation as usize]);
        }
        out = &out + &term;
    }
    Ok(out.compress(0.0))
}

pub fn jordan_wigner(f: &FermionOperator, n_so: usize) -> Result<QubitOperator, MappingError> {
    encode(f, n_so, Encoding::JordanWigner)
}

pub fn bravyi_kitaev(f: &FermionOperator, n_so: usize) -> Result<QubitOperator, MappingError> {
    encode(f, n_so, Encoding::BravyiKitaev)
}

pub fn parity(f: &FermionOperator, n_so: usize) -> Result<QubitOperator, MappingError> {
    encode(f, n_so, Encoding::Parity)
}

/// Spin-orbital position after moving from interleaved (α0 β0 α1 β1 ...) to
/// blocked (α0 α1 ... β0 β1 ...) order.
pub fn up_then_down_index(p: usize, n_so: usize) -> usize {
    if p.is_multiple_of(2) {
        p / 2
    } else {
        n_so / 2 + p / 2
    }
}

/// Symmetry-conserving Bravyi-Kitaev. `f` must already use blocked spin
/// ordering (all α orbitals first).
pub fn scbk(f: &FermionOperator, cfg: &MappingConfig) -> Result<QubitOperator, MappingError> {
    let n = cfg.n_spinorbitals;
    if n < 4 || n % 2 == 1 {
        return Err(MappingError::InvalidConfig(alloc::format!(
            "scBK needs an even number of spin-orbitals, at least 4 (got {n})"
        )));
    }
    if !cfg.up_then_down {
        return Err(MappingError::InvalidConfig(
            "scBK requires up_then_down ordering".into(),
        ));
    }
    let n_el = cfg
        .n_electrons
        .ok_or_else(|| MappingError::InvalidConfig("scBK requires n_electrons".into()))?
        as i64;
    if (n_el + cfg.spin) % 2 != 0 || cfg.spin.abs() > n_el {
        return Err(MappingError::InvalidConfig(alloc::format!(
            "spin {} is incompatible with {} electrons",
            cfg.spin,
            n_el
        )));
    }
    f.check_indices(n)?;
    let half = n / 2;
    for (ops, c) in f.iter() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let net = |alpha: bool| -> i64 {
            ops.iter()
                .filter(|l| (l.index < half) == alpha)
                .map(|l| if l.creation { 1 } else { -1 })
                .sum()
        };
        if net(true) != 0 || net(false) != 0 {
            return Err(MappingError::SymmetryViolation(alloc::format!(
                "term {} does not conserve particle number and spin",
                FermionOperator::term(ops.clone(), *c)
                    .to_string()
                    .trim_end()
            )));
        }
    }

    let n_alpha = (n_el + cfg.spin) / 2;
    let alpha_qubit = half - 1;
    let total_qubit = n - 1;
    let sign = |count: i64| if count % 2 == 0 { 1.0 } else { -1.0 };
    let (alpha_sign, total_sign) = (sign(n_alpha), sign(n_el));

    let full = parity(f, n)?;
    let mut out = QubitOperator::zero();
    for (word, c) in full.iter() {
        let mut coeff = *c;
        let mut factors = Vec::with_capacity(word.len());
        for &(q, axis) in word.factors() {
            if q == alpha_qubit || q == total_qubit {
                if axis != Pauli::Z {
                    return Err(MappingError::SymmetryViolation(alloc::format!(
                        "mapped term [{word}] acts with {} on tapered qubit {q}",
                        axis.as_char()
                    )));
                }
                coeff *= if q == alpha_qubit {
                    alpha_sign
                } else {
                    total_sign
                };
            } else {
                let nq = if q > alpha_qubit { q - 1 } else { q };
                factors.push((nq, axis));
            }
        }
        out.add_term(
            PauliWord::new(factors).expect("relabelling is injective"),
            coeff,
        );
    }
    Ok(out.compress(0.0))
}

/// Qubit bitstring of the Hartree-Fock determinant under `cfg`: the lowest
/// α and β orbitals filled (N_α − N_β = `cfg.spin`), reordered and encoded
/// like the Hamiltonian. Character `i` is qubit `i`.
pub fn hartree_fock_bitstring(
    n_electrons: usize,
    cfg: &MappingConfig,
) -> Result<String, MappingError> {
    let n = cfg.n_spinorbitals;
    let (ne, spin) = (n_electrons as i64, cfg.spin);
    if (ne + spin) % 2 != 0 || spin.abs() > ne || n_electrons > n {
        return Err(MappingError::InvalidConfig(alloc::format!(
            "{n_electrons} electrons with spin {spin} do not fit {n} spin-orbitals"
        )));
    }
    let (n_alpha, n_beta) = (((ne + spin) / 2) as usize, ((ne - spin) / 2) as usize);
    if n_alpha.max(n_beta) > n / 2 + n % 2 {
        return Err(MappingError::InvalidConfig(
            "too many electrons of one spin".into(),
        ));
    }
    let mut occ = vec![false; n];
    for p in 0..n {
        let filled = if p % 2 == 0 {
            p / 2 < n_alpha
        } else {
            p / 2 < n_beta
        };
        let idx = if cfg.up_then_down {
            up_then_down_index(p, n)
        } else {
            p
        };
        occ[idx] = filled;
    }
    let encoding = match cfg.mapping {
        Mapping::JW => Encoding::JordanWigner,
        Mapping::BK => Encoding::BravyiKitaev,
        Mapping::ScBK => Encoding::Parity,
    };
    let beta = encoding.matrix(n);
    let bits: Vec<bool> = (0..n)
        .map(|j| (0..n).filter(|&k| beta[j][k] && occ[k]).count() % 2 == 1)
        .collect();
    let kept = bits
        .iter()
        .enumerate()
        .filter(|(j, _)| cfg.mapping != Mapping::ScBK || (*j != n / 2 - 1 && *j != n - 1));
    Ok(kept.map(|(_, &b)| if b { '1' } else { '0' }).collect())
}

/// Dispatches on `cfg.mapping`, reordering spin-orbitals first when
/// `cfg.up_then_down` is set.
pub fn fermion_to_qubit_mapping(
    f: &FermionOperator,
    cfg: &MappingConfig,
) -> Result<QubitOperator, MappingError> {
    let n = cfg.n_spinorbitals;
    f.check_indices(n)?;
    let reordered;
    let f = if cfg.up_then_down {
        if n % 2 == 1 {
            return Err(MappingError::InvalidConfig(
                "up_then_down needs an even number of spin-orbitals".into(),
            ));
        }
        reordered = f.relabeled(|p| up_then_down_index(p, n));
        &reordered
    } else {
        f
    };
    match cfg.mapping {
        Mapping::JW => jordan_wigner(f, n),
        Mapping::BK => bravyi_kitaev(f, n),
        Mapping::ScBK => scbk(f, cfg),
    }
}
