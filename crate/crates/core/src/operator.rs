//! Sparse Pauli and fermionic operator algebra.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Product `self * other` as (phase, result); `None` stands for identity.
    pub fn product(self, other: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => (ONE, None),
            (X, Y) => (I, Some(Z)),
            (Y, X) => (-I, Some(Z)),
            (Y, Z) => (I, Some(X)),
            (Z, Y) => (-I, Some(X)),
            (Z, X) => (I, Some(Y)),
            (X, Z) => (-I, Some(Y)),
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("qubit {0} appears twice in a Pauli word")]
    DuplicateQubit(usize),
    #[error("spin-orbital index {index} out of range for {n} spin-orbitals")]
    IndexOutOfRange { index: usize, n: usize },
}

/// Tensor product of single-qubit Paulis, kept sorted by qubit. Empty = identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PauliWord(Vec<(usize, Pauli)>);

impl PauliWord {
    pub fn identity() -> PauliWord {
        PauliWord(Vec::new())
    }

    /// Sorts the factors; fails if a qubit is repeated.
    pub fn new(mut factors: Vec<(usize, Pauli)>) -> Result<PauliWord, OperatorError> {
        factors.sort();
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(OperatorError::DuplicateQubit(w[0].0));
            }
        }
        Ok(PauliWord(factors))
    }

    /// Parses compact strings like `"X0 Z1"` or `"X0Z1"`. Empty string is identity.
    pub fn parse(s: &str) -> Result<PauliWord, String> {
        let mut factors = Vec::new();
        let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            let axis = Pauli::from_char(c).ok_or_else(|| alloc::format!("bad Pauli axis '{c}'"))?;
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let q: usize = digits
                .parse()
                .map_err(|_| alloc::format!("missing qubit index after '{c}'"))?;
            factors.push((q, axis));
        }
        PauliWord::new(factors).map_err(|e| alloc::format!("{e}"))
    }

    pub fn single(qubit: usize, axis: Pauli) -> PauliWord {
        PauliWord(alloc::vec![(qubit, axis)])
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn axis(&self, qubit: usize) -> Option<Pauli> {
        self.0
            .binary_search_by_key(&qubit, |f| f.0)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter().map(|f| f.0).collect()
    }

    /// Qubits needed to hold this word (highest index + 1).
    pub fn width(&self) -> usize {
        self.0.last().map_or(0, |f| f.0 + 1)
    }

    pub fn count(&self, axis: Pauli) -> usize {
        self.0.iter().filter(|f| f.1 == axis).count()
    }

    /// Bit masks (x, z) with Y contributing to both.
    pub fn masks(&self) -> (u64, u64) {
        let (mut x, mut z) = (0u64, 0u64);
        for &(q, a) in &self.0 {
            match a {
                Pauli::X => x |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                Pauli::Z => z |= 1 << q,
            }
        }
        (x, z)
    }

    /// Product of two words with its phase.
    pub fn multiply(&self, other: &PauliWord) -> (Complex64, PauliWord) {
        let mut phase = ONE;
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a.0 == b.0 => {
                    let (p, r) = a.1.product(b.1);
                    phase *= p;
                    if let Some(r) = r {
                        out.push((a.0, r));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a.0 < b.0 => {
                    out.push(a);
                    i += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (_, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (phase, PauliWord(out))
    }

    /// True when the two words commute as operators.
    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        let mut anti = 0;
        for &(q, a) in &self.0 {
            if let Some(b) = other.axis(q) {
                if a != b {
                    anti += 1;
                }
            }
        }
        anti % 2 == 0
    }

    /// Qubit-wise commutativity: on every shared qubit both words use the same axis.
    pub fn qwc_compatible(&self, other: &PauliWord) -> bool {
        self.0
            .iter()
            .all(|&(q, a)| other.axis(q).is_none_or(|b| a == b))
    }

    /// Relabels qubits; the map must be injective on the support.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> PauliWord {
        let mut f: Vec<_> = self.0.iter().map(|&(q, a)| (map(q), a)).collect();
        f.sort();
        PauliWord(f)
    }
}

pub fn qwc_compatible(a: &PauliWord, b: &PauliWord) -> bool {
    a.qwc_compatible(b)
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(q, a)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", a.as_char(), q)?;
        }
        Ok(())
    }
}

// serialized as the compact string form, e.g. "X0 Z1"
impl Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<PauliWord, D::Error> {
        let s = String::deserialize(d)?;
        PauliWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Linear combination of Pauli words with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QubitOperator {
    terms: BTreeMap<PauliWord, Complex64>,
}

impl QubitOperator {
    pub fn zero() -> QubitOperator {
        QubitOperator::default()
    }

    pub fn identity(c: impl Into<Complex64>) -> QubitOperator {
        QubitOperator::term(PauliWord::identity(), c)
    }

    pub fn term(word: PauliWord, c: impl Into<Complex64>) -> QubitOperator {
        let mut op = QubitOperator::zero();
        op.add_term(word, c);
        op
    }

    pub fn from_terms<I, C>(terms: I) -> QubitOperator
    where
        I: IntoIterator<Item = (PauliWord, C)>,
        C: Into<Complex64>,
    {
        let mut op = QubitOperator::zero();
        for (w, c) in terms {
            op.add_term(w, c);
        }
        op
    }

    /// Adds `c` to the coefficient of `word`.
    pub fn add_term(&mut self, word: PauliWord, c: impl Into<Complex64>) {
        *self.terms.entry(word).or_insert(ZERO) += c.into();
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> &BTreeMap<PauliWord, Complex64> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Qubits touched by any term (highest index + 1).
    pub fn n_qubits(&self) -> usize {
        self.terms.keys().map(PauliWord::width).max().unwrap_or(0)
    }

    pub fn constant(&self) -> Complex64 {
        self.coefficient(&PauliWord::identity())
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> QubitOperator {
        let c = c.into();
        QubitOperator {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// Full product with phase tracking; exactly-zero results are dropped.
    pub fn multiply(&self, other: &QubitOperator) -> QubitOperator {
        let mut out = QubitOperator::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (phase, w) = wa.multiply(wb);
                out.add_term(w, phase * ca * cb);
            }
        }
        out.compress(0.0)
    }

    pub fn commutator(&self, other: &QubitOperator) -> QubitOperator {
        let mut out = QubitOperator::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                if !wa.commutes_with(wb) {
                    // anticommuting words: ab - ba = 2ab
                    let (phase, w) = wa.multiply(wb);
                    out.add_term(w, phase * ca * cb * 2.0);
                }
            }
        }
        out.compress(0.0)
    }

    /// Drops terms with |c| < eps and zeroes real or imaginary parts below eps.
    /// With eps = 0 only exact zeros are removed.
    pub fn compress(&self, eps: f64) -> QubitOperator {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            let mut c = *c;
            if eps > 0.0 {
                if libm::fabs(c.im) < eps {
                    c.im = 0.0;
                }
                if libm::fabs(c.re) < eps {
                    c.re = 0.0;
                }
            }
            let keep = if eps > 0.0 {
                c.norm() >= eps
            } else {
                c != ZERO
            };
            if keep {
                terms.insert(w.clone(), c);
            }
        }
        QubitOperator { terms }
    }

    pub fn dagger(&self) -> QubitOperator {
        QubitOperator {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.conj()))
                .collect(),
        }
    }

    /// All coefficients real within `tol` (Pauli words are Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| libm::fabs(c.im) <= tol)
    }

    /// Sum of |c| over non-identity terms.
    pub fn one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(w, _)| !w.is_identity())
            .map(|(_, c)| c.norm())
            .sum()
    }

    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> QubitOperator {
        let mut out = QubitOperator::zero();
        for (w, c) in &self.terms {
            out.add_term(w.remapped(&map), *c);
        }
        out
    }
}

pub fn multiply(a: &QubitOperator, b: &QubitOperator) -> QubitOperator {
    a.multiply(b)
}

pub fn commutator(a: &QubitOperator, b: &QubitOperator) -> QubitOperator {
    a.commutator(b)
}

pub fn compress(op: &QubitOperator, eps: f64) -> QubitOperator {
    op.compress(eps)
}

impl Add for &QubitOperator {
    type Output = QubitOperator;
    fn add(self, rhs: &QubitOperator) -> QubitOperator {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }
}

impl Add for QubitOperator {
    type Output = QubitOperator;
    fn add(self, rhs: QubitOperator) -> QubitOperator {
        &self + &rhs
    }
}

impl Neg for &QubitOperator {
    type Output = QubitOperator;
    fn neg(self) -> QubitOperator {
        self.scale(-1.0)
    }
}

impl Sub for &QubitOperator {
    type Output = QubitOperator;
    fn sub(self, rhs: &QubitOperator) -> QubitOperator {
        self + &(-rhs)
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: &QubitOperator) -> QubitOperator {
        self.multiply(rhs)
    }
}

fn fmt_coeff(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    write!(f, "({:?},{:?})", c.re, c.im)
}

/// One term per line: `(re,im) [X0 Z1]`.
impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, c) in &self.terms {
            fmt_coeff(f, *c)?;
            writeln!(f, " [{w}]")?;
        }
        Ok(())
    }
}

/// Creation (`a†_p`) or annihilation (`a_p`) operator on spin-orbital `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ladder {
    pub index: usize,
    pub creation: bool,
}

impl Ladder {
    pub fn create(index: usize) -> Ladder {
        Ladder {
            index,
            creation: true,
        }
    }

    pub fn annihilate(index: usize) -> Ladder {
        Ladder {
            index,
            creation: false,
        }
    }

    pub fn dagger(self) -> Ladder {
        Ladder {
            index: self.index,
            creation: !self.creation,
        }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.creation {
            write!(f, "{}^", self.index)
        } else {
            write!(f, "{}", self.index)
        }
    }
}

/// Container of ladder-operator products. Sequences are stored exactly as
/// given; no normal ordering is applied.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<Ladder>, Complex64>,
}

impl FermionOperator {
    pub fn zero() -> FermionOperator {
        FermionOperator::default()
    }

    pub fn term(ops: Vec<Ladder>, c: impl Into<Complex64>) -> FermionOperator {
        let mut f = FermionOperator::zero();
        f.add_term(ops, c);
        f
    }

    /// Parses `"0^ 1"` style sequences; empty string is the constant term.
    pub fn parse_sequence(s: &str) -> Result<Vec<Ladder>, String> {
        s.split_whitespace()
            .map(|tok| {
                let (num, creation) = match tok.strip_suffix('^') {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                num.parse::<usize>()
                    .map(|index| Ladder { index, creation })
                    .map_err(|_| alloc::format!("bad ladder operator '{tok}'"))
            })
            .collect()
    }

    pub fn add_term(&mut self, ops: Vec<Ladder>, c: impl Into<Complex64>) {
        *self.terms.entry(ops).or_insert(ZERO) += c.into();
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Ladder>, Complex64> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Ladder>, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of spin-orbitals touched (highest index + 1).
    pub fn n_modes(&self) -> usize {
        self.terms
            .keys()
            .flatten()
            .map(|l| l.index + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> FermionOperator {
        let c = c.into();
        FermionOperator {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn dagger(&self) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (ops, c) in &self.terms {
            out.add_term(ops.iter().rev().map(|l| l.dagger()).collect(), c.conj());
        }
        out
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> FermionOperator {
        let mut out = self.scale(0.5);
        for (ops, c) in &self.dagger().terms {
            out.add_term(ops.clone(), c * 0.5);
        }
        out
    }

    pub fn check_indices(&self, n: usize) -> Result<(), OperatorError> {
        match self.terms.keys().flatten().find(|l| l.index >= n) {
            Some(l) => Err(OperatorError::IndexOutOfRange { index: l.index, n }),
            None => Ok(()),
        }
    }

    /// Applies a permutation of spin-orbital labels.
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (ops, c) in &self.terms {
            out.add_term(
                ops.iter()
                    .map(|l| Ladder {
                        index: map(l.index),
                        creation: l.creation,
                    })
                    .collect(),
                *c,
            );
        }
        out
    }
}

impl Add for &FermionOperator {
    type Output = FermionOperator;
    fn add(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }
}

/// One term per line: `(re,im) [0^ 1]`.
impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ops, c) in &self.terms {
            fmt_coeff(f, *c)?;
            f.write_str(" [")?;
            for (i, l) in ops.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{l}")?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
