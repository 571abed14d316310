//! Dense and Krylov eigen-solvers for small qubit operators.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::operator::{PauliWord, QubitOperator};
use crate::rng;

/// Largest register handled by [`exact_ground_energy`].
pub const MAX_EXACT_QUBITS: usize = 12;
/// Largest register for which a full dense spectrum is computed.
pub const MAX_DENSE_QUBITS: usize = 10;
const DENSE_GROUND_CUTOFF: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("operator is not Hermitian (coefficient of [{word}] has imaginary part {imag:e})")]
    NotHermitian { word: PauliWord, imag: f64 },
    #[error("{requested} qubits exceeds the limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("operator acts on {needed} qubits but only {given} were requested")]
    WidthTooSmall { needed: usize, given: usize },
    #[error("eigen-solver did not converge")]
    NoConvergence,
    #[error("empty subspace")]
    EmptySubspace,
}

/// Phase and flipped index of `P|b>`: P|b> = phase |b ^ x>.
#[inline]
pub fn pauli_action(x: u64, z: u64, n_y: u32, b: u64) -> (Complex64, u64) {
    let mut phase = match n_y % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    if (b & z).count_ones() % 2 == 1 {
        phase = -phase;
    }
    (phase, b ^ x)
}

/// Precomputed masks for fast application of an operator to amplitude vectors.
#[derive(Debug, Clone)]
pub struct CompiledOperator {
    terms: Vec<(u64, u64, u32, Complex64)>,
}

impl CompiledOperator {
    pub fn new(op: &QubitOperator) -> CompiledOperator {
        let terms = op
            .iter()
            .map(|(w, c)| {
                let (x, z) = w.masks();
                (x, z, w.count(crate::operator::Pauli::Y) as u32, *c)
            })
            .collect();
        CompiledOperator { terms }
    }

    /// `out = op * amps`.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for &(x, z, ny, c) in &self.terms {
            for (b, a) in amps.iter().enumerate() {
                if *a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (phase, nb) = pauli_action(x, z, ny, b as u64);
                out[nb as usize] += c * phase * a;
            }
        }
        out
    }

    /// `<amps| op |amps>`.
    pub fn expectation(&self, amps: &[Complex64]) -> Complex64 {
        let applied = self.apply(amps);
        amps.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum()
    }
}

pub fn apply_operator(op: &QubitOperator, amps: &[Complex64]) -> Vec<Complex64> {
    CompiledOperator::new(op).apply(amps)
}

fn check_hermitian(op: &QubitOperator) -> Result<(), LinalgError> {
    for (w, c) in op.iter() {
        if libm::fabs(c.im) > 1e-10 {
            return Err(LinalgError::NotHermitian {
                word: w.clone(),
                imag: c.im,
            });
        }
    }
    Ok(())
}

fn resolve_width(op: &QubitOperator, n_qubits: usize, limit: usize) -> Result<usize, LinalgError> {
    let needed = op.n_qubits();
    if needed > n_qubits {
        return Err(LinalgError::WidthTooSmall {
            needed,
            given: n_qubits,
        });
    }
    if n_qubits > limit {
        return Err(LinalgError::TooManyQubits {
            requested: n_qubits,
            limit,
        });
    }
    Ok(n_qubits)
}

/// Dense `2^n x 2^n` matrix, row index = output basis state.
pub fn to_dense(op: &QubitOperator, n_qubits: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    let compiled = CompiledOperator::new(op);
    for &(x, z, ny, c) in &compiled.terms {
        for b in 0..dim {
            let (phase, nb) = pauli_action(x, z, ny, b as u64);
            m[(nb as usize, b)] += c * phase;
        }
    }
    m
}

fn dense_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Sorted eigenvalues of a Hermitian operator on `n_qubits` qubits.
pub fn spectrum(op: &QubitOperator, n_qubits: usize) -> Result<Vec<f64>, LinalgError> {
    check_hermitian(op)?;
    let n = resolve_width(op, n_qubits, MAX_DENSE_QUBITS)?;
    Ok(dense_eigenvalues(to_dense(op, n)))
}

/// Lowest eigenvalue of a Hermitian operator. Dense diagonalisation up to 8
/// qubits, Lanczos with full reorthogonalisation beyond.
pub fn exact_ground_energy(op: &QubitOperator, n_qubits: usize) -> Result<f64, LinalgError> {
    check_hermitian(op)?;
    let n = resolve_width(op, n_qubits.max(op.n_qubits()), MAX_EXACT_QUBITS)?;
    if n <= DENSE_GROUND_CUTOFF {
        return Ok(dense_eigenvalues(to_dense(op, n))[0]);
    }
    lanczos_ground(&CompiledOperator::new(op), 1usize << n)
}

/// Lowest eigenvalue of `op` restricted to the basis states selected by `keep`.
/// Equals the sector minimum when `op` leaves that subspace invariant.
pub fn restricted_ground_energy(
    op: &QubitOperator,
    n_qubits: usize,
    keep: impl Fn(usize) -> bool,
) -> Result<f64, LinalgError> {
    check_hermitian(op)?;
    let n = resolve_width(op, n_qubits, MAX_DENSE_QUBITS)?;
    let full = to_dense(op, n);
    let basis: Vec<usize> = (0..(1usize << n)).filter(|&b| keep(b)).collect();
    if basis.is_empty() {
        return Err(LinalgError::EmptySubspace);
    }
    let sub = DMatrix::from_fn(basis.len(), basis.len(), |i, j| full[(basis[i], basis[j])]);
    Ok(dense_eigenvalues(sub)[0])
}

fn lanczos_ground(op: &CompiledOperator, dim: usize) -> Result<f64, LinalgError> {
    let mut rng = rng::seeded(0x1a2b_3c4d);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng::unit_f64(&mut rng) - 0.5, rng::unit_f64(&mut rng) - 0.5))
        .collect();
    normalize(&mut v);

    let max_iter = dim.min(400);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = f64::INFINITY;

    for k in 0..max_iter {
        let mut w = op.apply(&v);
        let a: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        alpha.push(a);
        basis.push(v.clone());
        // full reorthogonalisation, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let overlap: Complex64 = q.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= overlap * qi;
                }
            }
        }
        let b = norm(&w);

        let (theta, resid) = tridiagonal_lowest(&alpha, &beta, b);
        if resid < 1e-11 || b < 1e-12 || k + 1 == max_iter {
            return Ok(theta);
        }
        if libm::fabs(theta - last) < 1e-14 && resid < 1e-8 {
            return Ok(theta);
        }
        last = theta;
        beta.push(b);
        for x in &mut w {
            *x /= b;
        }
        v = w;
    }
    Err(LinalgError::NoConvergence)
}

/// Lowest Ritz value of the Lanczos tridiagonal matrix and its residual bound.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64], next_beta: f64) -> (f64, f64) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (idx, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let last_component = eig.eigenvectors[(k - 1, idx)];
    (theta, libm::fabs(next_beta * last_component))
}

fn norm(v: &[Complex64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum())
}

fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Hermitian matrix eigen-decomposition helper used by purification tests.
pub fn hermitian_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().symmetric_eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        PauliWord::parse(s).unwrap()
    }

    #[test]
    fn analytic_ground_energies() {
        let z = QubitOperator::term(w("Z0"), 1.0);
        assert!((exact_ground_energy(&z, 1).unwrap() + 1.0).abs() < 1e-14);
        let op = QubitOperator::from_terms([(w("X0"), 0.5), (w("Z0"), 0.5)]);
        let e = exact_ground_energy(&op, 1).unwrap();
        assert!((e + core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_wide() {
        let op = QubitOperator::term(w("X0"), Complex64::new(1.0, 1e-6));
        assert!(matches!(
            exact_ground_energy(&op, 1),
            Err(LinalgError::NotHermitian { .. })
        ));
        let op = QubitOperator::term(w("Z12"), 1.0);
        assert!(matches!(
            exact_ground_energy(&op, 13),
            Err(LinalgError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn lanczos_matches_dense() {
        // transverse-field Ising chain on 9 qubits
        let n = 9;
        let mut op = QubitOperator::zero();
        for i in 0..n {
            op.add_term(PauliWord::single(i, crate::operator::Pauli::X), 0.7);
            if i + 1 < n {
                op.add_term(w(&alloc::format!("Z{} Z{}", i, i + 1)), -1.0);
            }
        }
        let dense = dense_eigenvalues(to_dense(&op, n))[0];
        let lz = exact_ground_energy(&op, n).unwrap();
        assert!((dense - lz).abs() < 1e-10, "{dense} vs {lz}");
    }

    #[test]
    fn restricted_sector() {
        // Z0 + Z1 restricted to one excitation has a doubly degenerate 0
        let op = QubitOperator::from_terms([(w("Z0"), 1.0), (w("Z1"), 1.0)]);
        let e = restricted_ground_energy(&op, 2, |b| b.count_ones() == 1).unwrap();
        assert!(e.abs() < 1e-14);
    }
}
