//! McWeeny purification of a two-electron 2-RDM.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::rdm::RdmPair;
use super::PostprocessError;

pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Purified<T> {
    pub value: T,
    pub iterations: usize,
    /// ‖D² − D‖_max before the first step and after every step.
    pub residuals: Vec<f64>,
}

fn residual(d: &DMatrix<f64>) -> f64 {
    (d * d - d).amax()
}

/// Iterates D ← 3D² − 2D³ until ‖D² − D‖_max < conv.
pub fn mcweeny_purify_matrix(
    d: &DMatrix<f64>,
    conv: f64,
) -> Result<Purified<DMatrix<f64>>, PostprocessError> {
    if !d.is_square() {
        return Err(PostprocessError::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    let mut d = d.clone();
    let mut residuals = Vec::new();
    residuals.push(residual(&d));
    let mut iterations = 0;
    while residuals[iterations] >= conv {
        if iterations == MAX_ITERATIONS {
            return Err(PostprocessError::NoConvergence {
                iterations,
                residual: residuals[iterations],
            });
        }
        let d2 = &d * &d;
        let next = &d2 * 3.0 - &d * &d2 * 2.0;
        d = (&next + next.transpose()) * 0.5;
        iterations += 1;
        residuals.push(residual(&d));
    }
    Ok(Purified {
        value: d,
        iterations,
        residuals,
    })
}

/// Purifies the 2-RDM of a two-electron state. The tensor is matricized with
/// row (p, q) and column (r, s), divided by N(N−1) = 2, purified and scaled
/// back; the 1-RDM is the contraction `one[p][r] = Σ_q two[p][q][r][q] / (N−1)`.
pub fn mcweeny_purify_2rdm(
    rdm: &RdmPair,
    conv: f64,
) -> Result<Purified<RdmPair>, PostprocessError> {
    match rdm.n_electrons {
        Some(2) => {}
        Some(n) => return Err(PostprocessError::ElectronCount(n)),
        None => {
            return Err(PostprocessError::Invalid(
                "RDM carries no electron count".into(),
            ))
        }
    }
    let n = rdm.n_orbitals;
    let m = n * n;
    let d = DMatrix::from_row_slice(m, m, &rdm.two) * 0.5;
    let p = mcweeny_purify_matrix(&d, conv)?;
    let mut out = RdmPair::zeros(n);
    out.n_electrons = Some(2);
    for row in 0..m {
        for col in 0..m {
            out.two[row * m + col] = 2.0 * p.value[(row, col)];
        }
    }
    for a in 0..n {
        for b in 0..n {
            let v: f64 = (0..n).map(|q| out.two(a, q, b, q)).sum();
            out.set_one(a, b, v);
        }
    }
    Ok(Purified {
        value: out,
        iterations: p.iterations,
        residuals: p.residuals,
    })
}
