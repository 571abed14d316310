//! Zero-noise extrapolation utilities.

use alloc::vec::Vec;

use super::PostprocessError;
use crate::circuit::Circuit;

/// Value at noise scale 0 of the polynomial through `(scale, value)` points.
pub fn richardson_extrapolate(points: &[(f64, f64)]) -> Result<f64, PostprocessError> {
    if points.is_empty() {
        return Err(PostprocessError::Invalid("no points to extrapolate".into()));
    }
    let mut total = 0.0;
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if xi == xj {
                return Err(PostprocessError::Invalid(alloc::format!(
                    "repeated noise scale {xi}"
                )));
            }
            w *= xj / (xj - xi);
        }
        total += w * yi;
    }
    Ok(total)
}

/// Replaces every gate G with G (G† G)^k for an odd `scale` = 2k + 1.
pub fn fold_gates(circuit: &Circuit, scale: usize) -> Result<Circuit, PostprocessError> {
    if scale.is_multiple_of(2) {
        return Err(PostprocessError::Invalid(alloc::format!(
            "fold scale must be odd, got {scale}"
        )));
    }
    let mut gates = Vec::with_capacity(circuit.size() * scale);
    for g in circuit.gates() {
        let inv = g.inverse()?;
        gates.push(g.clone());
        for _ in 0..scale / 2 {
            gates.push(inv.clone());
            gates.push(g.clone());
        }
    }
    let mut out = Circuit::new(gates);
    out.set_declared_width(circuit.declared_width());
    Ok(out)
}
