#![allow(dead_code)]

use fermiforge_core::num_complex::Complex64;
use fermiforge_core::{FermionOperator, PauliWord, QubitOperator};

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

/// Splits `(<re>,<im>) [body]` into the coefficient and the bracket body.
fn split_line(line: &str) -> Option<(Complex64, &str)> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return None;
    }
    let close = line.find(')').unwrap();
    let (re, im) = line[1..close].split_once(',').unwrap();
    let body = line[close + 1..]
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']');
    Some((
        Complex64::new(re.trim().parse().unwrap(), im.trim().parse().unwrap()),
        body,
    ))
}

pub fn read_fermion(name: &str) -> FermionOperator {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    let mut op = FermionOperator::zero();
    for (c, body) in text.lines().filter_map(split_line) {
        op.add_term(FermionOperator::parse_sequence(body).unwrap(), c);
    }
    op
}

pub fn read_qubit(name: &str) -> QubitOperator {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    let mut op = QubitOperator::zero();
    for (c, body) in text.lines().filter_map(split_line) {
        op.add_term(PauliWord::parse(body).unwrap(), c);
    }
    op
}

pub const H2_FCI: f64 = -1.137270174660903;

pub mod dense {
    //! Dense-matrix reference implementations built from Kronecker products
    //! and textbook gate definitions. Qubit `k` is bit `k` of the basis index.

    use fermiforge_core::num_complex::Complex64;
    use fermiforge_core::{Gate, Pauli, PauliWord, QubitOperator};
    use nalgebra::{DMatrix, DVector};

    pub type M = DMatrix<Complex64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn pauli(p: Option<Pauli>) -> M {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        match p {
            None => M::from_row_slice(2, 2, &[o, z, z, o]),
            Some(Pauli::X) => M::from_row_slice(2, 2, &[z, o, o, z]),
            Some(Pauli::Y) => M::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
            Some(Pauli::Z) => M::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    /// `ops[k]` acts on qubit k; the full matrix is ops[n-1] ⊗ ... ⊗ ops[0].
    pub fn kron_all(ops: &[M]) -> M {
        let mut out = M::identity(1, 1);
        for m in ops.iter().rev() {
            out = out.kronecker(m);
        }
        out
    }

    pub fn word(w: &PauliWord, n: usize) -> M {
        let ops: Vec<M> = (0..n).map(|q| pauli(w.axis(q))).collect();
        kron_all(&ops)
    }

    pub fn operator(op: &QubitOperator, n: usize) -> M {
        let dim = 1 << n;
        let mut out = M::zeros(dim, dim);
        for (w, coeff) in op.iter() {
            out += word(w, n) * *coeff;
        }
        out
    }

    /// exp(-i θ P / 2) = cos(θ/2) I − i sin(θ/2) P for a Pauli product P.
    pub fn pauli_rotation(p: &M, theta: f64) -> M {
        let id = M::identity(p.nrows(), p.ncols());
        id * c((theta / 2.0).cos(), 0.0) - p * c(0.0, (theta / 2.0).sin())
    }

    fn base_matrix(name: &str, theta: f64) -> M {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let phase = |t: f64| M::from_row_slice(2, 2, &[o, z, z, Complex64::from_polar(1.0, t)]);
        match name {
            "H" => (pauli(Some(Pauli::X)) + pauli(Some(Pauli::Z))) * c(h, 0.0),
            "X" => pauli(Some(Pauli::X)),
            "Y" => pauli(Some(Pauli::Y)),
            "Z" => pauli(Some(Pauli::Z)),
            "S" => phase(std::f64::consts::FRAC_PI_2),
            "SDAG" => phase(-std::f64::consts::FRAC_PI_2),
            "T" => phase(std::f64::consts::FRAC_PI_4),
            "TDAG" => phase(-std::f64::consts::FRAC_PI_4),
            "PHASE" => phase(theta),
            "RX" => pauli_rotation(&pauli(Some(Pauli::X)), theta),
            "RY" => pauli_rotation(&pauli(Some(Pauli::Y)), theta),
            "RZ" => pauli_rotation(&pauli(Some(Pauli::Z)), theta),
            other => panic!("oracle has no matrix for {other}"),
        }
    }

    /// Full 2^n unitary of a gate, built column by column.
    pub fn gate(g: &Gate, n: usize) -> M {
        let name = g.name();
        let theta = g.parameter_value().unwrap().unwrap_or(0.0);
        let dim = 1usize << n;
        let mut out = M::zeros(dim, dim);
        let base = match name {
            "CNOT" | "CX" => "X",
            "CY" => "Y",
            "CZ" => "Z",
            "CRX" => "RX",
            "CRY" => "RY",
            "CRZ" => "RZ",
            "CPHASE" => "PHASE",
            "CSWAP" => "SWAP",
            other => other,
        };
        let controls: Vec<usize> = g.controls().to_vec();
        for b in 0..dim {
            let active = controls.iter().all(|&q| b >> q & 1 == 1);
            if !active || base == "MEASURE" {
                out[(b, b)] = c(1.0, 0.0);
                continue;
            }
            if base == "SWAP" {
                let (p, q) = (g.targets()[0], g.targets()[1]);
                let bp = b >> p & 1;
                let bq = b >> q & 1;
                let nb = (b & !(1 << p) & !(1 << q)) | (bq << p) | (bp << q);
                out[(nb, b)] = c(1.0, 0.0);
                continue;
            }
            let t = g.targets()[0];
            let m = base_matrix(base, theta);
            let bit = b >> t & 1;
            for out_bit in 0..2 {
                let nb = (b & !(1 << t)) | (out_bit << t);
                out[(nb, b)] += m[(out_bit, bit)];
            }
        }
        out
    }

    pub fn circuit_state(gates: &[Gate], n: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(1 << n);
        v[0] = c(1.0, 0.0);
        for g in gates {
            v = gate(g, n) * v;
        }
        v
    }

    /// Hermitian eigenvalues, ascending.
    pub fn eigenvalues(m: &M) -> Vec<f64> {
        let mut e: Vec<f64> = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Fock-space matrix of a†_p / a_p on n modes with the standard sign
    /// (−1)^(number of occupied modes below p). Mode k is bit k.
    pub fn ladder(p: usize, creation: bool, n: usize) -> M {
        let dim = 1usize << n;
        let mut out = M::zeros(dim, dim);
        for b in 0..dim {
            let occupied = b >> p & 1 == 1;
            if occupied == creation {
                continue;
            }
            let sign = if (b & ((1 << p) - 1)).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out[(b ^ (1 << p), b)] = c(sign, 0.0);
        }
        out
    }

    pub fn fermion(op: &fermiforge_core::FermionOperator, n: usize) -> M {
        let dim = 1usize << n;
        let mut out = M::zeros(dim, dim);
        for (ops, coeff) in op.iter() {
            let mut m = M::identity(dim, dim);
            for l in ops {
                m *= ladder(l.index, l.creation, n);
            }
            out += m * *coeff;
        }
        out
    }
}

/// The nine-term two-qubit operator used for measurement-grouping examples.
pub fn grouping_operator() -> QubitOperator {
    let mut op = QubitOperator::zero();
    for s in ["X0 X1", "X0", "X0 Z1", "Z1", "Z0", "Z0 X1", "X1", "Z0 Z1"] {
        op.add_term(PauliWord::parse(s).unwrap(), 0.25);
    }
    op.add_term(PauliWord::parse("Y0 Y1").unwrap(), -0.25);
    op
}

/// Minimum number of pairwise qubit-wise-compatible groups covering `words`,
/// by exhaustive search.
pub fn min_clique_cover(words: &[PauliWord]) -> usize {
    fn place(i: usize, words: &[PauliWord], groups: &mut Vec<Vec<usize>>, best: &mut usize) {
        if groups.len() >= *best {
            return;
        }
        if i == words.len() {
            *best = groups.len();
            return;
        }
        for g in 0..groups.len() {
            if groups[g]
                .iter()
                .all(|&j| words[j].qwc_compatible(&words[i]))
            {
                groups[g].push(i);
                place(i + 1, words, groups, best);
                groups[g].pop();
            }
        }
        groups.push(vec![i]);
        place(i + 1, words, groups, best);
        groups.pop();
    }
    let mut best = words.len().max(1);
    if words.is_empty() {
        return 0;
    }
    place(0, words, &mut Vec::new(), &mut best);
    best
}
