"""Generate the bundled H2 / STO-3G fixtures.

Writes, under data/:
  h2_sto3g_fermion.txt  second-quantized Hamiltonian, interleaved spin-orbitals
                        (0 = 0a, 1 = 0b, 2 = 1a, 3 = 1b)
  h2_sto3g_jw.txt       Jordan-Wigner image, computed here from dense matrices
                        (independent of the Rust mapping code)
  h2_sto3g.json         metadata: FCI / HF energies from pyscf

Requires pyscf and numpy. Run from the repository root:
    python3 scripts/gen_h2_fixture.py
"""
import itertools
import json

import numpy as np
from pyscf import ao2mo, fci, gto, scf

BOND = 0.7414

mol = gto.M(atom=f"H 0 0 0; H 0 0 {BOND}", basis="sto-3g", unit="Angstrom")
mf = scf.RHF(mol)
mf.conv_tol = 1e-12
e_hf = mf.kernel()
c = mf.mo_coeff
h1 = c.T @ mf.get_hcore() @ c
eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])  # (pq|rs), chemist's notation
e_nuc = mol.energy_nuc()
e_fci = fci.FCI(mf).kernel()[0]

norb = h1.shape[0]
nso = 2 * norb

terms = {(): e_nuc}
for p, q in itertools.product(range(norb), repeat=2):
    for s in range(2):
        key = ((2 * p + s, 1), (2 * q + s, 0))
        if abs(h1[p, q]) > 1e-14:
            terms[key] = terms.get(key, 0.0) + h1[p, q]
for p, q, r, t in itertools.product(range(norb), repeat=4):
    v = eri[p, q, r, t]
    if abs(v) < 1e-14:
        continue
    for s1 in range(2):
        for s2 in range(2):
            a, b, cc, d = 2 * p + s1, 2 * q + s1, 2 * r + s2, 2 * t + s2
            if a == cc or b == d:
                continue
            # 1/2 (pq|rs) a+_p a+_r a_s a_q
            key = ((a, 1), (cc, 1), (d, 0), (b, 0))
            terms[key] = terms.get(key, 0.0) + 0.5 * v


def fmt_term(key):
    return " ".join(f"{i}^" if d else f"{i}" for i, d in key)


with open("data/h2_sto3g_fermion.txt", "w") as f:
    f.write("# H2 STO-3G, R = %.4f A, interleaved spin-orbitals, generated by scripts/gen_h2_fixture.py\n" % BOND)
    for key, v in terms.items():
        f.write(f"({float(v)!r},0) [{fmt_term(key)}]\n")

# Dense Jordan-Wigner oracle: a_p = Z..Z (X + iY)/2 on qubit p, qubit k = bit k.
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1| : annihilation


def kron_qubits(ops):
    # ops[k] acts on qubit k; basis index bit k = qubit k -> qubit 0 is least significant
    m = np.array([[1.0]], dtype=complex)
    for op in ops:
        m = np.kron(op, m)
    return m


def annihilator(p):
    return kron_qubits([Z] * p + [lower] + [I2] * (nso - p - 1))


ann = [annihilator(p) for p in range(nso)]
H = np.zeros((2**nso, 2**nso), dtype=complex)
for key, v in terms.items():
    m = np.eye(2**nso, dtype=complex)
    for i, dag in key:
        m = m @ (ann[i].conj().T if dag else ann[i])
    H += v * m

paulis = {"I": I2, "X": X, "Y": Y, "Z": Z}
lines = []
for word in itertools.product("IXYZ", repeat=nso):
    mat = kron_qubits([paulis[w] for w in word])
    coeff = np.trace(mat.conj().T @ H) / 2**nso
    if abs(coeff) > 1e-12:
        label = " ".join(f"{w}{k}" for k, w in enumerate(word) if w != "I")
        lines.append(f"({float(coeff.real)!r},{float(coeff.imag)!r}) [{label}]")

with open("data/h2_sto3g_jw.txt", "w") as f:
    f.write("# Jordan-Wigner image of h2_sto3g_fermion.txt (dense-matrix Pauli decomposition)\n")
    f.write("\n".join(lines) + "\n")

e_min = np.linalg.eigvalsh(H).min()
meta = {
    "molecule": "H2",
    "basis": "sto-3g",
    "bond_length_angstrom": BOND,
    "n_spinorbitals": nso,
    "n_electrons": 2,
    "ordering": "interleaved",
    "reference_occupation": "1100",
    "e_nuc": e_nuc,
    "e_hf": e_hf,
    "e_fci": e_fci,
    "e_min_dense_jw": float(e_min),
    "generator": "scripts/gen_h2_fixture.py (pyscf %s)" % __import__("pyscf").__version__,
}
with open("data/h2_sto3g.json", "w") as f:
    json.dump(meta, f, indent=2)
print(json.dumps(meta, indent=2))
