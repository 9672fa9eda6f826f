#!/usr/bin/env python3
"""Generate the H2 / STO-3G qubit Hamiltonian table shipped in crates/core/data.

Needs pyscf and numpy. The run is deterministic; rerunning it must reproduce
the committed CSV byte for byte.

Conventions (also written to the .convention sidecar):
  * spin orbitals interleaved: qubit 2p = spatial MO p (alpha), 2p+1 = MO p (beta)
  * Jordan-Wigner: a_j^dag = Z_0 ... Z_{j-1} (X_j - iY_j)/2
  * Pauli labels and bitstrings are little-endian: the rightmost letter is qubit 0
  * Hartree-Fock reference therefore reads 0011 (qubits 0 and 1 occupied)
  * MO signs fixed so the first AO coefficient of every MO is non-negative
  * the identity column includes the nuclear repulsion energy
"""
import itertools
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, scf

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_label(label):
    # label[0] is the highest qubit, so plain left-to-right kron gives
    # little-endian basis indices (bit j of the index = qubit j).
    m = np.array([[1.0 + 0j]])
    for ch in label:
        m = np.kron(m, PAULI[ch])
    return m


def annihilator(j, n):
    letters = []
    for q in reversed(range(n)):
        if q < j:
            letters.append("Z")
        elif q == j:
            letters.append("A")
        else:
            letters.append("I")
    m = np.array([[1.0 + 0j]])
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, occupied = |1>
    for ch in letters:
        m = np.kron(m, lower if ch == "A" else PAULI[ch])
    return m


def qubit_hamiltonian(r):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-13
    mf.kernel()
    c = mf.mo_coeff.copy()
    for p in range(c.shape[1]):
        if c[0, p] < 0:
            c[:, p] *= -1
    norb = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), norb)  # (pq|rs)
    n = 2 * norb
    ops = [annihilator(j, n) for j in range(n)]
    dag = [o.conj().T for o in ops]
    dim = 2**n
    h = mol.energy_nuc() * np.eye(dim, dtype=complex)
    for p, q in itertools.product(range(norb), repeat=2):
        for s in range(2):
            h += h1[p, q] * dag[2 * p + s] @ ops[2 * q + s]
    for p, q, r_, s_ in itertools.product(range(norb), repeat=4):
        v = eri[p, q, r_, s_]
        if abs(v) < 1e-15:
            continue
        for a, b in itertools.product(range(2), repeat=2):
            h += 0.5 * v * dag[2 * p + a] @ dag[2 * r_ + b] @ ops[2 * s_ + b] @ ops[2 * q + a]
    e_fci = fci.FCI(mf, c).kernel()[0] + 0.0
    return h, e_fci, n


def main(out_csv, out_meta):
    grid = [round(0.30 + 0.01 * i, 2) for i in range(221)]
    rows = []
    labels_all = ["".join(t) for t in itertools.product("IXYZ", repeat=4)]
    coeffs = []
    for r in grid:
        h, e_fci, n = qubit_hamiltonian(r)
        cs = {}
        for lab in labels_all:
            val = np.trace(kron_label(lab) @ h) / 2**n
            assert abs(val.imag) < 1e-12
            cs[lab] = val.real
        e_min = np.linalg.eigvalsh(h)[0]
        # FCI in the two-electron sector must not be below the Fock-space minimum
        assert e_min <= e_fci + 1e-9, (r, e_min, e_fci)
        coeffs.append(cs)
        rows.append(r)
    words = [lab for lab in labels_all if max(abs(c[lab]) for c in coeffs) > 1e-10]
    words.sort(key=lambda w: (w != "IIII", sum(ch != "I" for ch in w), w))
    with open(out_csv, "w", newline="\n") as f:
        f.write("R_angstrom," + ",".join(words) + "\n")
        for r, cs in zip(rows, coeffs):
            f.write(f"{r:.2f}," + ",".join(f"{cs[w]:.15f}" for w in words) + "\n")
    with open(out_meta, "w", newline="\n") as f:
        f.write(__doc__.split("Conventions (also written to the .convention sidecar):\n")[1])
        f.write("  * molecule: H2, basis STO-3G, RHF reference, grid 0.30..2.50 A step 0.01\n")
        f.write(f"  * words ({len(words)}): {' '.join(words)}\n")
    print(f"wrote {len(rows)} rows x {len(words)} words", file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
