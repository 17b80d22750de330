"""Uniformly random Clifford operators in symplectic tableau form.

Sampling follows the canonical form ``F1 H S F2`` of Bravyi and Maslov: a
quantum-Mallows draw fixes the Hadamard layer and qubit permutation, and the
two Borel factors are filled with independent random bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .linalg import I2, X, Z, kron


@dataclass(frozen=True, eq=False)
class CliffordElement:
    """Tableau of ``2n`` rows ``[x | z | r]``.

    Rows ``0..n-1`` are the images of ``X_q`` (destabilizers) and rows
    ``n..2n-1`` the images of ``Z_q`` (stabilizers) under ``P -> U P U^dag``.
    A row denotes ``(-1)^r`` times the tensor product of ``i^{x z} X^x Z^z``.
    """

    n: int
    x: np.ndarray
    z: np.ndarray
    r: np.ndarray

    def key(self) -> bytes:
        return np.concatenate([self.x.ravel(), self.z.ravel(), self.r]).astype(np.uint8).tobytes()

    def symplectic(self) -> np.ndarray:
        return np.hstack([self.x, self.z]).astype(np.uint8)

    def is_symplectic(self) -> bool:
        m = self.symplectic().astype(int)
        n = self.n
        omega = np.block([[np.zeros((n, n), int), np.eye(n, dtype=int)], [np.eye(n, dtype=int), np.zeros((n, n), int)]])
        return bool(np.array_equal((m @ omega @ m.T) % 2, omega))

    def row_matrix(self, i: int) -> np.ndarray:
        return pauli_row_matrix(self.x[i], self.z[i], self.r[i])

    def destabilizer(self, q: int) -> np.ndarray:
        return self.row_matrix(q)

    def stabilizer(self, q: int) -> np.ndarray:
        return self.row_matrix(self.n + q)

    def state(self) -> np.ndarray:
        """``U|0...0>``: the joint +1 eigenvector of the stabilizer rows."""
        d = 2**self.n
        proj = np.eye(d, dtype=complex)
        for q in range(self.n):
            proj = proj @ (np.eye(d) + self.stabilizer(q)) / 2
        col = int(np.argmax(np.linalg.norm(proj, axis=0)))
        v = proj[:, col]
        return v / np.linalg.norm(v)

    @cached_property
    def unitary(self) -> np.ndarray:
        """Explicit ``2^n x 2^n`` unitary, fixed up to a global phase."""
        n = self.n
        psi0 = self.state()
        cols = np.empty((2**n, 2**n), dtype=complex)
        dest = [self.destabilizer(q) for q in range(n)]
        for b in range(2**n):
            v = psi0
            for q in range(n):
                if (b >> (n - 1 - q)) & 1:
                    v = dest[q] @ v
            cols[:, b] = v
        return cols


def pauli_row_matrix(x, z, r) -> np.ndarray:
    factors = []
    for xq, zq in zip(x, z):
        m = I2
        if xq:
            m = X @ m
        if zq:
            m = m @ Z
        if xq and zq:
            m = 1j * m
        factors.append(m)
    return (-1) ** int(r) * kron(*factors)


def _sample_mallows(n: int, us: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    had = np.zeros(n, dtype=bool)
    perm = np.zeros(n, dtype=int)
    remaining = list(range(n))
    for i in range(n):
        m = n - i
        eps = 4.0 ** (-m)
        u = us[i]
        index = -math.ceil(math.log2(u + (1 - u) * eps))
        had[i] = index < m
        k = index if index < m else 2 * m - index - 1
        perm[i] = remaining.pop(k)
    return had, perm


@lru_cache(maxsize=None)
def _strict_lower(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.tril_indices(n, -1)


def _random_lower(n: int, bits: np.ndarray, symmetric: bool) -> np.ndarray:
    """Symmetric with random diagonal, or unit lower triangular, over GF(2).

    Consumes ``n (n + 1) / 2`` bits when symmetric and ``n (n - 1) / 2`` otherwise.
    """
    rows, cols = _strict_lower(n)
    vals = bits[: rows.size]
    mat = np.diag(bits[rows.size : rows.size + n]) if symmetric else np.eye(n, dtype=int)
    mat[rows, cols] = vals
    if symmetric:
        mat[cols, rows] = vals
    return mat.astype(int)


def _gf2_inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    a = np.hstack([m % 2, np.eye(n, dtype=int)])
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r, c])
        a[[c, piv]] = a[[piv, c]]
        for r in range(n):
            if r != c and a[r, c]:
                a[r] ^= a[c]
    return a[:, n:]


def _borel_table(gamma: np.ndarray, delta: np.ndarray) -> np.ndarray:
    n = delta.shape[0]
    t = np.zeros((2 * n, 2 * n), dtype=int)
    t[:n, :n] = delta
    t[n:, :n] = (gamma @ delta) % 2
    t[n:, n:] = _gf2_inverse(delta).T
    return t


def random_clifford(n: int, seed=None) -> CliffordElement:
    """Uniform sample from the n-qubit Clifford group (modulo global phase)."""
    if not 1 <= n <= 8:
        raise ValueError("n must lie in [1, 8]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    had, perm = _sample_mallows(n, rng.random(n))
    low = n * (n - 1) // 2
    bits = rng.integers(2, size=4 * low + 2 * n + 2 * n)
    gamma1 = _random_lower(n, bits[: low + n], True)
    gamma2 = _random_lower(n, bits[low + n : 2 * (low + n)], True)
    delta1 = _random_lower(n, bits[2 * (low + n) : 3 * low + 2 * n], False)
    delta2 = _random_lower(n, bits[3 * low + 2 * n : 4 * low + 2 * n], False)
    table1 = _borel_table(gamma1, delta1)
    table2 = _borel_table(gamma2, delta2)
    table = table2[np.concatenate([perm, n + perm])]
    hq = np.flatnonzero(had)
    table[np.concatenate([hq, hq + n])] = table[np.concatenate([hq + n, hq])]
    sym = (table1 @ table) % 2
    phases = bits[4 * low + 2 * n :]
    return CliffordElement(n, sym[:, :n].astype(np.uint8), sym[:, n:].astype(np.uint8), phases.astype(np.uint8))


def clifford_group_order(n: int) -> int:
    """Size of the n-qubit Clifford group modulo phases, 2^(n^2+2n) prod(4^j - 1)."""
    out = 2 ** (n * n + 2 * n)
    for j in range(1, n + 1):
        out *= 4**j - 1
    return out
