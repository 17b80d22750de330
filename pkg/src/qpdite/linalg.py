"""Dense complex linear algebra for operators on at most 8 qubits.

Matrices are plain ``numpy.ndarray`` objects of complex dtype.  Qubit 0 is
the most significant (leftmost) tensor factor everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

MAX_DIM = 2**8
HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - m.conj().T))


def check_hermitian(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"matrix is not square: {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    defect = hermiticity_defect(a)
    if defect > HERMITIAN_TOL * a.shape[0]:
        raise NotHermitianError(
            f"||M - M^dag||_F = {defect:.3e} exceeds {HERMITIAN_TOL * a.shape[0]:.1e}"
        )
    return a


def eigh(m) -> EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    a = check_hermitian(m)
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    # LAPACK already returns ascending order; a stable sort keeps ties in solver order
    order = np.argsort(w, kind="stable")
    return EigenSystem(w[order], v[:, order])


def herm_exp(m, s: float) -> np.ndarray:
    """Return exp(s * m) for Hermitian ``m`` through its eigendecomposition."""
    if not np.isfinite(s):
        raise ValueError("scalar s must be finite")
    es = eigh(m)
    exponents = s * es.eigenvalues
    if exponents.size and exponents.max() > np.log(np.finfo(float).max) - 1:
        raise OverflowError(
            f"exp({exponents.max():.3g}) overflows double precision"
        )
    u = es.eigenvectors
    out = (u * np.exp(exponents)) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def kron(*mats) -> np.ndarray:
    if not mats:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def norms(m) -> tuple[float, float, float]:
    """(operator norm, trace norm, Frobenius norm)."""
    a = as_matrix(m)
    if a.size == 0:
        return 0.0, 0.0, 0.0
    sv = np.linalg.svd(a, compute_uv=False)
    return float(sv[0]), float(sv.sum()), float(np.linalg.norm(a))


def operator_norm(m) -> float:
    return norms(m)[0]


def pauli_string(label: str) -> np.ndarray:
    """Matrix of a Pauli string such as ``"XZI"`` (qubit 0 first)."""
    try:
        return kron(*(PAULI[c] for c in label.upper()))
    except KeyError as exc:
        raise ValueError(f"bad Pauli label {label!r}") from exc


def ground_energy(m) -> float:
    return float(eigh(m).eigenvalues[0])
