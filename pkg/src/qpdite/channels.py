"""Completely positive maps given by Kraus operators, and their Choi matrices.

The Choi matrix uses the unnormalized maximally entangled vector
``sum_i |ii>`` with the map acting on the first factor, so for a single
Kraus operator ``K`` the Choi matrix is ``vec(K) vec(K)^dag`` where ``vec``
flattens row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import as_matrix, kron

CP_TOL = 1e-9
TP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumOperation:
    """A CP map ``rho -> sum_m K_m rho K_m^dag`` on ``qubits`` qubits.

    ``kind`` is ``"unitary"`` for a single unitary Kraus operator,
    ``"projective"`` for a trace-decreasing element realized by a two-outcome
    measurement ``{P, I - P}`` with ``P = sum K^dag K`` a projector, and
    ``"general"`` otherwise.
    """

    kraus: tuple[np.ndarray, ...]
    qubits: int
    kind: str = "general"
    trace_preserving: bool = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        ks = tuple(as_matrix(k) for k in self.kraus)
        d = 2**self.qubits
        if not ks:
            raise ValueError("at least one Kraus operator is required")
        for k in ks:
            if k.shape != (d, d):
                raise ValueError(f"Kraus operator of shape {k.shape} on {self.qubits} qubits")
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        if self.trace_preserving is None:
            object.__setattr__(self, "trace_preserving", is_trace_preserving(ks))
        if self.kind not in ("unitary", "projective", "general"):
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return 2**self.qubits

    @property
    def effect(self) -> np.ndarray:
        """``sum_m K_m^dag K_m``; the success POVM element for trace-decreasing ops."""
        return sum(k.conj().T @ k for k in self.kraus)

    @property
    def projector(self) -> np.ndarray | None:
        return self.effect if self.kind == "projective" else None

    def matrix(self) -> np.ndarray:
        if len(self.kraus) != 1:
            raise ValueError("operation has more than one Kraus operator")
        return self.kraus[0]


def is_trace_preserving(kraus: Sequence[np.ndarray]) -> bool:
    d = kraus[0].shape[0]
    e = sum(k.conj().T @ k for k in kraus)
    return bool(np.abs(e - np.eye(d)).max() <= TP_TOL)


def from_matrix(m, kind: str | None = None) -> QuantumOperation:
    """Single-Kraus operation ``rho -> M rho M^dag``."""
    m = as_matrix(m)
    n = int(round(np.log2(m.shape[0])))
    if kind is None:
        e = m.conj().T @ m
        if np.allclose(e, np.eye(m.shape[0]), atol=1e-12):
            kind = "unitary"
        elif np.allclose(e @ e, e, atol=1e-12):
            kind = "projective"
        else:
            kind = "general"
    return QuantumOperation((m,), n, kind)


def identity(n: int) -> QuantumOperation:
    return QuantumOperation((np.eye(2**n, dtype=complex),), n, "unitary", True)


def choi_of(op: QuantumOperation) -> np.ndarray:
    vecs = np.stack([k.reshape(-1) for k in op.kraus], axis=1)
    c = vecs @ vecs.conj().T
    return 0.5 * (c + c.conj().T)


def partial_trace_output(choi: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(choi.shape[0])))
    return np.einsum("aiaj->ij", choi.reshape(d, d, d, d))


def classify(op: QuantumOperation) -> tuple[bool, bool]:
    """(completely positive, trace preserving), decided from the Choi matrix."""
    c = choi_of(op)
    cp = bool(np.linalg.eigvalsh(c).min() >= -CP_TOL)
    marginal = partial_trace_output(c)
    tp = bool(np.abs(marginal - np.eye(marginal.shape[0])).max() <= TP_TOL)
    return cp, tp


def apply(op: QuantumOperation, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (op.dim, op.dim):
        raise ValueError(f"state of shape {rho.shape} does not match {op.qubits}-qubit op")
    return sum(k @ rho @ k.conj().T for k in op.kraus)


def compose(outer: QuantumOperation, inner: QuantumOperation) -> QuantumOperation:
    """The map ``outer o inner`` (inner acts first)."""
    if outer.qubits != inner.qubits:
        raise ValueError("qubit counts differ")
    ks = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    ks = tuple(k for k in ks if np.abs(k).max() > 0) or ks[:1]
    if outer.kind == "unitary" and inner.kind == "unitary":
        kind = "unitary"
    elif outer.trace_preserving and inner.kind == "projective":
        # a TP map after the measurement keeps the same success effect
        kind = "projective"
    else:
        kind = "general"
    tp = outer.trace_preserving and inner.trace_preserving
    return QuantumOperation(ks, outer.qubits, kind, tp if tp else None)


def tensor(a: QuantumOperation, b: QuantumOperation) -> QuantumOperation:
    ks = tuple(kron(x, y) for x in a.kraus for y in b.kraus)
    if a.kind == "unitary" and b.kind == "unitary":
        kind = "unitary"
    elif a.kind in ("unitary", "projective") and b.kind in ("unitary", "projective"):
        kind = "projective"
    else:
        kind = "general"
    return QuantumOperation(ks, a.qubits + b.qubits, kind, a.trace_preserving and b.trace_preserving)


def linear_combination(coeffs: Sequence[float], ops: Sequence[QuantumOperation]) -> np.ndarray:
    """Choi matrix of a formal real combination of operations."""
    return sum(c * choi_of(o) for c, o in zip(coeffs, ops))


def _check_support(support: Sequence[int], n: int) -> tuple[int, ...]:
    support = tuple(int(q) for q in support)
    if len(set(support)) != len(support):
        raise ValueError(f"duplicate qubits in support {support}")
    if any(q < 0 or q >= n for q in support):
        raise ValueError(f"support {support} out of range for {n} qubits")
    return support


def expand_operator(m: np.ndarray, support: Sequence[int], n: int) -> np.ndarray:
    """Lift a ``k``-qubit matrix acting on ``support`` to ``n`` qubits."""
    support = _check_support(support, n)
    k = len(support)
    rest = [q for q in range(n) if q not in support]
    full = kron(m, np.eye(2 ** (n - k), dtype=complex))
    # axes of ``full`` are ordered (support..., rest...) for both row and column
    order = list(support) + rest
    t = full.reshape((2,) * (2 * n))
    perm = [order.index(q) for q in range(n)]
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(2**n, 2**n)


def embed(op: QuantumOperation, support: Sequence[int], n: int) -> QuantumOperation:
    support = _check_support(support, n)
    if len(support) != op.qubits:
        raise ValueError(f"support {support} does not match a {op.qubits}-qubit op")
    ks = tuple(expand_operator(k, support, n) for k in op.kraus)
    return QuantumOperation(ks, n, op.kind, op.trace_preserving)


def apply_to_vector(m: np.ndarray, psi: np.ndarray, support: Sequence[int], n: int) -> np.ndarray:
    """Apply a local matrix to an ``n``-qubit state vector without expanding it."""
    k = len(support)
    t = psi.reshape((2,) * n)
    t = np.tensordot(m.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), list(support)))
    t = np.moveaxis(t, list(range(k)), list(support))
    return t.reshape(-1)


def density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def basis_state(bits: str) -> np.ndarray:
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return psi


def depolarizing(k: int, p: float) -> QuantumOperation:
    """``rho -> (1-p) rho + p Tr(rho) I / 2^k`` in Pauli-Kraus form."""
    if not 0 <= p <= 1:
        raise ValueError("depolarizing probability must lie in [0, 1]")
    from itertools import product

    from .linalg import pauli_string

    d2 = 4**k
    ks = []
    for label in product("IXYZ", repeat=k):
        s = "".join(label)
        w = (1 - p + p / d2) if set(s) == {"I"} else p / d2
        if w > 0:
            ks.append(np.sqrt(w) * pauli_string(s))
    return QuantumOperation(tuple(ks), k, "general", True)


def pauli_channel(px: float, py: float, pz: float) -> QuantumOperation:
    """Single-qubit Pauli channel with the given flip probabilities."""
    from .linalg import I2, X, Y, Z

    p0 = 1 - px - py - pz
    if min(px, py, pz, p0) < 0:
        raise ValueError("Pauli probabilities must be non-negative and sum to at most 1")
    ks = [np.sqrt(w) * m for w, m in ((p0, I2), (px, X), (py, Y), (pz, Z)) if w > 0]
    return QuantumOperation(tuple(ks), 1, "general", True)
