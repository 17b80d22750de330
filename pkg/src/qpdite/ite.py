"""Local Hamiltonians, imaginary-time evolution maps and first-order Trotter plans."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import channels
from .channels import QuantumOperation
from .linalg import check_hermitian, eigh, herm_exp, operator_norm, pauli_string

HEISENBERG_TERM = -(pauli_string("XX") + pauli_string("YY") + pauli_string("ZZ"))


@dataclass(frozen=True)
class LocalTerm:
    support: tuple[int, ...]
    h: np.ndarray


@dataclass(frozen=True)
class LocalHamiltonian:
    n: int
    terms: tuple[LocalTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a Hamiltonian needs at least one term")
        terms = []
        for t in self.terms:
            support = tuple(int(q) for q in t.support)
            h = check_hermitian(t.h)
            if h.shape[0] != 2 ** len(support):
                raise ValueError(f"term on {support} has matrix of shape {h.shape}")
            channels._check_support(support, self.n)
            terms.append(LocalTerm(support, h))
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def L(self) -> int:
        return len(self.terms)

    def dense(self) -> np.ndarray:
        return sum(channels.expand_operator(t.h, t.support, self.n) for t in self.terms)

    def ground_energy(self) -> float:
        return float(eigh(self.dense()).eigenvalues[0])

    def is_translation_invariant(self) -> bool:
        first = self.terms[0].h
        return all(t.h.shape == first.shape and np.allclose(t.h, first, atol=1e-12) for t in self.terms)


def heisenberg_2q(shift: bool = False) -> LocalHamiltonian:
    h = HEISENBERG_TERM + (np.eye(4) if shift else 0)
    return LocalHamiltonian(2, (LocalTerm((0, 1), h),))


def heisenberg_chain_1d(n: int, shift: bool = False, periodic: bool = False) -> LocalHamiltonian:
    """Nearest-neighbour chain with ``-(XX + YY + ZZ)`` on every edge."""
    if n < 2:
        raise ValueError("chain needs at least 2 sites")
    edges = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 2:
        edges.append((n - 1, 0))
    h = HEISENBERG_TERM + (np.eye(4) if shift else 0)
    return LocalHamiltonian(n, tuple(LocalTerm(e, h) for e in edges))


def shift_to_psd(H: LocalHamiltonian) -> LocalHamiltonian:
    """Add ``-lambda_0(h_l) I`` to every local term so each becomes PSD with ground energy 0."""
    terms = []
    for t in H.terms:
        lam0 = eigh(t.h).eigenvalues[0]
        terms.append(LocalTerm(t.support, t.h - lam0 * np.eye(t.h.shape[0])))
    return LocalHamiltonian(H.n, tuple(terms))


def shift_by(H: LocalHamiltonian, alpha: float) -> LocalHamiltonian:
    return LocalHamiltonian(
        H.n, tuple(LocalTerm(t.support, t.h + alpha * np.eye(t.h.shape[0])) for t in H.terms)
    )


def from_spec(doc: dict | str | Path) -> LocalHamiltonian:
    """Build a Hamiltonian from its JSON description.

    ``{"n": 2, "terms": [{"qubits": [0, 1], "pauli_sum": [{"coeff": -1, "pauli_string": "XX"}, ...]}],
    "shift": "auto" | "none" | <float>}``
    """
    if isinstance(doc, Path) or (isinstance(doc, str) and not doc.lstrip().startswith("{")):
        doc = json.loads(Path(doc).read_text())
    elif isinstance(doc, str):
        doc = json.loads(doc)
    n = int(doc["n"])
    terms = []
    for t in doc["terms"]:
        qubits = tuple(t["qubits"])
        h = np.zeros((2 ** len(qubits),) * 2, dtype=complex)
        for p in t["pauli_sum"]:
            label = p["pauli_string"]
            if len(label) != len(qubits):
                raise ValueError(f"Pauli string {label!r} does not match support {qubits}")
            coeff = p["coeff"]
            if isinstance(coeff, (list, tuple)):
                coeff = complex(*coeff)
            h += coeff * pauli_string(label)
        terms.append(LocalTerm(qubits, h))
    H = LocalHamiltonian(n, tuple(terms))
    shift = doc.get("shift", "none")
    if shift == "auto":
        return shift_to_psd(H)
    if shift in (None, "none"):
        return H
    return shift_by(H, float(shift))


def named_hamiltonian(name: str, n: int | None = None) -> LocalHamiltonian:
    """Shipped models: ``heis2q``, ``heis2q-shifted``, ``chain``, ``chain-shifted``."""
    if name == "heis2q":
        return heisenberg_2q(False)
    if name == "heis2q-shifted":
        return heisenberg_2q(True)
    if name in ("chain", "chain-shifted"):
        if n is None:
            raise ValueError("chain models need a qubit count")
        return heisenberg_chain_1d(n, shift=name.endswith("shifted"))
    path = Path(name)
    if path.exists():
        return from_spec(path)
    raise ValueError(f"unknown Hamiltonian {name!r}")


def ite_map(h, beta: float) -> QuantumOperation:
    """The map ``rho -> e^{-beta h} rho e^{-beta h}``."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    k = herm_exp(h, -beta)
    n = int(round(math.log2(k.shape[0])))
    scalar = np.allclose(k, k[0, 0] * np.eye(k.shape[0]), atol=1e-14)
    tp = bool(scalar and abs(abs(k[0, 0]) - 1) < 1e-12)
    return QuantumOperation((k,), n, "unitary" if tp else "general", tp)


@dataclass(frozen=True)
class TrotterStep:
    support: tuple[int, ...]
    term_index: int
    operation: QuantumOperation


@dataclass(frozen=True)
class TrotterPlan:
    n: int
    beta: float
    r: int
    steps: tuple[TrotterStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def product(self) -> np.ndarray:
        """Dense operator obtained by applying the steps in order (step 0 acts first)."""
        out = np.eye(2**self.n, dtype=complex)
        for s in self.steps:
            out = channels.expand_operator(s.operation.matrix(), s.support, self.n) @ out
        return out

    def operations(self) -> list[QuantumOperation]:
        return [channels.embed(s.operation, s.support, self.n) for s in self.steps]


def trotter_plan(H: LocalHamiltonian, beta: float, r: int) -> TrotterPlan:
    if r < 1:
        raise ValueError("Trotter number r must be at least 1")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    local = [ite_map(t.h, beta / r) for t in H.terms]
    steps = tuple(
        TrotterStep(t.support, l, local[l]) for _ in range(r) for l, t in enumerate(H.terms)
    )
    return TrotterPlan(H.n, beta, r, steps)


def trotter_error(H: LocalHamiltonian, beta: float, r: int) -> float:
    """Operator-norm distance between the Trotter product and ``e^{-beta H}``."""
    exact = herm_exp(H.dense(), -beta)
    return operator_norm(trotter_plan(H, beta, r).product() - exact)


def choose_r(beta: float, L: int, eps: float, c: float = 1.0) -> int:
    """Trotter number ``ceil(c beta^2 L^2 / eps)``, at least 1."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return max(1, math.ceil(c * beta**2 * L**2 / eps))

