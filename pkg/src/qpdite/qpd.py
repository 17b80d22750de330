"""Quasiprobability decompositions of linear maps over a basis of operations.

Both solvers work on Choi matrices written in a real coordinate system:
a Hermitian ``D x D`` matrix becomes the ``D**2`` real numbers
(diagonal, sqrt(2) Re upper triangle, sqrt(2) Im upper triangle), which
is an isometry from the Frobenius inner product to the Euclidean one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .basis import BasisSet
from .channels import QuantumOperation, choi_of
from .linalg import eigh

EXACT_RESIDUAL_TOL = 1e-8
SPAN_TOL = 1e-7
FEAS_TOL = 1e-9


class RankDeficientError(ValueError):
    pass


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class QPDecomposition:
    coefficients: np.ndarray
    basis_label: str = ""
    residual: float = 0.0
    method: str = ""
    # dual vector of the L1 program; a certificate that gamma is optimal
    dual: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        q = np.asarray(self.coefficients, dtype=float)
        q.setflags(write=False)
        object.__setattr__(self, "coefficients", q)

    @property
    def gamma(self) -> float:
        return float(np.abs(self.coefficients).sum())

    @property
    def probabilities(self) -> np.ndarray:
        g = self.gamma
        if g == 0:
            raise ValueError("zero decomposition has no sampling distribution")
        return np.abs(self.coefficients) / g

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.coefficients < 0, -1, 1).astype(int)

    def __len__(self) -> int:
        return len(self.coefficients)

    def to_dict(self) -> dict:
        return {
            "basis_label": self.basis_label,
            "coefficients": self.coefficients.tolist(),
            "gamma": self.gamma,
            "residual": self.residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "QPDecomposition":
        return cls(np.array(doc["coefficients"], dtype=float), doc.get("basis_label", ""), doc.get("residual", 0.0))

    @classmethod
    def from_json(cls, text: str) -> "QPDecomposition":
        return cls.from_dict(json.loads(text))


def real_coordinates(h: np.ndarray) -> np.ndarray:
    d = h.shape[-1]
    iu = np.triu_indices(d, 1)
    diag = np.real(np.diagonal(h, axis1=-2, axis2=-1))
    upper = h[..., iu[0], iu[1]]
    return np.concatenate([diag, np.sqrt(2) * upper.real, np.sqrt(2) * upper.imag], axis=-1)


def design_matrix(s: BasisSet) -> np.ndarray:
    """Columns are the real coordinates of the basis Choi matrices."""
    return real_coordinates(s.choi_stack).T


def _target_vector(target: QuantumOperation, s: BasisSet) -> np.ndarray:
    if target.qubits != s.qubits:
        raise ValueError(f"target acts on {target.qubits} qubits, basis on {s.qubits}")
    return real_coordinates(choi_of(target))


def reconstruct_residual(d: QPDecomposition, s: BasisSet, target: QuantumOperation) -> float:
    if len(d) != len(s):
        raise ValueError(f"decomposition has {len(d)} coefficients, basis has {len(s)} elements")
    recon = np.tensordot(d.coefficients, s.choi_stack, axes=1)
    return float(np.linalg.norm(choi_of(target) - recon))


def solve_exact(target: QuantumOperation, s: BasisSet) -> QPDecomposition:
    """Unique coefficients over a complete basis of ``16**k`` elements."""
    a = design_matrix(s)
    n = 16**s.qubits
    rank = np.linalg.matrix_rank(a)
    if a.shape[1] != n or rank != n:
        raise RankDeficientError(
            f"basis {s.name!r} has {a.shape[1]} elements of rank {rank}; need {n} independent elements"
        )
    q = np.linalg.solve(a, _target_vector(target, s))
    d = QPDecomposition(q, s.name, method="exact")
    res = reconstruct_residual(d, s, target)
    if res > EXACT_RESIDUAL_TOL:
        raise RuntimeError(f"exact solve residual {res:.3e} exceeds {EXACT_RESIDUAL_TOL}")
    return QPDecomposition(q, s.name, res, "exact")


def span_residual(target: QuantumOperation, s: BasisSet) -> float:
    a = design_matrix(s)
    b = _target_vector(target, s)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(np.linalg.norm(a @ x - b))


def solve_min_gamma(target: QuantumOperation, s: BasisSet) -> QPDecomposition:
    """Minimal-L1 decomposition: min sum(q+ + q-) s.t. A (q+ - q-) = b, q+- >= 0."""
    a = design_matrix(s)
    b = _target_vector(target, s)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    miss = float(np.linalg.norm(a @ x - b))
    if miss > SPAN_TOL:
        raise InfeasibleError(
            f"target is outside the span of basis {s.name!r}: least-squares residual {miss:.3e}"
        )
    m = a.shape[1]
    res = linprog(
        np.ones(2 * m),
        A_eq=np.hstack([a, -a]),
        b_eq=b,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": FEAS_TOL, "dual_feasibility_tolerance": FEAS_TOL},
    )
    if res.status == 2:
        raise InfeasibleError(f"linear program infeasible over {s.name!r}: {res.message}")
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    q = res.x[:m] - res.x[m:]
    q[np.abs(q) < 1e-13] = 0.0
    d = QPDecomposition(q, s.name, method="min-gamma")
    return QPDecomposition(q, s.name, reconstruct_residual(d, s, target), "min-gamma", np.asarray(res.eqlin.marginals))


def diamond_lower_bound_ite(h, beta: float) -> float:
    """Diamond norm ``exp(-2 beta lambda_0)`` of ``rho -> e^{-beta H} rho e^{-beta H}``."""
    lam0 = eigh(h).eigenvalues[0]
    return float(np.exp(-2.0 * beta * lam0))
