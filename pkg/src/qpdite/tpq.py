"""Thermal pure quantum states from random Cliffords and imaginary-time evolution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import basis as basis_mod
from . import ite, sampler
from .clifford import random_clifford
from .linalg import check_hermitian, herm_exp, pauli_string

# QPD samples per simulated TPQ state, keyed by qubit count
TPQ_DEFAULT_SAMPLES = {4: 1024, 5: 9400, 6: 51200, 7: 409600, 8: 1638400}


@dataclass(frozen=True)
class GibbsState:
    rho: np.ndarray
    partition_function: float
    beta: float

    def expectation(self, o) -> float:
        return float(np.trace(self.rho @ o).real)


def gibbs_state(H, beta: float) -> GibbsState:
    h = check_hermitian(H)
    if h.shape[0] > 2**8:
        raise ValueError("dense Gibbs states are limited to 8 qubits")
    w = np.linalg.eigvalsh(h)
    # shift by the ground energy so large beta does not overflow
    e = herm_exp(h - w[0] * np.eye(h.shape[0]), -beta)
    z_shifted = float(np.trace(e).real)
    rho = e / z_shifted
    return GibbsState(0.5 * (rho + rho.conj().T), z_shifted * math.exp(-beta * w[0]), beta)


def random_pauli_label(n: int, rng: np.random.Generator) -> str:
    """Uniform over the ``4^n - 1`` non-identity Pauli strings."""
    if n < 1:
        raise ValueError("n must be positive")
    k = int(rng.integers(1, 4**n))
    return "".join("IXYZ"[(k >> (2 * (n - 1 - q))) & 3] for q in range(n))


def random_pauli(n: int, seed=None) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return pauli_string(random_pauli_label(n, rng))


def tpq_state(H, beta: float, clifford) -> np.ndarray:
    """Normalized ``e^{-beta H} U |0...0>``."""
    psi = herm_exp(H, -beta) @ clifford.state()
    return psi / np.linalg.norm(psi)


@dataclass
class TPQExperimentConfig:
    n: int
    ite_exponent: float = 0.02
    n_states: int = 10
    n_paulis: int = 30
    mode: str = "exact"  # or "simulated"
    hamiltonian: str = "chain"
    periodic: bool = False
    N: int = 1024
    shots: int = 0
    trotter_r: int = 1
    basis: str = "ebl-product"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("exact", "simulated"):
            raise ValueError(f"mode must be 'exact' or 'simulated', not {self.mode!r}")
        if min(self.n_states, self.n_paulis, self.N, self.trotter_r) < 1:
            raise ValueError("counts must be at least 1")
        if not 1 <= self.n <= 8:
            raise ValueError("n must lie in [1, 8]")
        if self.ite_exponent < 0:
            raise ValueError("ite_exponent must be non-negative")

    @property
    def gibbs_beta(self) -> float:
        # the state carries e^{-b H} on both sides of the density matrix
        return 2 * self.ite_exponent


@dataclass
class TPQResult:
    config: TPQExperimentConfig
    rows: list[dict] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r["abs_error"] for r in self.rows])

    @property
    def mean_error(self) -> float:
        return float(self.errors.mean())

    @property
    def se(self) -> float:
        e = self.errors
        return float(e.std(ddof=1) / math.sqrt(len(e))) if len(e) > 1 else 0.0


def _hamiltonian(cfg: TPQExperimentConfig) -> ite.LocalHamiltonian:
    if cfg.hamiltonian == "chain":
        return ite.heisenberg_chain_1d(cfg.n, periodic=cfg.periodic)
    return ite.named_hamiltonian(cfg.hamiltonian, cfg.n)


def draw_instances(cfg: TPQExperimentConfig):
    """Cliffords and Pauli labels for a config; independent of the mode."""
    rng = np.random.default_rng([cfg.seed, cfg.n])
    cliffords = [random_clifford(cfg.n, rng) for _ in range(cfg.n_states)]
    labels = [random_pauli_label(cfg.n, rng) for _ in range(cfg.n_paulis)]
    return cliffords, labels


def tpq_experiment(cfg: TPQExperimentConfig) -> TPQResult:
    H = _hamiltonian(cfg)
    dense = H.dense()
    gibbs = gibbs_state(dense, cfg.gibbs_beta)
    cliffords, labels = draw_instances(cfg)
    paulis = [pauli_string(s) for s in labels]
    gibbs_vals = [gibbs.expectation(p) for p in paulis]

    steps = None
    if cfg.mode == "simulated":
        plan = ite.trotter_plan(ite.shift_to_psd(H), cfg.ite_exponent, cfg.trotter_r)
        steps = sampler.decompose_plan(plan, basis_mod.get_basis(cfg.basis))

    result = TPQResult(cfg)
    for si, cl in enumerate(cliffords):
        if steps is None:
            psi = tpq_state(dense, cfg.ite_exponent, cl)
            vals = [float(np.vdot(psi, p @ psi).real) for p in paulis]
        else:
            ests = sampler.estimate(
                steps, cfg.n, cl.state(), paulis, cfg.N, cfg.shots,
                seed=cfg.seed * 1_000_003 + si, workers=cfg.workers,
            )
            if not ests[0].ratio_defined:
                raise sampler.UndefinedRatioError(
                    f"state {si}: trace estimate is zero over {cfg.N} samples"
                )
            vals = [e.ratio for e in ests]
        for label, v, g in zip(labels, vals, gibbs_vals):
            result.rows.append({
                "n": cfg.n,
                "mode": cfg.mode,
                "beta": cfg.ite_exponent,
                "state_index": si,
                "pauli_string": label,
                "tpq_value": v,
                "gibbs_value": g,
                "abs_error": abs(v - g),
            })
    return result
