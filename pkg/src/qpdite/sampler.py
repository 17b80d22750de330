"""Monte-Carlo estimation of rescaled expectation values from quasiprobability decompositions.

Every trial ``j`` draws from its own generator seeded by ``(seed, j)``, so the
records do not depend on how trials are split across worker processes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import channels
from .basis import BasisSet
from .channels import QuantumOperation
from .linalg import check_hermitian, eigh, operator_norm
from .qpd import QPDecomposition, solve_exact, solve_min_gamma


class UndefinedRatioError(ZeroDivisionError):
    pass


def required_samples(gamma_total: float, eps: float, delta: float) -> int:
    """Hoeffding budget ``ceil(2 gamma^2 / eps^2 * ln(1/delta))``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    # round away float fuzz so exact integers are not pushed up by the ceiling
    return max(1, math.ceil(round(2 * gamma_total**2 / eps**2 * math.log(1 / delta), 9)))


@dataclass(frozen=True)
class SamplingStep:
    """One decomposed local map placed on ``support`` of the register."""

    qpd: QPDecomposition
    basis: BasisSet
    support: tuple[int, ...]

    def __post_init__(self):
        if len(self.qpd) != len(self.basis):
            raise ValueError("decomposition and basis are not index aligned")
        if len(self.support) != self.basis.qubits:
            raise ValueError(f"support {self.support} does not match a {self.basis.qubits}-qubit basis")
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))


@dataclass
class SampleRecords:
    indices: np.ndarray  # (N, R)
    signs: np.ndarray  # (N, R), +-1
    indicators: np.ndarray  # (N, R), 0/1; steps after a failure are recorded as 0
    outcomes: np.ndarray  # (N, n_obs), 0 for aborted trials
    weights: np.ndarray  # W_j, (N,)
    obs_weights: np.ndarray  # M_j, (N, n_obs)


@dataclass
class EstimatorResult:
    trace_estimate: float
    obs_estimate: float
    ratio: float
    N: int
    gamma_total: float
    trace_se: float
    obs_se: float
    ratio_se: float
    seed: int
    shots: int = 0
    ratio_defined: bool = True
    warnings: list[str] = field(default_factory=list)
    records: SampleRecords | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "shots": self.shots,
            "seed": self.seed,
            "gamma_total": self.gamma_total,
            "trace_est": self.trace_estimate,
            "trace_se": self.trace_se,
            "obs_est": self.obs_estimate,
            "obs_se": self.obs_se,
            "ratio": self.ratio if self.ratio_defined else None,
            "ratio_se": self.ratio_se,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# --- trial engine ---------------------------------------------------------------


@dataclass(frozen=True)
class _CompiledStep:
    cdf: np.ndarray
    signs: np.ndarray
    kraus: tuple[tuple[np.ndarray, ...], ...]
    trace_preserving: np.ndarray
    support: tuple[int, ...]
    gamma: float


def _compile(step: SamplingStep) -> _CompiledStep:
    p = step.qpd.probabilities
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    return _CompiledStep(
        cdf,
        step.qpd.signs,
        tuple(op.kraus for op in step.basis.operations),
        np.array([op.trace_preserving for op in step.basis.operations]),
        step.support,
        step.qpd.gamma,
    )


@dataclass(frozen=True)
class _Problem:
    steps: tuple[_CompiledStep, ...]
    n: int
    state: np.ndarray  # vector (pure) or matrix (mixed)
    observables: tuple[np.ndarray, ...]
    eig: tuple[tuple[np.ndarray, np.ndarray], ...]
    shots: int
    seed: int


def _apply_branch_vector(kraus, psi, support, n, u, tp):
    """Pick Kraus branch m with probability ||K_m psi||^2 using the uniform ``u``.

    Returns the normalized post-branch state, or None when ``u`` falls past the
    total weight (the measurement outcome that rejects the element).
    """
    if len(kraus) == 1 and len(support) == n:
        outs = [kraus[0] @ psi]
    elif len(kraus) == 1:
        outs = [channels.apply_to_vector(kraus[0], psi, support, n)]
    else:
        outs = [
            k @ psi if len(support) == n else channels.apply_to_vector(k, psi, support, n) for k in kraus
        ]
    acc = 0.0
    last = None
    for v in outs:
        w = float(np.vdot(v, v).real)
        if w > 0:
            last = (v, w)
        acc += w
        if u < acc:
            return v / math.sqrt(w)
    if tp and last is not None:
        # branch weights of a TP element sum to 1 up to rounding
        return last[0] / math.sqrt(last[1])
    return None


def _apply_branch_density(kraus, rho, support, n, u, tp):
    full = [channels.expand_operator(k, support, n) if len(support) != n else k for k in kraus]
    out = sum(k @ rho @ k.conj().T for k in full)
    s = float(np.trace(out).real)
    if s <= 0:
        return None
    if tp or u < s:
        return out / s
    return None


def _measure(problem: _Problem, state, rng) -> np.ndarray:
    pure = state.ndim == 1
    vals = np.empty(len(problem.observables))
    for i, (a, (w, v)) in enumerate(zip(problem.observables, problem.eig)):
        if problem.shots == 0:
            vals[i] = np.vdot(state, a @ state).real if pure else np.trace(a @ state).real
            continue
        if pure:
            probs = np.abs(v.conj().T @ state) ** 2
        else:
            probs = np.einsum("ij,jk,ki->i", v.conj().T, state, v).real
        probs = np.clip(probs, 0, None)
        probs /= probs.sum()
        counts = rng.multinomial(problem.shots, probs)
        vals[i] = counts @ w / problem.shots
    return vals


def _run_trials(problem: _Problem, start: int, stop: int):
    R = len(problem.steps)
    m = stop - start
    n_obs = len(problem.observables)
    idx = np.zeros((m, R), dtype=np.int64)
    sgn = np.ones((m, R), dtype=np.int8)
    ind = np.zeros((m, R), dtype=np.int8)
    out = np.zeros((m, n_obs))
    pure = problem.state.ndim == 1
    for t in range(m):
        rng = np.random.default_rng([problem.seed, start + t])
        u_idx = rng.random(R)
        u_branch = rng.random(R)
        state = problem.state
        ok = True
        for k, st in enumerate(problem.steps):
            i = int(np.searchsorted(st.cdf, u_idx[k], side="right"))
            i = min(i, len(st.cdf) - 1)
            idx[t, k] = i
            sgn[t, k] = st.signs[i]
            if not ok:
                continue
            kraus = st.kraus[i]
            tp = bool(st.trace_preserving[i])
            if pure:
                new = _apply_branch_vector(kraus, state, st.support, problem.n, u_branch[k], tp)
            else:
                new = _apply_branch_density(kraus, state, st.support, problem.n, u_branch[k], tp)
            if new is None:
                ok = False
                continue
            ind[t, k] = 1
            state = new
        if ok:
            out[t] = _measure(problem, state, rng)
    return idx, sgn, ind, out


def _chunks(N: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(N / max(1, workers)))
    return [(a, min(N, a + size)) for a in range(0, N, size)]


def estimate(
    steps: Sequence[SamplingStep],
    n: int,
    rho0,
    observables: Sequence,
    N: int,
    shots: int = 512,
    seed: int = 0,
    workers: int = 1,
    eps: float | None = None,
    delta: float | None = None,
    keep_records: bool = False,
) -> list[EstimatorResult]:
    """Shared engine: one result per observable, all computed from the same trials."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if shots < 0:
        raise ValueError("shots must be non-negative (0 selects exact measurement)")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    state = np.asarray(rho0, dtype=complex)
    if state.ndim == 1:
        if state.shape[0] != 2**n:
            raise ValueError("state vector dimension does not match n")
        if abs(np.linalg.norm(state) - 1) > 1e-10:
            raise ValueError("initial state vector must be normalized")
    elif state.shape != (2**n, 2**n):
        raise ValueError("density operator dimension does not match n")
    obs = []
    for a in observables:
        a = check_hermitian(a)
        if a.shape[0] != 2**n:
            raise ValueError("observable dimension does not match n")
        if operator_norm(a) > 1 + 1e-9:
            raise ValueError("observable must have operator norm at most 1")
        obs.append(a)
    eig = tuple((es.eigenvalues, es.eigenvectors) for es in map(eigh, obs))
    compiled = tuple(_compile(s) for s in steps)
    for s in steps:
        channels._check_support(s.support, n)
    problem = _Problem(compiled, n, state, tuple(obs), eig, shots, seed)

    chunks = _chunks(N, workers)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_trials, [problem] * len(chunks), *zip(*chunks)))
    else:
        parts = [_run_trials(problem, a, b) for a, b in chunks]
    idx, sgn, ind, out = (np.concatenate(p) for p in zip(*parts))

    gamma_total = float(np.prod([c.gamma for c in compiled]))
    ok = ind.all(axis=1) if compiled else np.ones(N, dtype=bool)
    W = gamma_total * np.prod(sgn, axis=1, dtype=np.int64) * ok
    M = W[:, None] * out

    warnings = []
    if eps is not None and delta is not None:
        need = required_samples(gamma_total, eps, delta)
        if N < need:
            warnings.append(f"N={N} is below the Hoeffding budget {need} for eps={eps}, delta={delta}")
    records = SampleRecords(idx, sgn, ind, out, W, M) if keep_records else None
    return [_summarize(W, M[:, i], gamma_total, seed, shots, warnings, records) for i in range(len(obs))]


def _summarize(W, M, gamma_total, seed, shots, warnings, records) -> EstimatorResult:
    N = len(W)
    tr = float(W.mean())
    ob = float(M.mean())
    ddof = 1 if N > 1 else 0
    tr_se = float(W.std(ddof=ddof) / math.sqrt(N))
    ob_se = float(M.std(ddof=ddof) / math.sqrt(N))
    if tr == 0:
        return EstimatorResult(tr, ob, math.nan, N, gamma_total, tr_se, ob_se, math.nan, seed, shots,
                               False, warnings + ["trace estimate is zero; ratio undefined"], records)
    ratio = ob / tr
    # delta-method error of the ratio of correlated means
    ratio_se = float((M - ratio * W).std(ddof=ddof) / (math.sqrt(N) * abs(tr)))
    return EstimatorResult(tr, ob, ratio, N, gamma_total, tr_se, ob_se, ratio_se, seed, shots,
                           True, list(warnings), records)


def run_algorithm1(
    d: QPDecomposition,
    s: BasisSet,
    rho0,
    A,
    N: int,
    shots: int = 512,
    seed: int = 0,
    **kwargs,
) -> EstimatorResult:
    """Estimate ``Tr[A T(rho)] / Tr[T(rho)]`` for one decomposed map on the whole register."""
    step = SamplingStep(d, s, tuple(range(s.qubits)))
    return estimate([step], s.qubits, rho0, [A], N, shots, seed, **kwargs)[0]


def run_algorithm2(
    qpds: Sequence[SamplingStep | tuple],
    n: int,
    rho0,
    A,
    N: int,
    shots: int = 512,
    seed: int = 0,
    **kwargs,
) -> EstimatorResult:
    """Same estimate for an ordered sequence of decomposed local maps."""
    steps = [q if isinstance(q, SamplingStep) else SamplingStep(*q) for q in qpds]
    return estimate(steps, n, rho0, [A], N, shots, seed, **kwargs)[0]


# --- exact oracle ----------------------------------------------------------------


def propagate(steps: Sequence[QuantumOperation], rho0) -> np.ndarray:
    rho = np.asarray(rho0, dtype=complex)
    if rho.ndim == 1:
        rho = channels.density(rho)
    for op in steps:
        rho = channels.apply(op, rho)
    return rho


def exact_trace_and_obs(steps: Sequence[QuantumOperation], rho0, A) -> tuple[float, float]:
    rho = propagate(steps, rho0)
    return float(np.trace(rho).real), float(np.trace(np.asarray(A) @ rho).real)


def exact_rescaled_expectation(steps: Sequence[QuantumOperation], rho0, A) -> float:
    """``Tr[A E(rho)] / Tr[E(rho)]`` by dense matrix arithmetic."""
    tr, ob = exact_trace_and_obs(steps, rho0, A)
    if abs(tr) < 1e-300:
        raise UndefinedRatioError("the evolved state has zero trace")
    return ob / tr


def decompose_plan(plan, s: BasisSet, method: str = "min-gamma") -> list[SamplingStep]:
    """Decompose every step of a Trotter plan, reusing solves for repeated local maps."""
    solve = solve_min_gamma if method == "min-gamma" else solve_exact
    cache: list[tuple[np.ndarray, QPDecomposition]] = []
    out = []
    for st in plan.steps:
        k = st.operation.matrix()
        d = next((q for m, q in cache if m.shape == k.shape and np.allclose(m, k, atol=1e-13, rtol=0)), None)
        if d is None:
            d = solve(st.operation, s)
            cache.append((k, d))
        out.append(SamplingStep(d, s, st.support))
    return out
