"""Pipelines behind the command-line experiments.  Each returns plain row dicts."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from . import basis as basis_mod
from . import channels, ite, qpd, sampler
from .linalg import operator_norm

SAMPLER_COLUMNS = [
    "experiment", "beta", "steps", "N", "shots", "seed", "gamma_total",
    "trace_est", "trace_se", "obs_est", "obs_se", "ratio",
]
GAMMA_COLUMNS = ["beta", "gamma_ebl", "gamma_takagi", "diamond_lower_bound"]
TPQ_COLUMNS = ["n", "mode", "beta", "state_index", "pauli_string", "tpq_value", "gibbs_value", "abs_error"]

DEFAULT_SCHEDULE = (400, 800, 3200, 25600)
# hardware datum for the fifth step, recorded for reference only
HARDWARE_FIFTH_STEP = {"hardware": -0.275, "ideal": -0.269, "simulated": -0.275, "simulated_sd": 0.010, "N": 20000}


def parse_grid(spec: str) -> list[float]:
    """``"0:1:0.05"`` (inclusive) or a comma list ``"0,0.1,0.5"``."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(x) for x in spec.split(",") if x.strip()]


def _gamma_row(args) -> dict:
    hname, beta = args
    H = ite.named_hamiltonian(hname)
    h = H.dense()
    target = ite.ite_map(h, beta)
    g_ebl = qpd.solve_min_gamma(target, basis_mod.ebl_product(2)).gamma
    g_tak = qpd.solve_min_gamma(target, basis_mod.takagi_two_qubit()).gamma
    return {
        "beta": beta,
        "gamma_ebl": g_ebl,
        "gamma_takagi": g_tak,
        "diamond_lower_bound": qpd.diamond_lower_bound_ite(h, beta),
    }


def gamma_sweep(betas: Sequence[float], hamiltonian: str = "heis2q-shifted", workers: int = 1) -> list[dict]:
    H = ite.named_hamiltonian(hamiltonian)
    if H.n != 2:
        raise ValueError("the gamma sweep decomposes a 2-qubit map")
    jobs = [(hamiltonian, float(b)) for b in betas]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_gamma_row, jobs))
    return [_gamma_row(j) for j in jobs]


def _two_qubit_setup(hamiltonian: str, observable_hamiltonian: str, beta_step: float, basis: str):
    H = ite.named_hamiltonian(hamiltonian)
    h_obs = ite.named_hamiltonian(observable_hamiltonian).dense()
    scale = operator_norm(h_obs)
    target = ite.ite_map(H.dense(), beta_step)
    b = basis_mod.get_basis(basis)
    d = qpd.solve_min_gamma(target, b)
    return H, h_obs, scale, target, b, d


def ite_energy(
    steps: int = 4,
    beta_step: float = 0.01,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    shots: int = 512,
    reps: int = 10,
    basis: str = "ebl-product",
    hamiltonian: str = "heis2q-shifted",
    observable: str = "heis2q",
    initial: str = "00",
    seed: int = 0,
    workers: int = 1,
) -> tuple[list[dict], list[dict]]:
    """Energy after ``t`` repeated steps of ``e^{-beta_step H}`` for ``t = 1..steps``.

    Returns (per-run sampler rows, per-step summary rows).  The measured
    observable is ``H_obs / ||H_obs||``; energies in the summary are rescaled back.
    """
    if len(schedule) < steps:
        raise ValueError(f"schedule has {len(schedule)} entries for {steps} steps")
    H, h_obs, scale, target, b, d = _two_qubit_setup(hamiltonian, observable, beta_step, basis)
    psi0 = channels.basis_state(initial)
    A = h_obs / scale
    runs, summary = [], []
    for t in range(1, steps + 1):
        exact = sampler.exact_rescaled_expectation([target] * t, psi0, h_obs)
        seq = [sampler.SamplingStep(d, b, (0, 1))] * t
        ratios, ses = [], []
        for rep in range(reps):
            run_seed = seed * 1_000_003 + 1000 * t + rep
            res = sampler.estimate(seq, 2, psi0, [A], schedule[t - 1], shots, run_seed, workers)[0]
            _require_ratio(res, f"step {t}, repetition {rep}")
            runs.append(sampler_row("ite-energy", beta_step * t, t, res))
            ratios.append(res.ratio * scale)
            ses.append(res.ratio_se * scale)
        ratios = np.array(ratios)
        summary.append({
            "step": t,
            "beta": round(beta_step * t, 12),
            "N": schedule[t - 1],
            "exact": exact,
            "mean": float(ratios.mean()),
            "std": float(ratios.std(ddof=1)) if reps > 1 else 0.0,
            "combined_se": float(math.sqrt(np.sum(np.square(ses))) / reps),
            "gamma_total": d.gamma**t,
        })
    return runs, summary


def _require_ratio(res: sampler.EstimatorResult, what: str) -> None:
    if not res.ratio_defined:
        raise sampler.UndefinedRatioError(f"{what}: trace estimate is zero over {res.N} samples (seed {res.seed})")


def sampler_row(experiment: str, beta: float, steps: int, res: sampler.EstimatorResult) -> dict:
    return {
        "experiment": experiment,
        "beta": round(beta, 12),
        "steps": steps,
        "N": res.N,
        "shots": res.shots,
        "seed": res.seed,
        "gamma_total": res.gamma_total,
        "trace_est": res.trace_estimate,
        "trace_se": res.trace_se,
        "obs_est": res.obs_estimate,
        "obs_se": res.obs_se,
        "ratio": res.ratio,
    }


def oracle(
    experiment: str = "ite-energy",
    steps: int = 2,
    beta_step: float = 0.01,
    N: int | None = None,
    shots: int = 512,
    basis: str = "ebl-product",
    n: int = 4,
    r: int = 2,
    seed: int = 0,
    workers: int = 1,
    eps: float = 0.5,
    delta: float = 0.1,
) -> list[dict]:
    """Sampled estimate next to the dense value for one configuration."""
    if experiment == "ite-energy":
        H, h_obs, scale, target, b, d = _two_qubit_setup("heis2q-shifted", "heis2q", beta_step, basis)
        psi0 = channels.basis_state("00")
        seq = [sampler.SamplingStep(d, b, (0, 1))] * steps
        dense_ops = [target] * steps
        A = h_obs / scale
        beta = beta_step * steps
        n_q = 2
    elif experiment == "chain":
        H = ite.shift_to_psd(ite.heisenberg_chain_1d(n))
        plan = ite.trotter_plan(H, beta_step * steps, r)
        seq = sampler.decompose_plan(plan, basis_mod.get_basis(basis))
        dense_ops = plan.operations()
        psi0 = channels.basis_state("01" * (n // 2) + "0" * (n % 2))
        raw = ite.heisenberg_chain_1d(n).dense()
        A = raw / operator_norm(raw)
        beta = beta_step * steps
        n_q = n
    else:
        raise ValueError(f"oracle experiment must be 'ite-energy' or 'chain', not {experiment!r}")
    gamma_total = float(np.prod([s.qpd.gamma for s in seq]))
    if N is None:
        N = sampler.required_samples(gamma_total, eps, delta)
    exact = sampler.exact_rescaled_expectation(dense_ops, psi0, A)
    res = sampler.estimate(seq, n_q, psi0, [A], N, shots, seed, workers)[0]
    _require_ratio(res, f"oracle {experiment}")
    row = sampler_row(experiment, beta, len(seq), res)
    z = (res.ratio - exact) / res.ratio_se if res.ratio_se > 0 else (0.0 if res.ratio == exact else math.inf)
    row.update({"exact": exact, "ratio_se": res.ratio_se, "z": z, "within_3se": bool(abs(z) <= 3)})
    return [row]
