"""QPD cost against beta for the shifted 2-qubit Heisenberg ITE map."""

from dataclasses import dataclass

from _common import run


@dataclass
class GammaSweepConfig:
    hamiltonian: str = "heis2q-shifted"
    betas: str = "0:1:0.05"
    workers: int = 4
    out: str = "results/gamma_sweep"


if __name__ == "__main__":
    raise SystemExit(run("gamma-sweep", GammaSweepConfig()))
