"""Energy of (e^{-0.01 H})^t |00> for t = 1..4 with 10 repetitions per step."""

from dataclasses import dataclass

from _common import run


@dataclass
class ITEEnergyConfig:
    steps: int = 4
    beta_step: float = 0.01
    schedule: str = "400,800,3200,25600"
    shots: int = 512
    reps: int = 10
    basis: str = "ebl-product"
    seed: int = 0
    workers: int = 4
    out: str = "results/ite_energy"


if __name__ == "__main__":
    raise SystemExit(run("ite-energy", ITEEnergyConfig()))
