"""Sampled estimate next to its dense value for the 2-qubit and 4-site chain problems."""

from dataclasses import dataclass

from _common import run


@dataclass
class OracleConfig:
    experiment: str = "chain"
    steps: int = 1
    beta_step: float = 0.02
    n: int = 4
    r: int = 2
    seed: int = 0
    workers: int = 4
    out: str = "results/oracle"


if __name__ == "__main__":
    raise SystemExit(run("oracle", OracleConfig()))
