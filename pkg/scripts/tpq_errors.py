"""Thermal expectation errors of TPQ states, exact against sampled ITE.

The default stops at n = 6; n = 7, 8 need 409600 and 1638400 samples per state
and run for hours.
"""

from dataclasses import dataclass

from _common import run


@dataclass
class TPQConfig:
    n: str = "4,5,6"
    ite_exponent: float = 0.02
    states: int = 10
    paulis: int = 30
    mode: str = "both"
    seed: int = 0
    workers: int = 4
    out: str = "results/tpq"


if __name__ == "__main__":
    raise SystemExit(run("tpq", TPQConfig()))
