"""Quasiprobabilistic simulation of imaginary-time evolution."""

__version__ = "0.1.0"

from .basis import BasisSet, ebl_product, ebl_single_qubit, get_basis, takagi_two_qubit
from .channels import QuantumOperation, classify
from .ite import LocalHamiltonian, heisenberg_2q, heisenberg_chain_1d, ite_map, trotter_plan
from .qpd import QPDecomposition, solve_exact, solve_min_gamma
from .sampler import EstimatorResult, estimate, run_algorithm1, run_algorithm2

__all__ = [
    "BasisSet", "EstimatorResult", "LocalHamiltonian", "QPDecomposition", "QuantumOperation",
    "classify", "ebl_product", "ebl_single_qubit", "estimate", "get_basis", "heisenberg_2q",
    "heisenberg_chain_1d", "ite_map", "run_algorithm1", "run_algorithm2", "solve_exact",
    "solve_min_gamma", "takagi_two_qubit", "trotter_plan",
]
