"""Exact brute-force solvers and polynomial-time verifiers for Ising-type problems."""

__version__ = "0.1.0"

from .errors import CapExceededError, DimensionError, ValidationError
from .ising_core import (
    GroundStateResult,
    IsingInstance,
    SpinConfiguration,
    brute_force_ground,
    energy,
    has_zero_ground,
)
from .quantum_op import HamiltonianSpec, PauliString, SpectrumResult, build_matrix, compose, ground_eigen, quantize_ising
from .sat_reduction import CnfFormula, ReductionCertificate, decode, parse_dimacs, reduce_3sat, spin_count_bound

__all__ = [
    "CapExceededError", "CnfFormula", "DimensionError", "GroundStateResult", "HamiltonianSpec", "IsingInstance",
    "PauliString", "ReductionCertificate", "SpectrumResult", "SpinConfiguration", "ValidationError",
    "brute_force_ground", "build_matrix", "compose", "decode", "energy", "ground_eigen", "has_zero_ground",
    "parse_dimacs", "quantize_ising", "reduce_3sat", "spin_count_bound",
]
