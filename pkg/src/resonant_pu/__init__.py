"""Operator algebra and classical dynamics of the resonant Pais-Uhlenbeck oscillator."""

from .errors import ResonantPUError
from .params import ModelParams, PhaseState, PUState, derive_params, sample_param_list, sample_params
from .weyl import WeylOp, commutator, compose, op_equal
from .states import GaussPolyState, apply_to_state, chain_seed, ground_state
from .algebra import Report, verify_identity_suite
from .spectrum import build_chain, eigenvalue_E
from .classical import combined_pair, definiteness_scan, integrate, propagator
from .factorization import effective_hamiltonian, factorize, lambda_region_scan

__all__ = [
    "ResonantPUError",
    "ModelParams",
    "PhaseState",
    "PUState",
    "derive_params",
    "sample_params",
    "sample_param_list",
    "WeylOp",
    "compose",
    "commutator",
    "op_equal",
    "GaussPolyState",
    "apply_to_state",
    "chain_seed",
    "ground_state",
    "Report",
    "verify_identity_suite",
    "build_chain",
    "eigenvalue_E",
    "combined_pair",
    "definiteness_scan",
    "integrate",
    "propagator",
    "effective_hamiltonian",
    "factorize",
    "lambda_region_scan",
]

__version__ = "0.1.0"
