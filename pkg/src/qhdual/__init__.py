"""Numerical duality between Barnes-type and power-type hypergeometric integrals."""

from .duality import connection_matrix, factors, gauss_reduction, verify_theorem1
from .integrals import I_asymptotic, I_matrix, J_asymptotic, J_matrix, selberg_A, selberg_B
from .params import Params, admissible_pairs, dual_params, make_params, region_flags
from .quad import IntegralResult, QuadConfig

__all__ = [
    "Params",
    "make_params",
    "dual_params",
    "admissible_pairs",
    "region_flags",
    "QuadConfig",
    "IntegralResult",
    "I_matrix",
    "J_matrix",
    "I_asymptotic",
    "J_asymptotic",
    "selberg_A",
    "selberg_B",
    "factors",
    "gauss_reduction",
    "verify_theorem1",
    "connection_matrix",
]

__version__ = "0.1.0"
