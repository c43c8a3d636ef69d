"""freespec: inclusion constants of free spectrahedra and noise robustness of
quantum measurement incompatibility, on a self-contained dense SDP solver."""

__version__ = "0.1.0"

from .errors import (ArityError, CapacityError, CatalogError, DomainError, FieldError, FreespecError,
                     NumericalFailure, UnboundedError)
from .linalg import MatrixTuple, ScalarField, lambda_max, psd_check
from .pencils import LinearPencil, Membership, cartesian, catalog, eval_L, membership
from .sdp import AUDIT, LmiProblem, SdpProblem, SolverConfig, Status, feasibility, solve
from .extremal import Verdict, classify, classify_cartesian, sample_extreme
from .inclusion import (feasible_point, four_lines_witness, gamma_closed_form, hkm_inclusion,
                        max_inclusion_scale, min_ball_gamma, pairing_value, theta_scan, witness_tuples)
from .quantum import (MeasurementSet, Povm, compatibility_degree, is_compatible, known_bounds,
                      min_compat_degree_seesaw, witness_measurements)
from .hierarchy import build_lasserre, build_npa, lasserre_bloch, npa_line_simplex, solve_relaxation

__all__ = [
    "ArityError", "CapacityError", "CatalogError", "DomainError", "FieldError", "FreespecError",
    "NumericalFailure", "UnboundedError",
    "MatrixTuple", "ScalarField", "lambda_max", "psd_check",
    "LinearPencil", "Membership", "cartesian", "catalog", "eval_L", "membership",
    "AUDIT", "LmiProblem", "SdpProblem", "SolverConfig", "Status", "feasibility", "solve",
    "Verdict", "classify", "classify_cartesian", "sample_extreme",
    "feasible_point", "four_lines_witness", "gamma_closed_form", "hkm_inclusion", "max_inclusion_scale",
    "min_ball_gamma", "pairing_value", "theta_scan", "witness_tuples",
    "MeasurementSet", "Povm", "compatibility_degree", "is_compatible", "known_bounds",
    "min_compat_degree_seesaw", "witness_measurements",
    "build_lasserre", "build_npa", "lasserre_bloch", "npa_line_simplex", "solve_relaxation",
]
