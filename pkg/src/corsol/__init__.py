"""Numerics for -y' + q(x) y = f(x) on the real line.

Green kernel and solution operator, the mass-window function d(x), the
asymptotic majorant of solutions, and verdicts on correct solvability,
tending in whole to zero and compactness of the inverse operator.
"""
from .coefficient import Coefficient, catalog, d_function, parse_coefficient, q0_estimate, r_covering
from .errors import CorsolError
from .green import LebesgueExponent, apply, green_norm, j_integral, kernel

__all__ = [
    "Coefficient", "CorsolError", "LebesgueExponent", "apply", "catalog", "d_function",
    "green_norm", "j_integral", "kernel", "parse_coefficient", "q0_estimate", "r_covering",
]
__version__ = "0.1.0"
