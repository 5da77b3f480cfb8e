"""Analysis of periodic Riccati difference equations x_{n+1} = (a_n x_n + b_n)/(c_n x_n + d_n)."""
from .analyzer import DEFAULT_DEPTH, characteristic, classify, forbidden_set, reduce, theta_rationality
from .mobius import POLE, Matrix2, apply, inverse, multiply, partial_product, power_closed_form
from .numeric import QuadExt, format_scalar, parse_scalar
from .orbit import OrbitTrace, PrecisionWarning, iterate
from .special import SumModel, build_M, classify_b0, forbidden_b0, tilde_coeffs
from .system import InvalidSystemError, PeriodicSystem

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_DEPTH",
    "InvalidSystemError",
    "Matrix2",
    "OrbitTrace",
    "POLE",
    "PeriodicSystem",
    "PrecisionWarning",
    "QuadExt",
    "SumModel",
    "apply",
    "build_M",
    "characteristic",
    "classify",
    "classify_b0",
    "forbidden_b0",
    "forbidden_set",
    "format_scalar",
    "inverse",
    "iterate",
    "multiply",
    "parse_scalar",
    "partial_product",
    "power_closed_form",
    "reduce",
    "tilde_coeffs",
    "theta_rationality",
]
