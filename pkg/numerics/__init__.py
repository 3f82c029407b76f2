"""
Numerical plumbing: Gaussian functions, quadrature, gridded calculus and regularized inversion
"""

from .gaussian import gaussian_pdf, gaussian_cdf
from .quadrature import hermite_quadrature, legendre_quadrature, integrate_until_converged
from .grids import Grid1D, GriddedFn, partial_derivative
from .regularization import (
    Tikhonov,
    TruncatedSVD,
    RegStrategy,
    RegularizedInverse,
    parse_strategy,
    build_inverse,
    regularized_solve,
)

__version__ = "1.0.0"
__all__ = [
    "gaussian_pdf",
    "gaussian_cdf",
    "hermite_quadrature",
    "legendre_quadrature",
    "integrate_until_converged",
    "Grid1D",
    "GriddedFn",
    "partial_derivative",
    "Tikhonov",
    "TruncatedSVD",
    "RegStrategy",
    "RegularizedInverse",
    "parse_strategy",
    "build_inverse",
    "regularized_solve",
]
