"""
Inverse step for the choice kernel: discretized index densities, regularized deconvolution, threshold structure
"""

from .kernel import ChoiceKernel, build_kernel_matrix, close_kernel_rows, default_v_grid
from .inversion import DeconvDiagnostics, recover_h
from .threshold import GammaEstimate, recover_gamma

__version__ = "1.0.0"
__all__ = [
    "ChoiceKernel",
    "build_kernel_matrix",
    "close_kernel_rows",
    "default_v_grid",
    "DeconvDiagnostics",
    "recover_h",
    "GammaEstimate",
    "recover_gamma",
]
