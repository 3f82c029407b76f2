"""
Identification of the Gaussian index coefficients from derivative identities of the CCP surface
"""

from .eta import EtaSurface, build_eta
from .degeneracy import DegeneracyReport, check_degeneracy, valid_cells
from .identify import (
    BetaEstimate,
    SignEstimate,
    identify_beta,
    identity_residual,
    identify_beta1_sign_multinomial,
    resolve_signs,
)

__version__ = "1.0.0"
__all__ = [
    "EtaSurface",
    "build_eta",
    "DegeneracyReport",
    "check_degeneracy",
    "valid_cells",
    "BetaEstimate",
    "SignEstimate",
    "identify_beta",
    "identity_residual",
    "identify_beta1_sign_multinomial",
    "resolve_signs",
]
