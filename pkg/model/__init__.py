"""
Structural primitives and forward maps for binary, multinomial and bundle choice
"""

from .index import SignInfo, IndexModel, PointMassMixture, GaussianMixture, GDistribution
from .spec import ModelSpec, outcome_set, choice_given_draw, bundle_profiles, family_loadings
from .forward import CCPTable, ccp_exact, ccp_for_points, gaussian_choice_probs
from .simulation import ChoiceDataset, simulate, ccp_empirical

__version__ = "1.0.0"
__all__ = [
    "SignInfo",
    "IndexModel",
    "PointMassMixture",
    "GaussianMixture",
    "GDistribution",
    "ModelSpec",
    "outcome_set",
    "choice_given_draw",
    "bundle_profiles",
    "family_loadings",
    "CCPTable",
    "ccp_exact",
    "ccp_for_points",
    "gaussian_choice_probs",
    "ChoiceDataset",
    "simulate",
    "ccp_empirical",
]
