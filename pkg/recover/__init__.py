"""
Structural recovery: heterogeneity CDF on rays, solution-concept classification and game payoffs
"""

from .fg import Ray, RaySetCDF, recover_fg, monotone_rearrangement, monotonicity_violation
from .concepts import (
    ThresholdEstimate,
    PayoffEstimate,
    ConceptReport,
    detect_thresholds,
    classify_concept,
    recover_payoffs,
    concept_report,
    UNCLASSIFIABLE,
)

__version__ = "1.0.0"
__all__ = [
    "Ray",
    "RaySetCDF",
    "recover_fg",
    "monotone_rearrangement",
    "monotonicity_violation",
    "ThresholdEstimate",
    "PayoffEstimate",
    "ConceptReport",
    "detect_thresholds",
    "classify_concept",
    "recover_payoffs",
    "concept_report",
    "UNCLASSIFIABLE",
]
