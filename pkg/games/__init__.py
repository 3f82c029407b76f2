"""
Two-action entry games of complete information: regions, exact CCPs and kernels
"""

from .structure import GameStructure, CONCEPTS
from .regions import (
    KinkSplit,
    MultiplicityCell,
    RegionMap,
    solve_profile,
    concept_thresholds,
    region_map,
    outcome_at,
    separation_conditions,
)
from .forward import GameCCPTable, game_ccp_exact, game_kernel
from .projection import project_to_pair

__version__ = "1.0.0"
__all__ = [
    "GameStructure",
    "CONCEPTS",
    "KinkSplit",
    "MultiplicityCell",
    "RegionMap",
    "solve_profile",
    "concept_thresholds",
    "region_map",
    "outcome_at",
    "separation_conditions",
    "GameCCPTable",
    "game_ccp_exact",
    "game_kernel",
    "project_to_pair",
]
