"""Screen for η surfaces that are affine or exponential in z₁."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from common.config import BETA_CONFIG
from .eta import EtaSurface

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegeneracyReport:
    degenerate: bool
    statistic: float
    witness: Optional[Tuple[float, float]]
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degenerate": self.degenerate,
            "statistic": self.statistic,
            "witness": None if self.witness is None else list(self.witness),
            "reason": self.reason,
        }


def valid_cells(surface: EtaSurface, margin: int = None) -> NDArray[np.bool_]:
    """Interior cells where |∂_{z₁}η̃| clears the gradient floor."""
    margin = BETA_CONFIG["interior_margin"] if margin is None else margin
    d1 = np.abs(surface.d1.values)
    mask = d1 > BETA_CONFIG["grad_fraction"] * d1.max()
    interior = np.zeros_like(mask)
    n1, n2 = mask.shape
    interior[margin:n1 - margin, margin:n2 - margin] = True
    return mask & interior


def check_degeneracy(surface: EtaSurface, tol: float = None, margin: int = None) -> DegeneracyReport:
    """
    Largest |∂_{z₁}(∂²η̃ / ∂η̃)|·L² over the interior, L the z₁ range.

    Affine η gives a zero ratio and exponential η a constant one, so both score ~0.
    """
    tol = BETA_CONFIG["degeneracy_tol"] if tol is None else tol
    margin = BETA_CONFIG["interior_margin"] if margin is None else margin
    d1 = surface.d1.values
    if np.max(np.abs(d1)) <= BETA_CONFIG["flat_tol"]:
        logger.warning("η surface is flat in z1")
        return DegeneracyReport(True, 0.0, None, "flat: ∂z1 η̃ vanishes on the whole grid")

    keep = np.abs(d1) > BETA_CONFIG["grad_fraction"] * np.max(np.abs(d1))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(keep, surface.d11.values / d1, np.nan)
    grid = surface.z1_grid
    slope = np.gradient(ratio, grid.spacing, axis=0, edge_order=2)
    score = np.abs(slope) * (grid.hi - grid.lo) ** 2

    interior = np.zeros_like(keep)
    n1 = keep.shape[0]
    interior[margin:n1 - margin, :] = True
    score = np.where(interior & np.isfinite(score), score, -np.inf)
    if not np.isfinite(score.max()):
        return DegeneracyReport(True, 0.0, None, "no interior cell with a usable z1 gradient")

    i, j = np.unravel_index(int(np.argmax(score)), score.shape)
    statistic = float(score[i, j])
    witness = (float(grid.nodes[i]), float(surface.z2_grid.nodes[j]))
    degenerate = statistic <= tol
    reason = "affine or exponential in z1" if degenerate else "non-degenerate"
    logger.info("degeneracy statistic %.3e at %s (%s)", statistic, witness, reason)
    return DegeneracyReport(degenerate, statistic, witness, reason)
