"""
Threshold Module - threshold-crossing structure of binary kernels
Single Responsibility: test h(1, w, v) = 1{γ(w) + v ≥ 0} and read off γ(w)
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from scipy import ndimage

from common.config import GAMMA_CONFIG
from common.errors import InputError
from .kernel import ChoiceKernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GammaEstimate:
    w: str
    is_step: bool
    gamma: Optional[float]
    crossing: Optional[float]
    max_deviation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w": self.w,
            "is_step": self.is_step,
            "gamma": self.gamma,
            "crossing": self.crossing,
            "max_deviation": self.max_deviation,
        }


def _first_upcrossing(h: np.ndarray) -> Optional[int]:
    above = np.nonzero(h >= 0.5)[0]
    if above.size == 0 or above[0] == 0:
        return None
    return int(above[0])


def _step_deviation(v: np.ndarray, values: np.ndarray, crossing: float, halfwidth: float) -> float:
    """Largest running-median distance from the step, outside the transition window."""
    residual = values - (v >= crossing).astype(np.float64)
    spacing = float(v[1] - v[0])
    window = 2 * max(int(round(halfwidth / spacing)), 1) + 1
    settled = ndimage.median_filter(residual, size=window, mode="nearest")
    outside = np.abs(v - crossing) > halfwidth
    return float(np.max(np.abs(settled[outside]))) if outside.any() else float("nan")


def _single(h: ChoiceKernel, band: float, halfwidth: float) -> GammaEstimate:
    if len(h.v_grids) != 1 or 1 not in h.outcomes:
        raise InputError("threshold structure needs a one-index kernel with outcome 1")
    v = h.v_grid.nodes
    values = h.get(1)
    k = _first_upcrossing(values)
    if k is None:
        logger.info("No 0.5 up-crossing of h(1, %s, .) on the grid", h.w)
        return GammaEstimate(h.w, False, None, None, float("nan"))

    t = (0.5 - values[k - 1]) / (values[k] - values[k - 1])
    crossing = float(v[k - 1] + t * (v[k] - v[k - 1]))
    deviation = _step_deviation(v, values, crossing, halfwidth)
    has_plateaus = bool(np.any(v < crossing - halfwidth) and np.any(v > crossing + halfwidth))
    is_step = has_plateaus and deviation <= band
    gamma = -crossing if is_step else None
    logger.info("w=%s: crossing at v=%.4f, step deviation %.3f (%s)", h.w, crossing, deviation,
                "threshold structure" if is_step else "not a step")
    return GammaEstimate(h.w, is_step, gamma, crossing, deviation)


def recover_gamma(kernels: Union[ChoiceKernel, Sequence[ChoiceKernel]], band: float = None,
                  halfwidth: float = None) -> Dict[str, GammaEstimate]:
    """
    γ̂(w) for each binary kernel, or no γ̂ when h(1, w, ·) is not a 0→1 step.

    Args:
        kernels: One kernel per w level.
        band: Allowed distance from the step away from the transition (default 0.1).
        halfwidth: Half-width of the transition window excluded from the band test; also the
            half-width of the running median that absorbs ringing left by the inversion.
    """
    band = GAMMA_CONFIG["step_band"] if band is None else band
    halfwidth = GAMMA_CONFIG["transition_halfwidth"] if halfwidth is None else halfwidth
    if isinstance(kernels, ChoiceKernel):
        kernels = [kernels]
    return {h.w: _single(h, band, halfwidth) for h in kernels}
