"""
Concepts Module - solution concept and payoffs from a recovered game kernel
Single Responsibility: locate region thresholds, classify the concept and invert the threshold formulas
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from common.config import GAME_CONFIG
from common.errors import DetectionError, IdentificationError, InputError
from common.utils import label_to_text
from deconv.kernel import ChoiceKernel
from numerics.grids import Grid1D

logger = logging.getLogger(__name__)

PAIRS = {
    ((0, 0), (1, 1)): "outer_inner",
    ((0, 0), (1, 0)): "outer_partial",
}
UNCLASSIFIABLE = "unclassifiable"


@dataclass(frozen=True)
class ThresholdEstimate:
    """Per-axis outer (rival out) and inner (rival in) entry thresholds; NaN where not observed."""

    outer: Tuple[float, float]
    inner: Tuple[float, float]
    spacing: Tuple[float, float]
    pair: Tuple[tuple, tuple]

    @property
    def widths(self) -> NDArray[np.float64]:
        return np.asarray(self.inner) - np.asarray(self.outer)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pair": [label_to_text(p) for p in self.pair],
            "outer": [_finite_or_none(x) for x in self.outer],
            "inner": [_finite_or_none(x) for x in self.inner],
            "widths": [_finite_or_none(x) for x in self.widths],
            "spacing": list(self.spacing),
        }


@dataclass
class PayoffEstimate:
    """Payoffs implied by the thresholds, valid given the index intercepts used for inversion."""

    concept: str
    alpha: Optional[Tuple[float, float]] = None
    delta: Optional[Tuple[float, float]] = None
    delta_sum: Optional[float] = None
    composite: Optional[Tuple[float, float]] = None
    note: str = "identified up to beta0: conditioned on the index law used for deconvolution"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "concept": self.concept,
            "alpha": None if self.alpha is None else [_finite_or_none(x) for x in self.alpha],
            "delta": None if self.delta is None else [_finite_or_none(x) for x in self.delta],
            "delta_sum": self.delta_sum,
            "composite": None if self.composite is None else list(self.composite),
            "note": self.note,
        }


@dataclass
class ConceptReport:
    concept: str
    thresholds: ThresholdEstimate
    squareness: float
    tolerance: float
    payoffs: Optional[PayoffEstimate] = None
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "concept": self.concept,
            "thresholds": self.thresholds.to_dict(),
            "squareness": _finite_or_none(self.squareness),
            "tolerance": self.tolerance,
            "payoffs": None if self.payoffs is None else self.payoffs.to_dict(),
            "flags": list(self.flags),
        }


def _finite_or_none(x: float) -> Optional[float]:
    return float(x) if np.isfinite(x) else None


def _crossing(nodes: NDArray[np.float64], values: NDArray[np.float64], where: str) -> float:
    """
    0.5-level crossing by linear interpolation.

    With several crossings the one with the largest jump between neighbouring nodes wins;
    equal jumps go to the first along the line.
    """
    shifted = values - 0.5
    above = shifted > 0.0
    change = np.nonzero(above[:-1] != above[1:])[0]
    if change.size == 0:
        raise DetectionError(f"no 0.5 crossing of the kernel along {where}")
    k = change[np.argmax(np.abs(values[change + 1] - values[change]))]
    t = shifted[k] / (shifted[k] - shifted[k + 1])
    return float(nodes[k] + t * (nodes[k + 1] - nodes[k]))


def _line_indices(n: int, depth: float) -> Tuple[int, int]:
    low = int(round(depth * (n - 1)))
    return low, n - 1 - low


def _lines_at(grid: Grid1D, low: float, high: float) -> Tuple[int, int]:
    return grid.nearest_index(low), grid.nearest_index(high)


def _read_thresholds(h2: ChoiceKernel, pair: Tuple[tuple, tuple],
                     lines: Tuple[Tuple[int, int], Tuple[int, int]]) -> Tuple[float, float, float, float]:
    """(a1, a2, b1, b2) from crossings along the given (low, high) line indices per axis."""
    g1, g2 = h2.v_grids
    v1, v2 = g1.nodes, g2.nodes
    (low1, high1), (low2, high2) = lines

    empty = h2.get((0, 0))
    a1 = _crossing(v1, empty[:, low2], f"v1 at v2={v2[low2]:.3g} for (0,0)")
    a2 = _crossing(v2, empty[low1, :], f"v2 at v1={v1[low1]:.3g} for (0,0)")
    if pair[1] == (1, 1):
        both = h2.get((1, 1))
        b1 = _crossing(v1, both[:, high2], f"v1 at v2={v2[high2]:.3g} for (1,1)")
        b2 = _crossing(v2, both[high1, :], f"v2 at v1={v1[high1]:.3g} for (1,1)")
    else:
        first_only = h2.get((1, 0))
        b1 = float("nan")
        b2 = _crossing(v2, first_only[high1, :], f"v2 at v1={v1[high1]:.3g} for (1,0)")
    return a1, a2, b1, b2


def _dominant(grids: Sequence[Grid1D], lines, thresholds: Tuple[float, float, float, float]) -> bool:
    """Every low line below both thresholds of its axis, every high line above them."""
    a1, a2, b1, b2 = thresholds
    for grid, (low, high), (a, b) in zip(grids, lines, ((a1, b1), (a2, b2))):
        bounds = np.array([a, b])
        if not (grid.nodes[low] < np.nanmin(bounds) and grid.nodes[high] > np.nanmax(bounds)):
            return False
    return True


def detect_thresholds(h2: ChoiceKernel, pair: Tuple[tuple, tuple] = ((0, 0), (1, 1)),
                      depth: float = None, margin: float = None) -> ThresholdEstimate:
    """
    Thresholds from 0.5-level crossings along lines deep in the other axis's dominant region.

    (0,0) along low lines gives the outer thresholds a₁, a₂; (1,1) along high lines gives
    the inner thresholds b₁, b₂. The (0,0)/(1,0) pair gives a₁, a₂ and b₂ only.

    Lines sit at `depth` (default 0.25) of each grid from its ends. When a line misses
    its crossing or lands between the thresholds of its axis, the thresholds are first
    read on lines `margin` (default 0.5) inside the grid ends, then re-read on lines
    halfway between each grid end and the nearer threshold.

    Raises:
        DetectionError: a kernel never crosses 0.5 on its line.
    """
    depth = GAME_CONFIG["line_depth"] if depth is None else depth
    margin = GAME_CONFIG["edge_margin"] if margin is None else margin
    pair = (tuple(pair[0]), tuple(pair[1]))
    if pair not in PAIRS:
        raise InputError(f"outcome pair {pair} is not implemented; use (0,0)/(1,1) or (0,0)/(1,0)")
    if len(h2.v_grids) != 2:
        raise InputError("threshold detection needs a kernel over (v1, v2)")
    grids = h2.v_grids

    lines = tuple(_line_indices(g.n, depth) for g in grids)
    try:
        thresholds = _read_thresholds(h2, pair, lines)
    except DetectionError as e:
        logger.info("Threshold lines at depth %.2f failed (%s); moving to the grid ends", depth, e)
        thresholds = None
    if thresholds is None or not _dominant(grids, lines, thresholds):
        edge = tuple(_lines_at(g, g.lo + margin, g.hi - margin) for g in grids)
        rough = _read_thresholds(h2, pair, edge)
        a1, a2, b1, b2 = rough
        lines = tuple(
            _lines_at(g, 0.5 * (g.lo + np.nanmin([a, b])), 0.5 * (g.hi + np.nanmax([a, b])))
            for g, (a, b) in zip(grids, ((a1, b1), (a2, b2)))
        )
        thresholds = _read_thresholds(h2, pair, lines)

    a1, a2, b1, b2 = thresholds
    estimate = ThresholdEstimate((a1, a2), (b1, b2), (grids[0].spacing, grids[1].spacing), pair)
    logger.info("Detected thresholds outer=(%.4f, %.4f) inner=(%.4f, %.4f)", a1, a2, b1, b2)
    return estimate


def default_tolerance(estimate: ThresholdEstimate) -> float:
    return GAME_CONFIG["classify_spacings"] * max(estimate.spacing)


def classify_concept(estimate: ThresholdEstimate, tolerance: float = None) -> str:
    """
    minimax when inner and outer thresholds coincide on both axes; collusion when the
    two widths agree (square central region); rationalizability otherwise.
    """
    tolerance = default_tolerance(estimate) if tolerance is None else tolerance
    widths = estimate.widths
    if not np.all(np.isfinite(estimate.outer)):
        return UNCLASSIFIABLE
    if estimate.pair == ((0, 0), (1, 0)):
        # one inner threshold only: coincidence on axis 2 is all that can be checked
        return "minimax" if np.isfinite(widths[1]) and abs(widths[1]) <= tolerance else UNCLASSIFIABLE
    if not np.all(np.isfinite(widths)):
        return UNCLASSIFIABLE
    if np.all(np.abs(widths) <= tolerance):
        return "minimax"
    if abs(widths[0] - widths[1]) <= tolerance:
        return "collusion"
    return "rationalizability"


def recover_payoffs(concept: str, estimate: ThresholdEstimate, tolerance: float = None) -> PayoffEstimate:
    """
    Invert the threshold formulas.

    rationalizability: α̂ᵢ = −aᵢ, δ̂ᵢⱼ = aᵢ − bᵢ.
    collusion: α̂ᵢ = −aᵢ, δ̂₁₂ + δ̂₂₁ = aᵢ − bᵢ (both axes must agree).
    minimax: only αᵢ + min{δᵢⱼ, 0} = −cᵢ.
    """
    tolerance = default_tolerance(estimate) if tolerance is None else tolerance
    outer = np.asarray(estimate.outer)
    inner = np.asarray(estimate.inner)
    if concept == "rationalizability":
        delta = outer - inner
        return PayoffEstimate(concept, alpha=tuple(-outer), delta=tuple(delta))
    if concept == "collusion":
        sums = outer - inner
        if abs(sums[0] - sums[1]) > tolerance:
            raise IdentificationError(
                f"collusion thresholds disagree on the interaction sum: {sums[0]:.4f} vs {sums[1]:.4f}"
            )
        return PayoffEstimate(concept, alpha=tuple(-outer), delta_sum=float(np.mean(sums)))
    if concept == "minimax":
        both = np.vstack([outer, inner])
        c = np.where(np.isfinite(both), both, np.nan)
        composite = -np.nanmean(c, axis=0)
        return PayoffEstimate(concept, composite=tuple(float(x) for x in composite))
    raise InputError(f"cannot recover payoffs for concept {concept!r}")


def concept_report(h2: ChoiceKernel, pair: Tuple[tuple, tuple] = ((0, 0), (1, 1)),
                   tolerance: float = None) -> ConceptReport:
    """detect_thresholds → classify_concept → recover_payoffs in one call."""
    estimate = detect_thresholds(h2, pair)
    tolerance = default_tolerance(estimate) if tolerance is None else tolerance
    concept = classify_concept(estimate, tolerance)
    widths = estimate.widths
    squareness = float(abs(widths[0] - widths[1]))
    flags = []
    payoffs = None
    if concept == UNCLASSIFIABLE:
        logger.warning("Threshold geometry does not match any solution concept")
        flags.append(UNCLASSIFIABLE)
    else:
        payoffs = recover_payoffs(concept, estimate, tolerance)
    return ConceptReport(concept, estimate, squareness, tolerance, payoffs, flags)
