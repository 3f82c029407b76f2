"""
Regions Module - outcome geometry of two-action entry games
Single Responsibility: solve a game at a latent-index draw and map the (v1, v2) plane into outcome regions
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from common.errors import InputError
from common.utils import label_to_text
from numerics.grids import Grid1D
from .structure import CONCEPTS, GameStructure

logger = logging.getLogger(__name__)

Profile = Tuple[int, ...]
Distribution = Dict[Profile, float]


def _gain(alpha: NDArray, delta: NDArray, v: Sequence[float], i: int, profile: Profile) -> float:
    others = sum(delta[i, j] * profile[j] for j in range(len(profile)) if j != i)
    return float(alpha[i] + v[i] + others)


def _rationalizable(game: GameStructure, alpha, delta, v, profiles) -> Distribution:
    survivors = [{0, 1} for _ in range(game.n_players)]
    changed = True
    while changed:
        changed = False
        for i in range(game.n_players):
            if len(survivors[i]) == 1:
                continue
            gains = []
            for rest in product(*[sorted(s) for j, s in enumerate(survivors) if j != i]):
                profile = list(rest)
                profile.insert(i, 1)
                gains.append(_gain(alpha, delta, v, i, tuple(profile)))
            if min(gains) > 0.0:
                survivors[i], changed = {1}, True
            elif max(gains) <= 0.0:
                survivors[i], changed = {0}, True

    alive = [p for p in profiles if all(p[i] in survivors[i] for i in range(game.n_players))]
    if len(alive) == 1:
        return {alive[0]: 1.0}

    def is_equilibrium(p: Profile) -> bool:
        for i in range(game.n_players):
            entered = tuple(1 if j == i else p[j] for j in range(len(p)))
            g = _gain(alpha, delta, v, i, entered)
            if (p[i] == 1 and g < 0.0) or (p[i] == 0 and g > 0.0):
                return False
        return True

    equilibria = [p for p in alive if is_equilibrium(p)]
    lam = game.selection
    if len(equilibria) >= 2:
        first, second = equilibria[0], equilibria[-1]
    elif len(equilibria) == 1:
        return {equilibria[0]: 1.0}
    elif len(alive) >= 3:
        first, second = alive[1], alive[-2]
    else:
        first, second = alive[0], alive[-1]
    return {first: lam, second: 1.0 - lam}


def solve_profile(game: GameStructure, w: str, v: Sequence[float]) -> Distribution:
    """
    Outcome distribution prescribed by the game's solution concept at index values v.

    minimax: enter iff the worst-case payoff is positive.
    collusion: maximize the sum of payoffs; ties go to fewer entrants, then to the earlier
        profile in bundle_profiles order.
    rationalizability: iterated strict dominance; when several profiles survive,
        the selection weight goes to the first of two pure equilibria.
    """
    if len(v) != game.n_players:
        raise InputError(f"expected {game.n_players} index values, got {len(v)}")
    alpha, delta = game.alpha_vec(w), game.delta_mat(w)
    profiles = game.profiles()

    if game.concept == "minimax":
        worst = alpha + np.asarray(v, dtype=np.float64) + np.minimum(delta, 0.0).sum(axis=1)
        return {tuple(int(x > 0.0) for x in worst): 1.0}

    if game.concept == "collusion":
        totals = [sum(p[i] * _gain(alpha, delta, v, i, p) for i in range(game.n_players)) for p in profiles]
        best = max(totals)
        winners = [p for p, t in zip(profiles, totals) if t == best]
        winner = min(winners, key=lambda p: (sum(p), profiles.index(p)))
        return {winner: 1.0}

    if game.concept == "rationalizability":
        return _rationalizable(game, alpha, delta, v, profiles)
    raise InputError(f"unknown solution concept {game.concept!r}; expected one of {CONCEPTS}")


def concept_thresholds(game: GameStructure, w: str) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Per-axis (a, b): entry threshold when the rival stays out, and when it enters.

    minimax: a = b = c; collusion: a, b with b − a = −(δ₁₂+δ₂₁); rationalizability: ã, b̃.
    """
    if game.n_players != 2:
        raise InputError("region geometry is defined for two players")
    alpha, delta = game.alpha_vec(w), game.delta_mat(w)
    d12, d21 = delta[0, 1], delta[1, 0]
    if game.concept == "minimax":
        c = -alpha - np.minimum(np.array([d12, d21]), 0.0)
        return c, c.copy()
    if game.concept == "collusion":
        a = -alpha
        return a, a - (d12 + d21)
    if game.concept == "rationalizability":
        a = -alpha
        return a, a - np.array([d12, d21])
    raise InputError(f"unknown solution concept {game.concept!r}; expected one of {CONCEPTS}")


@dataclass(frozen=True)
class KinkSplit:
    """Diagonal cut of the central cell: n·v > offset is 'above'."""

    normal: Tuple[float, float]
    offset: float
    below: Profile
    above: Profile

    def is_above(self, v1: ArrayLike, v2: ArrayLike) -> NDArray[np.bool_]:
        return self.normal[0] * np.asarray(v1) + self.normal[1] * np.asarray(v2) > self.offset

    def line(self, v1: ArrayLike) -> NDArray[np.float64]:
        return (self.offset - self.normal[0] * np.asarray(v1)) / self.normal[1]


@dataclass(frozen=True)
class MultiplicityCell:
    """Central rectangle where the concept does not pin down one outcome."""

    x_interval: Tuple[float, float]
    y_interval: Tuple[float, float]
    outcomes: Tuple[Profile, Profile]
    weights: Tuple[float, float]


@dataclass(frozen=True)
class RegionMap:
    """
    Partition of the (v1, v2) plane into the 3×3 cells cut by (low, high) per axis.

    A point exactly on a threshold belongs to the cell below it.
    """

    concept: str
    w: str
    a: Tuple[float, float]
    b: Tuple[float, float]
    cells: Dict[Tuple[int, int], Distribution] = field(repr=False)
    kink: Optional[KinkSplit] = None
    multiplicity: Optional[MultiplicityCell] = None

    @property
    def low(self) -> Tuple[float, float]:
        return tuple(min(x, y) for x, y in zip(self.a, self.b))

    @property
    def high(self) -> Tuple[float, float]:
        return tuple(max(x, y) for x, y in zip(self.a, self.b))

    def edges(self, axis: int) -> List[float]:
        return [-np.inf, self.low[axis], self.high[axis], np.inf]

    def cell_index(self, axis: int, v: ArrayLike) -> NDArray[np.int64]:
        # a point on a threshold belongs to the cell below it
        return np.searchsorted([self.low[axis], self.high[axis]], np.asarray(v, dtype=np.float64), side="left")

    def probabilities(self, v1: ArrayLike, v2: ArrayLike, profiles: Sequence[Profile]) -> NDArray[np.float64]:
        """Outcome probabilities at broadcast (v1, v2); shape (n_profiles,) + broadcast shape."""
        v1, v2 = np.broadcast_arrays(np.asarray(v1, dtype=np.float64), np.asarray(v2, dtype=np.float64))
        r, c = self.cell_index(0, v1), self.cell_index(1, v2)
        out = np.zeros((len(profiles),) + v1.shape)
        for (i, j), dist in self.cells.items():
            mask = (r == i) & (c == j)
            if (i, j) == (1, 1) and self.kink is not None:
                above = self.kink.is_above(v1, v2)
                out[profiles.index(self.kink.above)] += mask & above
                out[profiles.index(self.kink.below)] += mask & ~above
                continue
            for profile, p in dist.items():
                out[profiles.index(profile)] += p * mask
        return out

    def distribution_at(self, v1: float, v2: float) -> Distribution:
        profiles = [(0, 0), (1, 0), (0, 1), (1, 1)]
        probs = self.probabilities(v1, v2, profiles)
        return {p: float(x) for p, x in zip(profiles, probs) if x > 0.0 or self._mixed_at(p, v1, v2)}

    def _mixed_at(self, profile: Profile, v1: float, v2: float) -> bool:
        m = self.multiplicity
        if m is None or profile not in m.outcomes:
            return False
        return bool(self.cell_index(0, v1) == 1 and self.cell_index(1, v2) == 1)

    def to_dict(self) -> Dict:
        return {
            "concept": self.concept,
            "w": self.w,
            "thresholds": {"a": list(self.a), "b": list(self.b), "low": list(self.low), "high": list(self.high)},
            "cells": {
                f"{i},{j}": {label_to_text(p): prob for p, prob in dist.items()}
                for (i, j), dist in sorted(self.cells.items())
            },
            "kink": None if self.kink is None else {
                "normal": list(self.kink.normal),
                "offset": self.kink.offset,
                "below": label_to_text(self.kink.below),
                "above": label_to_text(self.kink.above),
            },
            "multiplicity": None if self.multiplicity is None else {
                "x_interval": list(self.multiplicity.x_interval),
                "y_interval": list(self.multiplicity.y_interval),
                "outcomes": [label_to_text(p) for p in self.multiplicity.outcomes],
                "weights": list(self.multiplicity.weights),
            },
        }

    def raster(self, grid1: Grid1D, grid2: Grid1D) -> List[Dict]:
        """Rows (v1, v2, outcome, probability) for plotting."""
        profiles = [(0, 0), (1, 0), (0, 1), (1, 1)]
        v1, v2 = np.meshgrid(grid1.nodes, grid2.nodes, indexing="ij")
        probs = self.probabilities(v1, v2, profiles)
        rows = []
        for a in range(grid1.n):
            for b in range(grid2.n):
                for k, p in enumerate(profiles):
                    rows.append({"v1": v1[a, b], "v2": v2[a, b], "y": label_to_text(p), "h": probs[k, a, b]})
        return rows


def _representative(low: float, high: float, cell: int) -> float:
    if cell == 0:
        return low - 1.0
    if cell == 2:
        return high + 1.0
    return 0.5 * (low + high)


def region_map(game: GameStructure, w: str) -> RegionMap:
    """Thresholds, cell labels, and the kink or multiplicity structure of the central cell."""
    a, b = concept_thresholds(game, w)
    low, high = np.minimum(a, b), np.maximum(a, b)

    cells: Dict[Tuple[int, int], Distribution] = {}
    for i in range(3):
        for j in range(3):
            point = (_representative(low[0], high[0], i), _representative(low[1], high[1], j))
            cells[(i, j)] = solve_profile(game, w, point)

    kink = None
    multiplicity = None
    alpha, delta = game.alpha_vec(w), game.delta_mat(w)
    if game.concept == "collusion":
        total = delta[0, 1] + delta[1, 0]
        if total < 0.0:
            normal, offset = (-1.0, 1.0), float(alpha[0] - alpha[1])
        elif total > 0.0:
            normal, offset = (1.0, 1.0), float(-total - alpha[0] - alpha[1])
        else:
            normal = None
        if normal is not None:
            centre = 0.5 * (low + high)
            step = 0.25 * (high[0] - low[0]) * np.asarray(normal) / np.hypot(*normal)
            below = solve_profile(game, w, tuple(centre - step))
            above = solve_profile(game, w, tuple(centre + step))
            kink = KinkSplit(normal, offset, next(iter(below)), next(iter(above)))
            cells[(1, 1)] = {}
    elif game.concept == "rationalizability":
        centre = cells[(1, 1)]
        if len(centre) == 2 and np.all(high > low):
            (first, p1), (second, p2) = centre.items()
            multiplicity = MultiplicityCell(
                x_interval=(float(low[0]), float(high[0])),
                y_interval=(float(low[1]), float(high[1])),
                outcomes=(first, second),
                weights=(p1, p2),
            )

    logger.debug("region map for %s at w=%s: low=%s high=%s", game.concept, w, low, high)
    return RegionMap(
        concept=game.concept,
        w=w,
        a=tuple(float(x) for x in a),
        b=tuple(float(x) for x in b),
        cells=cells,
        kink=kink,
        multiplicity=multiplicity,
    )


def outcome_at(game: GameStructure, w: str, v1: float, v2: float) -> Distribution:
    """Outcome distribution over {0,1}² at (v1, v2)."""
    return region_map(game, w).distribution_at(v1, v2)


def separation_conditions(game: GameStructure, w: str) -> Dict[str, bool]:
    """Whether the (0,0)/(1,1) thresholds separate each pair of concepts at w."""
    a_col, b_col = concept_thresholds(game.with_concept("collusion"), w)
    a_rat, b_rat = concept_thresholds(game.with_concept("rationalizability"), w)
    width_col, width_rat = b_col - a_col, b_rat - a_rat
    return {
        "minimax_vs_collusion": bool(np.any(a_col != b_col)),
        "minimax_vs_rationalizability": bool(np.any(a_rat != b_rat)),
        "rationalizability_vs_collusion": bool(width_rat[1] * width_col[0] != width_col[1] * width_rat[0]),
    }
