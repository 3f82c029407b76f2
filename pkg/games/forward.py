"""
Forward Module - exact outcome probabilities and kernels for entry games
Single Responsibility: integrate region geometry against independent normal shocks
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import special

from common.errors import InputError
from deconv.kernel import ChoiceKernel
from numerics.grids import Grid1D
from numerics.quadrature import integrate_until_converged, legendre_quadrature
from .regions import Profile, RegionMap, region_map, solve_profile
from .structure import GameStructure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GameCCPTable:
    """μ(y | w, z₁, z₂) over Y = {0,1}²; values shaped (4, n_z1, n_z2)."""

    outcomes: Tuple[Profile, ...]
    w: str
    z_grids: Tuple[Grid1D, Grid1D]
    values: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        shape = (len(self.outcomes),) + tuple(g.n for g in self.z_grids)
        if values.shape != shape:
            raise InputError(f"game CCP shape {values.shape} does not match {shape}")
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "z_grids", tuple(self.z_grids))
        object.__setattr__(self, "values", np.clip(values, 0.0, 1.0))

    def outcome_index(self, y: Profile) -> int:
        try:
            return self.outcomes.index(tuple(y))
        except ValueError:
            raise InputError(f"outcome {y!r} not in {self.outcomes}") from None

    def surface(self, y: Profile) -> NDArray[np.float64]:
        return self.values[self.outcome_index(y)]

    def row_sums(self) -> NDArray[np.float64]:
        return self.values.sum(axis=0)


def _axis_cell_mass(rmap: RegionMap, axis: int, mean: NDArray[np.float64]) -> NDArray[np.float64]:
    edges = rmap.edges(axis)
    return np.stack([special.ndtr(hi - mean) - special.ndtr(lo - mean) for lo, hi in zip(edges[:-1], edges[1:])])


def _kink_above_mass(rmap: RegionMap, m1: NDArray[np.float64], m2: NDArray[np.float64]) -> NDArray[np.float64]:
    low, high = rmap.low, rmap.high
    if high[0] <= low[0]:
        return np.zeros((m1.size, m2.size))

    def evaluate(order: int) -> NDArray[np.float64]:
        t, wt = legendre_quadrature(order, low[0], high[0])
        density = np.exp(-0.5 * (t[:, None] - m1[None, :]) ** 2) / np.sqrt(2.0 * np.pi)
        line = rmap.kink.line(t)
        upper = special.ndtr(high[1] - m2)[None, :] - special.ndtr(line[:, None] - m2[None, :])
        return np.einsum("q,qa,qb->ab", wt, density, upper)

    values, _ = integrate_until_converged(evaluate)
    return values


def game_ccp_exact(game: GameStructure, z_grids: Sequence[Grid1D], w: str) -> GameCCPTable:
    """
    Outcome probabilities at every (z₁, z₂) node.

    Rectangular cells are products of normal interval masses; the diagonal cut of
    the collusion centre is integrated along v₁ with Gauss–Legendre.
    """
    if game.n_players != 2 or len(z_grids) != 2:
        raise InputError("game_ccp_exact handles two players with one z grid each")
    rmap = region_map(game, w)
    profiles = game.profiles()
    m1 = game.mean_shift(w, 0, z_grids[0].nodes)
    m2 = game.mean_shift(w, 1, z_grids[1].nodes)
    mass1, mass2 = _axis_cell_mass(rmap, 0, m1), _axis_cell_mass(rmap, 1, m2)

    values = np.zeros((len(profiles), m1.size, m2.size))
    for (i, j), dist in rmap.cells.items():
        cell = mass1[i][:, None] * mass2[j][None, :]
        if (i, j) == (1, 1) and rmap.kink is not None:
            above = np.clip(_kink_above_mass(rmap, m1, m2), 0.0, cell)
            values[profiles.index(rmap.kink.above)] += above
            values[profiles.index(rmap.kink.below)] += cell - above
            continue
        for profile, p in dist.items():
            values[profiles.index(profile)] += p * cell

    logger.info("Computed %s game CCPs on a %dx%d grid", game.concept, m1.size, m2.size)
    return GameCCPTable(tuple(profiles), w, tuple(z_grids), values)


def game_kernel(game: GameStructure, w: str, v_grids: Sequence[Grid1D]) -> ChoiceKernel:
    """Exact h₀(y, w, v) on a v grid (one axis per player)."""
    if len(v_grids) != game.n_players:
        raise InputError(f"need one v grid per player ({game.n_players})")
    profiles = game.profiles()
    shape = tuple(g.n for g in v_grids)

    if game.n_players == 2:
        rmap = region_map(game, w)
        v1, v2 = np.meshgrid(v_grids[0].nodes, v_grids[1].nodes, indexing="ij")
        values = rmap.probabilities(v1, v2, profiles)
    else:
        values = np.zeros((len(profiles),) + shape)
        nodes = [g.nodes for g in v_grids]
        for idx in product(*[range(n) for n in shape]):
            dist = solve_profile(game, w, [nodes[k][i] for k, i in enumerate(idx)])
            for profile, p in dist.items():
                values[(profiles.index(profile),) + idx] = p
    return ChoiceKernel(outcomes=tuple(profiles), w=w, v_grids=tuple(v_grids), values=values)
