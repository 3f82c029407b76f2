"""Projection of many-player kernels onto a pair of players."""

import numpy as np

from common.config import GAME_CONFIG
from common.errors import InputError
from deconv.kernel import ChoiceKernel
from model.spec import bundle_profiles


def project_to_pair(h: ChoiceKernel, i: int, j: int, depth: float = None) -> ChoiceKernel:
    """
    Kernel of players (i, j) with every other player's index sent to −∞.

    The limit is read off the most negative node of each projected axis, which
    must lie at or below `depth` (default −8). Players are 0-based.
    """
    depth = GAME_CONFIG["truncation_depth"] if depth is None else depth
    n = len(h.v_grids)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InputError(f"invalid player pair ({i}, {j}) for a {n}-player kernel")
    others = [k for k in range(n) if k not in (i, j)]
    for k in others:
        if h.v_grids[k].lo > depth:
            raise InputError(f"v grid of player {k} starts at {h.v_grids[k].lo}, above the truncation depth {depth}")

    pair_profiles = bundle_profiles(2)
    values = np.zeros((len(pair_profiles), h.v_grids[i].n, h.v_grids[j].n))
    selector = [0] * n
    for k in range(n):
        selector[k] = slice(None) if k in (i, j) else 0
    for row, profile in enumerate(h.outcomes):
        if any(profile[k] != 0 for k in others):
            continue
        block = h.values[(row,) + tuple(selector)]
        if i > j:
            block = block.T
        values[pair_profiles.index((profile[i], profile[j]))] += block
    return ChoiceKernel(
        outcomes=tuple(pair_profiles),
        w=h.w,
        v_grids=(h.v_grids[i], h.v_grids[j]),
        values=values,
        overshoot=h.overshoot,
    )
