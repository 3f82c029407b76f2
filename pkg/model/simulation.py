"""
Simulation Module - draws from a model and empirical CCP tables
Single Responsibility: provide the noisy sampling path next to the exact forward map
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from common.errors import InputError
from .forward import CCPTable
from .index import PointMassMixture
from .spec import ModelSpec, outcome_set

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChoiceDataset:
    """Simulated observations stored as indices into the spec's labels and grids."""

    y: NDArray[np.int64] = field(repr=False)
    w: NDArray[np.int64] = field(repr=False)
    z1: NDArray[np.int64] = field(repr=False)
    z2: NDArray[np.int64] = field(repr=False)
    seed: int

    def __len__(self) -> int:
        return int(self.y.size)


def _draw_g(component, size: int, rng: np.random.Generator) -> NDArray[np.float64]:
    which = rng.choice(len(component.probs), size=size, p=np.asarray(component.probs))
    if isinstance(component, PointMassMixture):
        return np.asarray(component.atoms, dtype=np.float64)[which]
    means = np.asarray(component.means)[which]
    scales = np.asarray(component.scales)[which]
    return means + scales * rng.standard_normal(means.shape)


def simulate(spec: ModelSpec, n: int, seed: int) -> ChoiceDataset:
    """
    Draw n observations: w, z₁ node and z₂ point uniformly, then e and g.

    Args:
        spec: Model to sample.
        n: Number of draws (at least 1).
        seed: Seed of the numpy Generator; equal seeds give equal datasets.

    Returns:
        ChoiceDataset
    """
    if n < 1:
        raise InputError(f"simulate needs n >= 1 (got {n})")
    rng = np.random.default_rng(seed)
    w_idx = rng.integers(len(spec.w_levels), size=n)
    z1_idx = rng.integers(spec.z1_grid.n, size=n)
    z2_idx = rng.integers(len(spec.z2_points), size=n)
    e = rng.standard_normal(n)

    g = np.empty((n, spec.n_alternatives))
    for k, w in enumerate(spec.w_levels):
        mask = w_idx == k
        g[mask] = _draw_g(spec.g.for_w(w), int(mask.sum()), rng)

    beta0 = np.asarray([spec.index.beta0[w] for w in spec.w_levels])[w_idx]
    beta1 = np.asarray([spec.index.beta1[w] for w in spec.w_levels])[w_idx]
    index = beta0 + beta1 * spec.z1_grid.nodes[z1_idx] + e
    loadings = np.stack([spec.loadings(k) for k in range(len(spec.z2_points))])[z2_idx]
    utilities = np.concatenate([np.zeros((n, 1)), spec.orientation * loadings * index[:, None] + g], axis=1)
    y = np.argmax(utilities, axis=1)
    logger.info("Simulated %d observations (seed=%d)", n, seed)
    return ChoiceDataset(y=y, w=w_idx, z1=z1_idx, z2=z2_idx, seed=seed)


def ccp_empirical(dataset: ChoiceDataset, spec: ModelSpec) -> CCPTable:
    """Cellwise frequencies; cells without observations stay NaN and are reported."""
    outcomes = outcome_set(spec)
    counts = np.zeros((len(outcomes), len(spec.w_levels), len(spec.z2_points), spec.z1_grid.n))
    np.add.at(counts, (dataset.y, dataset.w, dataset.z2, dataset.z1), 1.0)
    totals = counts.sum(axis=0)
    empty = totals == 0
    if empty.any():
        logger.warning("%d empty cells left unimputed", int(empty.sum()))
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(empty[None], np.nan, counts / np.where(empty, 1.0, totals)[None])
    return CCPTable(tuple(outcomes), tuple(spec.w_levels), tuple(map(tuple, spec.z2_points)), spec.z1_grid, values)
