"""
Forward Module - exact conditional choice probabilities
Single Responsibility: integrate choice probabilities over e and g for a known model
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import special

from common.config import QUADRATURE_CONFIG
from common.errors import InputError
from common.utils import Label, parallel_map
from numerics.grids import Grid1D
from numerics.quadrature import hermite_quadrature, integrate_until_converged, legendre_quadrature
from .index import GaussianMixture, PointMassMixture
from .spec import ModelSpec, outcome_set

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class CCPTable:
    """μ(y | w, z₂, z₁) on the grid; values shaped (y, w, z2 point, z1 node).

    NaN marks a cell with no observations (empirical tables only).
    """

    outcomes: Tuple[Label, ...]
    w_levels: Tuple[str, ...]
    z2_points: Tuple[Tuple[float, ...], ...]
    z1_grid: Grid1D
    values: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        shape = (len(self.outcomes), len(self.w_levels), len(self.z2_points), self.z1_grid.n)
        if values.shape != shape:
            raise InputError(f"CCP values shape {values.shape} does not match {shape}")
        observed = values[~np.isnan(values)]
        if observed.size and (observed.min() < -1e-12 or observed.max() > 1 + 1e-12):
            raise InputError("CCP values must lie in [0, 1]")
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "w_levels", tuple(self.w_levels))
        object.__setattr__(self, "z2_points", tuple(tuple(float(x) for x in p) for p in self.z2_points))
        object.__setattr__(self, "values", np.clip(values, 0.0, 1.0))

    def outcome_index(self, y: Label) -> int:
        try:
            return self.outcomes.index(y)
        except ValueError:
            raise InputError(f"outcome {y!r} not in {self.outcomes}") from None

    def w_index(self, w: str) -> int:
        try:
            return self.w_levels.index(w)
        except ValueError:
            raise InputError(f"w level {w!r} not in {self.w_levels}") from None

    def series(self, y: Label, w: str, z2_index: int) -> NDArray[np.float64]:
        """μ(y | w, z₂ point, ·) along the z₁ grid."""
        return self.values[self.outcome_index(y), self.w_index(w), z2_index]

    def row_sums(self) -> NDArray[np.float64]:
        return self.values.sum(axis=0)

    def missing(self) -> NDArray[np.bool_]:
        return np.isnan(self.values).any(axis=0)


def _interval_mass(lo: float, hi: float, mean: NDArray[np.float64]) -> NDArray[np.float64]:
    # P(lo < m + e <= hi); ndtr accepts ±inf
    return special.ndtr(hi - mean) - special.ndtr(lo - mean)


def _atom_intervals(slopes: NDArray[np.float64], intercepts: NDArray[np.float64]) -> List[Tuple[float, float, int]]:
    """Split the index line into intervals with a constant winning alternative.

    Utilities are slopes·s + intercepts for inside goods and 0 for the outside option.
    """
    a = np.concatenate(([0.0], slopes))
    b = np.concatenate(([0.0], intercepts))
    breaks = set()
    for k in range(a.size):
        for j in range(k + 1, a.size):
            if a[k] != a[j] and np.isfinite(b[k]) and np.isfinite(b[j]):
                breaks.add(float((b[j] - b[k]) / (a[k] - a[j])))
    edges = [-np.inf] + sorted(breaks) + [np.inf]

    intervals = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if np.isfinite(lo) and np.isfinite(hi):
            mid = 0.5 * (lo + hi)
        elif np.isfinite(hi):
            mid = hi - 1.0
        elif np.isfinite(lo):
            mid = lo + 1.0
        else:
            mid = 0.0
        with np.errstate(invalid="ignore"):
            utilities = np.where(a == 0.0, b, a * mid + b)
        intervals.append((lo, hi, int(np.argmax(utilities))))
    return intervals


def _point_mass_probs(component: PointMassMixture, slopes: NDArray[np.float64],
                      mean: NDArray[np.float64], n_outcomes: int) -> NDArray[np.float64]:
    probs = np.zeros((n_outcomes, mean.size))
    for atom, p in zip(component.atoms, component.probs):
        for lo, hi, k in _atom_intervals(slopes, np.asarray(atom, dtype=np.float64)):
            probs[k] += p * _interval_mass(lo, hi, mean)
    return probs


def gaussian_choice_probs(slopes: NDArray[np.float64], mean: NDArray[np.float64], scale: NDArray[np.float64],
                          s: NDArray[np.float64]) -> NDArray[np.float64]:
    """Choice probabilities given the index value s when g ~ N(mean, diag(scale²)).

    Returns an array shaped (K + 1,) + s.shape.
    """
    K = slopes.size
    shape = (K,) + (1,) * s.ndim
    a = slopes.reshape(shape) * s + mean.reshape(shape)
    sig = scale.reshape(shape)
    outside = np.prod(special.ndtr(-a / sig), axis=0)
    if K == 1:
        return np.stack([outside, special.ndtr(a[0] / sig[0])])

    tail = QUADRATURE_CONFIG["tail"]
    order = QUADRATURE_CONFIG["legendre_order"]
    inside = []
    for k in range(K):
        lower = np.maximum(-a[k] / sig[k], -tail)
        t, wt = legendre_quadrature(order, lower, tail)
        u = a[k] + sig[k] * t
        integrand = np.exp(-0.5 * t * t) / np.sqrt(2.0 * np.pi)
        for j in range(K):
            if j != k:
                integrand = integrand * special.ndtr((u - a[j]) / sig[j])
        value = np.sum(wt * integrand, axis=0)
        inside.append(np.where(lower < tail, value, 0.0))
    return np.stack([outside] + inside)


def _gaussian_probs(component: GaussianMixture, slopes: NDArray[np.float64],
                    mean: NDArray[np.float64]) -> NDArray[np.float64]:
    def evaluate(order: int) -> NDArray[np.float64]:
        nodes, weights = hermite_quadrature(order)
        s = mean[None, :] + nodes[:, None]
        total = 0.0
        for mu, sd, p in zip(component.means, component.scales, component.probs):
            probs = gaussian_choice_probs(slopes, np.asarray(mu), np.asarray(sd), s)
            total = total + p * np.einsum("e,yez->yz", weights, probs)
        return total

    values, order = integrate_until_converged(evaluate)
    logger.debug("gaussian g integrated at quadrature order %d", order)
    return values


def cell_probabilities(spec: ModelSpec, w: str, z2_index: int) -> NDArray[np.float64]:
    """μ(· | w, z₂ point, z₁) for every z₁ node; shape (n_outcomes, n_z1)."""
    mean = spec.index.mean_shift(w, spec.z1_grid.nodes)
    slopes = spec.orientation * spec.loadings(z2_index)
    component = spec.g.for_w(w)
    if isinstance(component, PointMassMixture):
        probs = _point_mass_probs(component, slopes, mean, len(outcome_set(spec)))
    else:
        probs = _gaussian_probs(component, slopes, mean)
    return np.clip(probs, 0.0, 1.0)


def ccp_exact(spec: ModelSpec) -> CCPTable:
    """Exact CCP table: Gauss–Hermite over e for Gaussian g, closed form for point masses."""
    cells = [(w, k) for w in spec.w_levels for k in range(len(spec.z2_points))]
    blocks = parallel_map(lambda cell: cell_probabilities(spec, *cell), cells)

    outcomes = outcome_set(spec)
    values = np.empty((len(outcomes), len(spec.w_levels), len(spec.z2_points), spec.z1_grid.n))
    for (w, k), block in zip(cells, blocks):
        values[:, spec.w_levels.index(w), k, :] = block

    worst = float(np.max(np.abs(values.sum(axis=0) - 1.0)))
    if worst > ROW_SUM_TOL:
        logger.warning("CCP rows deviate from 1 by %.2e", worst)
    logger.info("Computed exact CCPs for %d cells", len(cells) * spec.z1_grid.n)
    return CCPTable(tuple(outcomes), tuple(spec.w_levels), tuple(map(tuple, spec.z2_points)), spec.z1_grid, values)


def ccp_for_points(spec: ModelSpec, z2_points: Sequence[Sequence[float]]) -> CCPTable:
    """Exact table on a different z₂ point set (same grid and primitives)."""
    return ccp_exact(spec.model_copy(update={"z2_points": [list(p) for p in z2_points]}))
