"""
Eta Module - the CCP surface used to identify the index coefficients
Single Responsibility: extract η(z₁, z₂) = μ(y*|·) from a table and differentiate η̃ = z₂·η
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from common.config import BETA_CONFIG
from common.errors import InputError
from common.utils import Label
from model.forward import CCPTable
from numerics.grids import Grid1D, GriddedFn, partial_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EtaSurface:
    """η and η̃ on the (z₁, z₂) grid with ∂_{z₁}η̃, ∂²_{z₁}η̃ and ∂_{z₂}η̃.

    For vector z₂ the second axis is the coordinate c of points c·direction.
    """

    eta: GriddedFn = field(repr=False)
    eta_tilde: GriddedFn = field(repr=False)
    d1: GriddedFn = field(repr=False)
    d11: GriddedFn = field(repr=False)
    d2: GriddedFn = field(repr=False)
    y_star: Label = None
    w: str = None
    direction: Tuple[float, ...] = (1.0,)

    @property
    def z1_grid(self) -> Grid1D:
        return self.eta.grids[0]

    @property
    def z2_grid(self) -> Grid1D:
        return self.eta.grids[1]

    @classmethod
    def from_values(cls, z1_grid: Grid1D, z2_grid: Grid1D, eta: NDArray[np.float64], y_star: Label = None,
                    w: str = None, direction: Sequence[float] = (1.0,)) -> "EtaSurface":
        """Build the surface and its partials from η values shaped (n_z1, n_z2)."""
        eta_fn = GriddedFn((z1_grid, z2_grid), eta)
        if eta_fn.values.min() < -1e-12 or eta_fn.values.max() > 1.0 + 1e-12:
            raise InputError("η values must lie in [0, 1]")
        z2 = z2_grid.nodes
        if np.any(z2 == 0.0) or (z2.min() < 0.0 < z2.max()):
            raise InputError("z2 must be bounded away from 0 on the surface")
        tilde = GriddedFn(eta_fn.grids, eta_fn.values * z2[None, :])
        return cls(
            eta=eta_fn,
            eta_tilde=tilde,
            d1=partial_derivative(tilde, axis=0, order=1),
            d11=partial_derivative(tilde, axis=0, order=2),
            d2=partial_derivative(tilde, axis=1, order=1),
            y_star=y_star,
            w=w,
            direction=tuple(float(x) for x in direction),
        )


def _coordinates(points: Sequence[Sequence[float]], direction: NDArray[np.float64]) -> Tuple[list, list]:
    used, coords = [], []
    for k, p in enumerate(points):
        p = np.asarray(p, dtype=np.float64)
        c = float(p @ direction / (direction @ direction))
        if np.allclose(p, c * direction, rtol=0.0, atol=1e-12):
            used.append(k)
            coords.append(c)
    return used, coords


def build_eta(mu: CCPTable, y_star: Label, w: Optional[str] = None,
              direction: Optional[Sequence[float]] = None) -> EtaSurface:
    """
    η(z₁, c) = μ(y* | w, z₂ = c·direction, z₁) over the table's z₂ points on the line.

    Args:
        mu: CCP table with at least five uniformly spaced z₂ points along direction.
        y_star: Outcome whose probability is used.
        w: w level (optional when the table has one).
        direction: z₂ direction; defaults to equal coordinates.

    Raises:
        InputError: too few or non-uniform z₂ points, or grids too small for second differences.
    """
    if w is None:
        if len(mu.w_levels) != 1:
            raise InputError("w must be given when the table has several levels")
        w = mu.w_levels[0]
    dim = len(mu.z2_points[0])
    direction = np.ones(dim) if direction is None else np.asarray(direction, dtype=np.float64)
    if direction.shape != (dim,) or not np.any(direction):
        raise InputError(f"direction must be a nonzero {dim}-vector")

    used, coords = _coordinates(mu.z2_points, direction)
    order = np.argsort(coords)
    coords = np.asarray(coords)[order]
    used = [used[i] for i in order]
    minimum = BETA_CONFIG["min_z2_nodes"]
    if len(used) < minimum:
        raise InputError(f"need at least {minimum} z2 points along {tuple(direction)} (got {len(used)})")
    steps = np.diff(coords)
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-12) or steps[0] <= 0.0:
        raise InputError("z2 points along the direction must be distinct and uniformly spaced")

    z2_grid = Grid1D(lo=float(coords[0]), hi=float(coords[-1]), n=len(coords))
    values = np.stack([mu.series(y_star, w, k) for k in used], axis=1)
    if np.isnan(values).any():
        raise InputError("CCP table has empty cells on the η surface")
    logger.debug("η surface for y*=%s, w=%s on %dx%d nodes", y_star, w, *values.shape)
    return EtaSurface.from_values(mu.z1_grid, z2_grid, values, y_star=y_star, w=w, direction=direction)
