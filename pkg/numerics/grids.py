"""Uniform grids, gridded functions and finite-difference partials."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.config import GRID_CONFIG
from common.errors import InputError

__all__ = ["Grid1D", "GriddedFn", "partial_derivative"]


class Grid1D(BaseModel):
    """Uniform grid with n nodes on [lo, hi]."""

    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    n: int = Field(ge=GRID_CONFIG["min_nodes"])

    @model_validator(mode="after")
    def _ordered(self) -> "Grid1D":
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"grid requires lo < hi (got lo={self.lo}, hi={self.hi})")
        return self

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def nodes(self) -> NDArray[np.float64]:
        return np.linspace(self.lo, self.hi, self.n)

    def shifted(self, offset: float) -> "Grid1D":
        return Grid1D(lo=self.lo + offset, hi=self.hi + offset, n=self.n)

    def nearest_index(self, value: float) -> int:
        idx = int(round((value - self.lo) / self.spacing))
        return min(max(idx, 0), self.n - 1)


@dataclass(frozen=True)
class GriddedFn:
    """Values of a function on the tensor product of one or two grids."""

    grids: Tuple[Grid1D, ...]
    values: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        grids = tuple(self.grids)
        values = np.asarray(self.values, dtype=np.float64)
        if not 1 <= len(grids) <= 2:
            raise InputError("GriddedFn supports one or two grids")
        shape = tuple(g.n for g in grids)
        if values.shape != shape:
            raise InputError(f"values shape {values.shape} does not match grid shape {shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("GriddedFn values must be finite")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "values", values)

    @property
    def mesh(self) -> Tuple[NDArray[np.float64], ...]:
        return tuple(np.meshgrid(*[g.nodes for g in self.grids], indexing="ij"))

    def __add__(self, other: "GriddedFn") -> "GriddedFn":
        return GriddedFn(self.grids, self.values + other.values)

    def scaled(self, factor: float) -> "GriddedFn":
        return GriddedFn(self.grids, factor * self.values)


def _second_difference(values: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    # values has the differentiated axis first
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / h**2
    out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h**2
    out[-1] = (2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]) / h**2
    return out


def partial_derivative(f: GriddedFn, axis: int = 0, order: int = 1) -> GriddedFn:
    """Finite-difference partial of f along one grid axis.

    Central differences inside, second-order one-sided differences at the
    two edges, so the error is O(spacing²) everywhere.

    Raises:
        InputError: unknown axis/order or fewer than 5 nodes on the axis.
    """
    if axis not in range(len(f.grids)):
        raise InputError(f"axis {axis} out of range for a {len(f.grids)}-D function")
    if order not in (1, 2):
        raise InputError(f"order must be 1 or 2 (got {order})")
    grid = f.grids[axis]
    if grid.n < GRID_CONFIG["min_derivative_nodes"]:
        raise InputError(f"derivative needs at least {GRID_CONFIG['min_derivative_nodes']} nodes (got {grid.n})")

    h = grid.spacing
    if order == 1:
        values = np.gradient(f.values, h, axis=axis, edge_order=2)
    else:
        moved = np.moveaxis(f.values, axis, 0)
        values = np.moveaxis(_second_difference(moved, h), 0, axis)
    return GriddedFn(f.grids, values)
