"""
Kernel Module - gridded choice kernels and discretized index densities
Single Responsibility: hold h(y, w, v) on a grid and build the matrices that map it to CCPs
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import special

from common.config import DECONV_CONFIG
from common.errors import InputError, KernelMassError
from common.utils import Label
from model.index import IndexModel
from numerics.gaussian import gaussian_pdf
from numerics.grids import Grid1D

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChoiceKernel:
    """h(y, w, v) on one v grid per latent index; values shaped (n_outcomes, *grid shape)."""

    outcomes: Tuple[Label, ...]
    w: str
    v_grids: Tuple[Grid1D, ...]
    values: NDArray[np.float64] = field(repr=False)
    overshoot: float = 0.0
    z2_index: Optional[int] = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        shape = (len(self.outcomes),) + tuple(g.n for g in self.v_grids)
        if values.shape != shape:
            raise InputError(f"kernel values shape {values.shape} does not match {shape}")
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "v_grids", tuple(self.v_grids))
        object.__setattr__(self, "values", values)

    @property
    def v_grid(self) -> Grid1D:
        if len(self.v_grids) != 1:
            raise InputError("kernel has more than one latent index")
        return self.v_grids[0]

    def get(self, y: Label) -> NDArray[np.float64]:
        try:
            return self.values[self.outcomes.index(y)]
        except ValueError:
            raise InputError(f"outcome {y!r} not in kernel outcomes {self.outcomes}") from None

    def sums(self) -> NDArray[np.float64]:
        return self.values.sum(axis=0)

    @classmethod
    def clipped(cls, outcomes, w: str, v_grids, raw: NDArray[np.float64],
                z2_index: Optional[int] = None) -> "ChoiceKernel":
        """Clip raw inversion output to [0, 1], keeping the largest excursion."""
        raw = np.asarray(raw, dtype=np.float64)
        overshoot = float(max(0.0, -raw.min(), raw.max() - 1.0)) if raw.size else 0.0
        return cls(tuple(outcomes), w, tuple(v_grids), np.clip(raw, 0.0, 1.0), overshoot, z2_index)


def default_v_grid(index: IndexModel, w: str, z1_grid: Grid1D, z2_values: Sequence[float] = (1.0,),
                   span_sd: float = None, n: int = None) -> Grid1D:
    """
    Grid covering every mean shift z₂·(β₀ + β₁z₁) plus span_sd standard deviations.

    With several z₂ values the union of their ranges is covered.
    """
    span_sd = DECONV_CONFIG["v_span_sd"] if span_sd is None else span_sd
    n = n or DECONV_CONFIG["v_nodes"]
    shift = index.mean_shift(w, z1_grid.nodes)
    lo, hi = np.inf, -np.inf
    for z2 in z2_values:
        if z2 == 0.0:
            raise InputError("z2 = 0 is not allowed: the latent index has no spread")
        means = z2 * shift
        lo = min(lo, float(means.min()) - span_sd * abs(z2))
        hi = max(hi, float(means.max()) + span_sd * abs(z2))
    return Grid1D(lo=lo, hi=hi, n=n)


def build_kernel_matrix(index: IndexModel, w: str, z2: float, z1_grid: Grid1D, v_grid: Grid1D,
                        min_row_mass: float = None) -> NDArray[np.float64]:
    """
    Riemann discretization of the index density.

    Entry (z₁ node, v node) is φ(v/z₂ − β₀(w) − β₁(w)z₁)·Δv/|z₂|.

    Raises:
        InputError: z2 is zero.
        KernelMassError: some row keeps less than min_row_mass of the density.
    """
    if z2 == 0.0 or not np.isfinite(z2):
        raise InputError("z2 = 0 is not allowed: the latent index has no spread")
    min_row_mass = DECONV_CONFIG["min_row_mass"] if min_row_mass is None else min_row_mass

    shift = index.mean_shift(w, z1_grid.nodes)
    x = v_grid.nodes[None, :] / z2 - shift[:, None]
    matrix = gaussian_pdf(x) * v_grid.spacing / abs(z2)

    mass = matrix.sum(axis=1)
    if mass.min() < min_row_mass:
        worst = int(np.argmin(mass))
        raise KernelMassError(
            f"v grid [{v_grid.lo:g}, {v_grid.hi:g}] too narrow: row at z1={z1_grid.nodes[worst]:g} "
            f"keeps mass {mass[worst]:.6f} < {min_row_mass}"
        )
    return matrix


def close_kernel_rows(matrix: NDArray[np.float64], index: IndexModel, w: str, z2: float,
                      z1_grid: Grid1D, v_grid: Grid1D) -> NDArray[np.float64]:
    """Give each row's missing mass to the edge columns, split by the two tail probabilities."""
    shift = index.mean_shift(w, z1_grid.nodes)
    lo_cut = v_grid.lo / z2 - shift
    hi_cut = v_grid.hi / z2 - shift
    if z2 > 0:
        lower, upper = special.ndtr(lo_cut), special.ndtr(-hi_cut)
    else:
        lower, upper = special.ndtr(-lo_cut), special.ndtr(hi_cut)
    total = lower + upper
    share = np.where(total > 0.0, lower / np.where(total > 0.0, total, 1.0), 0.5)

    closed = np.array(matrix, dtype=np.float64, copy=True)
    missing = 1.0 - closed.sum(axis=1)
    closed[:, 0] += share * missing
    closed[:, -1] += (1.0 - share) * missing
    logger.debug("closed kernel rows: largest missing mass %.2e", float(np.max(np.abs(missing))))
    return closed
