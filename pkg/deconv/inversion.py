"""
Inversion Module - regularized deconvolution of CCP tables
Single Responsibility: recover the choice kernel h(y, w, ·) from μ given the index law
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from common.config import DECONV_CONFIG
from common.errors import InputError
from common.utils import Label
from model.forward import CCPTable
from model.index import IndexModel
from numerics.grids import Grid1D
from numerics.regularization import RegularizedInverse, Tikhonov, TruncatedSVD, build_inverse
from .kernel import ChoiceKernel, build_kernel_matrix, close_kernel_rows, default_v_grid

logger = logging.getLogger(__name__)

Strategy = Union[Tikhonov, TruncatedSVD]


@dataclass
class DeconvDiagnostics:
    """What the regularized solve kept, threw away and failed to fit."""

    strategy: str
    singular_values: NDArray[np.float64] = field(repr=False)
    kept: Optional[int]
    lam: Optional[float]
    residual: float
    noise_floor: float
    overshoot: float
    n_equations: int
    flags: List[str] = field(default_factory=list)

    @property
    def misspecified(self) -> bool:
        return "misspecified" in self.flags

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "singular_values": [float(s) for s in self.singular_values],
            "kept": self.kept,
            "lam": self.lam,
            "residual": self.residual,
            "noise_floor": self.noise_floor,
            "overshoot": self.overshoot,
            "n_equations": self.n_equations,
            "flags": list(self.flags),
        }


def _flags(residual: float, floor: float, overshoot: float, n: int) -> List[str]:
    flags = []
    threshold = DECONV_CONFIG["residual_factor"] * max(floor, DECONV_CONFIG["residual_floor"] * np.sqrt(n))
    if residual > threshold:
        logger.warning("Residual %.3e exceeds %.3e: index law looks misspecified", residual, threshold)
        flags.append("misspecified")
    if overshoot > DECONV_CONFIG["overshoot_limit"]:
        logger.warning("Kernel overshoots [0, 1] by %.3f", overshoot)
        flags.append("overshoot")
    return flags


def _default_scale(point: Sequence[float]) -> float:
    return float(point[0]) if len(point) == 1 else 1.0


def _select_outcomes(available: Sequence[Label], outcomes: Optional[Sequence[Label]]) -> Tuple[Label, ...]:
    if outcomes is None:
        return tuple(available)
    chosen = tuple(tuple(y) if isinstance(y, list) else y for y in outcomes)
    missing = [y for y in chosen if y not in available]
    if missing:
        raise InputError(f"outcomes {missing} not in table outcomes {tuple(available)}")
    return chosen


def _resolve_w(levels: Sequence[str], w: Optional[str]) -> str:
    if w is None:
        if len(levels) != 1:
            raise InputError(f"w must be given when the table has several levels {tuple(levels)}")
        return levels[0]
    if w not in levels:
        raise InputError(f"w level {w!r} not in {tuple(levels)}")
    return w


def _recover_single(mu: CCPTable, index: IndexModel, w: Optional[str], z2_index: int,
                    v_grid: Optional[Grid1D], strategy: Strategy, outcomes, pooled: bool,
                    smoothing: bool, z2_scales: Optional[Sequence[float]]):
    w = _resolve_w(mu.w_levels, w)
    outcomes = _select_outcomes(mu.outcomes, outcomes)
    scales = list(z2_scales) if z2_scales is not None else [_default_scale(p) for p in mu.z2_points]
    if len(scales) != len(mu.z2_points):
        raise InputError("one z2 scale per z2 point required")
    points = list(range(len(mu.z2_points))) if pooled else [z2_index]
    if not pooled and not 0 <= z2_index < len(mu.z2_points):
        raise InputError(f"z2 index {z2_index} out of range")
    if v_grid is None:
        v_grid = default_v_grid(index, w, mu.z1_grid, [scales[k] for k in points])

    blocks, rows = [], []
    for k in points:
        matrix = build_kernel_matrix(index, w, scales[k], mu.z1_grid, v_grid)
        blocks.append(close_kernel_rows(matrix, index, w, scales[k], mu.z1_grid, v_grid))
        rows.append(np.stack([mu.series(y, w, k) for y in outcomes], axis=1))
    kernel = np.vstack(blocks)
    rhs = np.vstack(rows)
    if np.isnan(rhs).any():
        raise InputError("CCP table has empty cells; recover_h needs a complete table")

    inverse = build_inverse(kernel, strategy, smoothing=smoothing)
    raw = inverse.apply(rhs)
    fitted = kernel @ raw
    residual = float(np.linalg.norm(fitted - rhs))
    floor = float(np.sqrt(sum(inverse.noise_floor(rhs[:, j]) ** 2 for j in range(rhs.shape[1]))))

    h = ChoiceKernel.clipped(outcomes, w, (v_grid,), raw.T, z2_index=None if pooled else z2_index)
    diagnostics = DeconvDiagnostics(
        strategy=strategy.label(),
        singular_values=inverse.singular_values,
        kept=inverse.kept,
        lam=inverse.lam,
        residual=residual,
        noise_floor=floor,
        overshoot=h.overshoot,
        n_equations=int(rhs.size),
        flags=_flags(residual, floor, h.overshoot, rhs.size),
    )
    logger.info("Recovered h for w=%s (%s): residual %.3e, kept %s", w,
                "pooled" if pooled else f"z2 point {z2_index}", residual, inverse.kept)
    return h, diagnostics


def _recover_game(mu, indices: Sequence[IndexModel], v_grids, strategy: Strategy, outcomes, smoothing: bool):
    if len(indices) != 2:
        raise InputError("game tables need one index law per player")
    w = mu.w
    if v_grids is None:
        v_grids = [default_v_grid(indices[i], w, mu.z_grids[i]) for i in range(2)]
    if len(v_grids) != 2:
        raise InputError("game tables need one v grid per player")
    outcomes = _select_outcomes(mu.outcomes, outcomes)

    kernels: List = []
    inverses: List[RegularizedInverse] = []
    for i in range(2):
        matrix = build_kernel_matrix(indices[i], w, 1.0, mu.z_grids[i], v_grids[i])
        kernels.append(close_kernel_rows(matrix, indices[i], w, 1.0, mu.z_grids[i], v_grids[i]))
        inverses.append(build_inverse(kernels[-1], strategy, smoothing=smoothing))

    raw, residuals, floors = [], [], []
    for y in outcomes:
        surface = mu.surface(y)
        h = inverses[0].operator @ surface @ inverses[1].operator.T
        raw.append(h)
        residuals.append(np.linalg.norm(kernels[0] @ h @ kernels[1].T - surface))
        col = sum(inverses[0].noise_floor(surface[:, j]) ** 2 for j in range(surface.shape[1]))
        row = sum(inverses[1].noise_floor(surface[i, :]) ** 2 for i in range(surface.shape[0]))
        floors.append(col + row)

    residual = float(np.sqrt(np.sum(np.square(residuals))))
    floor = float(np.sqrt(np.sum(floors)))
    kernel = ChoiceKernel.clipped(outcomes, w, tuple(v_grids), np.stack(raw))
    n = len(outcomes) * mu.z_grids[0].n * mu.z_grids[1].n
    singular = np.concatenate([inv.singular_values for inv in inverses])
    diagnostics = DeconvDiagnostics(
        strategy=strategy.label(),
        singular_values=np.sort(singular)[::-1],
        kept=None if inverses[0].kept is None else min(inv.kept for inv in inverses),
        lam=inverses[0].lam,
        residual=residual,
        noise_floor=floor,
        overshoot=kernel.overshoot,
        n_equations=n,
        flags=_flags(residual, floor, kernel.overshoot, n),
    )
    logger.info("Recovered 2-D game kernel for w=%s: residual %.3e", w, residual)
    return kernel, diagnostics


def recover_h(mu, index: Union[IndexModel, Sequence[IndexModel]], w: Optional[str] = None,
              z2_index: int = 0, v_grid: Union[Grid1D, Sequence[Grid1D], None] = None,
              strategy: Optional[Strategy] = None, outcomes: Optional[Sequence[Label]] = None,
              pooled: bool = False, smoothing: bool = True,
              z2_scales: Optional[Sequence[float]] = None) -> Tuple[ChoiceKernel, DeconvDiagnostics]:
    """
    Solve μ(y | w, z₂, ·) = K h(y, w, ·) by regularized inversion.

    Args:
        mu: CCPTable, or a two-player game table (anything with z_grids).
        index: The known index law; one per player for game tables.
        w: w level (optional when the table has one).
        z2_index: z₂ point to invert; ignored when pooled.
        v_grid: Solution grid; defaults to the mean-shift range ± 4 sd with 161 nodes.
        strategy: TruncatedSVD (default) or Tikhonov.
        outcomes: Y*; defaults to every outcome of the table.
        pooled: Stack all z₂ points into one system (h must not depend on z₂).
        smoothing: Penalize first differences instead of the level of h.
        z2_scales: Multiplier of the index seen by h per z₂ point; defaults to z₂
            for scalar points and 1 otherwise.

    Returns:
        (ChoiceKernel clipped to [0, 1], DeconvDiagnostics)
    """
    strategy = strategy or TruncatedSVD()
    if hasattr(mu, "z_grids"):
        indices = [index] * 2 if isinstance(index, IndexModel) else list(index)
        grids = None if v_grid is None else ([v_grid] * 2 if isinstance(v_grid, Grid1D) else list(v_grid))
        return _recover_game(mu, indices, grids, strategy, outcomes, smoothing)
    if not isinstance(index, IndexModel):
        raise InputError("single-agent tables take one IndexModel")
    if v_grid is not None and not isinstance(v_grid, Grid1D):
        raise InputError("single-agent tables take one v grid")
    return _recover_single(mu, index, w, z2_index, v_grid, strategy, outcomes, pooled, smoothing, z2_scales)

