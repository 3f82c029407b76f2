"""
FG Module - heterogeneity distribution on the ray set
Single Responsibility: read F_g off recovered outside-option kernels and rearrange it along rays
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from common.config import RECOVER_CONFIG
from common.errors import InputError, MonotonicityError
from deconv.kernel import ChoiceKernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ray:
    """F_g at the points r = λ·loading for λ on a grid."""

    loading: tuple
    direction: tuple
    lam: NDArray[np.float64] = field(repr=False)
    cdf: NDArray[np.float64] = field(repr=False)
    raw_cdf: NDArray[np.float64] = field(repr=False)
    ordered: bool
    violation: float
    perturbation: float

    def points(self) -> NDArray[np.float64]:
        return self.lam[:, None] * np.asarray(self.loading)[None, :]


@dataclass
class RaySetCDF:
    w: str
    rays: List[Ray]

    def rows(self) -> List[Dict[str, Any]]:
        """Long-format rows (ray, direction_k..., lambda, r_k..., F)."""
        out = []
        for k, ray in enumerate(self.rays):
            points = ray.points()
            for i, lam in enumerate(ray.lam):
                row: Dict[str, Any] = {"w": self.w, "ray": k}
                row.update({f"d{j + 1}": float(d) for j, d in enumerate(ray.direction)})
                row["lambda"] = float(lam)
                row.update({f"r{j + 1}": float(x) for j, x in enumerate(points[i])})
                row["F"] = float(ray.cdf[i])
                out.append(row)
        return out

    def summary(self) -> Dict[str, Any]:
        return {
            "w": self.w,
            "rays": [
                {"loading": list(r.loading), "ordered": r.ordered, "violation": r.violation,
                 "perturbation": r.perturbation}
                for r in self.rays
            ],
        }


def monotone_rearrangement(values: NDArray[np.float64]) -> NDArray[np.float64]:
    """Increasing rearrangement: the sorted values at the original abscissae."""
    return np.sort(np.asarray(values, dtype=np.float64))


def monotonicity_violation(values: NDArray[np.float64]) -> float:
    """Largest drop below the running maximum."""
    values = np.asarray(values, dtype=np.float64)
    return float(np.max(np.maximum.accumulate(values) - values)) if values.size else 0.0


def _ray(h: ChoiceKernel, loading: NDArray[np.float64], tol: float) -> Ray:
    outside = h.outcomes[0]
    if outside != 0 and not (isinstance(outside, tuple) and not any(outside)):
        raise InputError(f"first kernel outcome must be the outside option, got {outside!r}")
    # h(0, v) = F_g(−loading·v): λ = −v
    lam = -h.v_grid.nodes[::-1]
    raw = np.clip(h.get(outside)[::-1], 0.0, 1.0)
    norm = float(np.linalg.norm(loading))
    direction = tuple(float(x) for x in loading / norm)

    ordered = bool(np.all(loading >= 0.0) or np.all(loading <= 0.0))
    if not ordered:
        return Ray(tuple(map(float, loading)), direction, lam, raw, raw, False, 0.0, 0.0)

    # componentwise-increasing arguments run along +λ for positive loadings
    forward = raw if np.all(loading >= 0.0) else raw[::-1]
    violation = monotonicity_violation(forward)
    if violation > tol:
        raise MonotonicityError(
            f"recovered CDF drops by {violation:.3f} along ray {direction} (tolerance {tol}); inversion failed"
        )
    rearranged = monotone_rearrangement(forward)
    cdf = rearranged if np.all(loading >= 0.0) else rearranged[::-1]
    perturbation = float(np.max(np.abs(cdf - raw)))
    return Ray(tuple(map(float, loading)), direction, lam, cdf, raw, True, violation, perturbation)


def recover_fg(kernels: Sequence[ChoiceKernel], loadings: Sequence[Sequence[float]], w: Optional[str] = None,
               tol: float = None) -> RaySetCDF:
    """
    F_g on R_w from one outside-option kernel per z₂ point.

    Deconvolved kernels of smooth g (Gaussian mixtures) stay within the default tol. Kernels
    of point-mass g are steps, and their regularized reconstructions ring past it; pass exact
    kernels or a looser tol for those.

    Args:
        kernels: Kernels whose first outcome is the outside option, one per z₂ point.
        loadings: Index coefficient of each inside alternative at that z₂ point
            (z₂ itself for multinomial models, bundle sums for bundles, 1 for
            binary kernels already indexed by z₂·v).
        w: w level; defaults to the kernels' level.
        tol: Largest monotonicity violation accepted before rearrangement.

    Raises:
        MonotonicityError: a ray's raw values fall more than tol below their running maximum.
    """
    tol = RECOVER_CONFIG["monotonicity_tol"] if tol is None else tol
    if len(kernels) != len(loadings) or not kernels:
        raise InputError("one loading vector per kernel required")
    w = w or kernels[0].w
    rays = []
    for h, loading in zip(kernels, loadings):
        if h.w != w:
            raise InputError(f"kernel for w={h.w} mixed into recovery at w={w}")
        loading = np.atleast_1d(np.asarray(loading, dtype=np.float64))
        if not np.any(loading):
            raise InputError("loading vector must be nonzero")
        rays.append(_ray(h, loading, tol))
    logger.info("Recovered F_g at w=%s on %d rays", w, len(rays))
    return RaySetCDF(w=w, rays=rays)
