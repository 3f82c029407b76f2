"""
Identify Module - index coefficients from the φ'' identity
Single Responsibility: solve for (β₀/β₁, 1/β₁²) by least squares and resolve the signs
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from common.config import BETA_CONFIG
from common.errors import IdentificationError, InputError
from common.utils import label_to_text
from model.forward import CCPTable
from model.index import SignInfo
from .degeneracy import DegeneracyReport, check_degeneracy, valid_cells
from .eta import EtaSurface

logger = logging.getLogger(__name__)


@dataclass
class BetaEstimate:
    """Recovered (β₀, β₁) at one w level, with least-squares diagnostics."""

    w: str
    beta1_sq: float
    ratio: float
    beta0: float
    beta1: float
    sign_info: SignInfo
    degeneracy: DegeneracyReport
    residual_rms: float
    n_cells: int
    residuals: NDArray[np.float64] = field(repr=False, default=None)
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w": self.w,
            "beta1_sq": self.beta1_sq,
            "ratio": self.ratio,
            "beta0": self.beta0,
            "beta1": self.beta1,
            "sign_info": self.sign_info.model_dump(),
            "degeneracy": self.degeneracy.to_dict(),
            "residual_rms": self.residual_rms,
            "max_abs_residual": float(np.max(np.abs(self.residuals))) if self.residuals is not None else None,
            "n_cells": self.n_cells,
            "flags": list(self.flags),
        }


def _design(surface: EtaSurface, mask: NDArray[np.bool_]) -> Tuple[NDArray, NDArray]:
    z1, z2 = surface.eta.mesh
    d1 = surface.d1.values[mask]
    a = (z2[mask] * surface.d2.values[mask] - surface.eta_tilde.values[mask]) / d1
    b = surface.d11.values[mask] / d1
    design = np.column_stack([np.ones_like(b), b])
    return design, a - z1[mask]


def resolve_signs(ratio: float, beta1_sq: float, sign_info: SignInfo) -> Tuple[float, float]:
    """(β₀, β₁) from β₀/β₁, β₁² and one known sign."""
    magnitude = float(np.sqrt(beta1_sq))
    if sign_info.parameter == "beta1":
        beta1 = sign_info.sign * magnitude
    else:
        if ratio == 0.0:
            raise IdentificationError("β0/β1 = 0: the sign of β0 cannot fix β1; a beta1 sign tag is required")
        beta1 = sign_info.sign * float(np.sign(ratio)) * magnitude
    return ratio * beta1, beta1


def identify_beta(surface: EtaSurface, sign_info: SignInfo, residual_tol: float = None) -> BetaEstimate:
    """
    Least-squares solution of r + B·s = A − z₁ over valid interior cells, where
    A = (z₂∂_{z₂}η̃ − η̃)/∂_{z₁}η̃, B = ∂²_{z₁}η̃/∂_{z₁}η̃, r = β₀/β₁ and s = 1/β₁².

    Raises:
        IdentificationError: degenerate surface, too few cells, or s ≤ 0.
    """
    residual_tol = BETA_CONFIG["residual_tol"] if residual_tol is None else residual_tol
    report = check_degeneracy(surface)
    if report.degenerate:
        raise IdentificationError(f"η surface is degenerate ({report.reason}); β is not identified")

    mask = valid_cells(surface)
    if mask.sum() < 2:
        raise IdentificationError("fewer than two usable cells for the least-squares fit")
    design, target = _design(surface, mask)
    (ratio, s), *_ = np.linalg.lstsq(design, target, rcond=None)
    if s <= 0.0:
        raise IdentificationError(f"fitted 1/β1² = {s:.4g} is not positive; surface is inconsistent with the index law")

    residuals = target - design @ np.array([ratio, s])
    rms = float(np.sqrt(np.mean(residuals ** 2)))
    beta1_sq = 1.0 / float(s)
    beta0, beta1 = resolve_signs(float(ratio), beta1_sq, sign_info)
    flags = []
    if rms > residual_tol:
        logger.warning("identity residual %.3e above %.3e: misspecification suspected", rms, residual_tol)
        flags.append("misspecified")
    logger.info("w=%s: beta1^2=%.6f ratio=%.6f from %d cells", surface.w, beta1_sq, ratio, int(mask.sum()))
    return BetaEstimate(
        w=surface.w,
        beta1_sq=beta1_sq,
        ratio=float(ratio),
        beta0=beta0,
        beta1=beta1,
        sign_info=sign_info,
        degeneracy=report,
        residual_rms=rms,
        n_cells=int(mask.sum()),
        residuals=residuals,
        flags=flags,
    )


def identity_residual(surface: EtaSurface, beta0: float, beta1: float) -> float:
    """RMS of ∂²η̃ + β₁²η̃ + β₁(β₀+β₁z₁)∂_{z₁}η̃ − β₁²z₂∂_{z₂}η̃ over valid cells."""
    mask = valid_cells(surface)
    z1, z2 = surface.eta.mesh
    gap = (surface.d11.values + beta1 ** 2 * surface.eta_tilde.values
           + beta1 * (beta0 + beta1 * z1) * surface.d1.values
           - beta1 ** 2 * z2 * surface.d2.values)
    return float(np.sqrt(np.mean(gap[mask] ** 2)))


@dataclass(frozen=True)
class SignEstimate:
    """Sign of β₁ from the slope of μ(outside | z₁); sign 0 means abstention."""

    w: str
    sign: int
    slope: float
    z2_point: Optional[Tuple[float, ...]]
    abstained: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w": self.w,
            "sign": self.sign,
            "slope": self.slope,
            "z2_point": None if self.z2_point is None else list(self.z2_point),
            "abstained": self.abstained,
        }


def identify_beta1_sign_multinomial(mu: CCPTable, w: str, tol: float = None) -> SignEstimate:
    """
    The outside option loses share as the index rises when β₁·z₂ > 0, so
    sign(β₁) = −sign(slope)·sign(z₂) at an equal-coordinate z₂ point.
    """
    tol = BETA_CONFIG["sign_slope_tol"] if tol is None else tol
    equal = [k for k, p in enumerate(mu.z2_points) if len(set(p)) == 1 and p[0] != 0.0]
    if not equal:
        raise InputError("no z2 point with equal nonzero coordinates")
    k = equal[0]
    outside = mu.outcomes[0]
    series = mu.series(outside, w, k)
    if np.isnan(series).any():
        raise InputError(f"empty cells in mu({label_to_text(outside)} | w={w}) at the equal-coordinate point")
    slope = float(np.polyfit(mu.z1_grid.nodes, series, 1)[0])
    point = tuple(mu.z2_points[k])
    if abs(slope) < tol:
        logger.warning("w=%s: outside-option share is flat in z1 (slope %.2e); sign of beta1 not decided", w, slope)
        return SignEstimate(w, 0, slope, point, True)
    sign = int(-np.sign(slope) * np.sign(point[0]))
    return SignEstimate(w, sign, slope, point, False)
