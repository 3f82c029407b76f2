"""
Regularized inversion of discretized first-kind integral operators.
Single Responsibility: turn an ill-conditioned matrix into a stable linear solution operator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Annotated, Literal, Optional, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from common.config import DECONV_CONFIG
from common.errors import InputError, SolverError

__all__ = [
    "Tikhonov",
    "TruncatedSVD",
    "RegStrategy",
    "RegularizedInverse",
    "parse_strategy",
    "build_inverse",
    "regularized_solve",
]

logger = logging.getLogger(__name__)


class Tikhonov(BaseModel):
    """argmin ‖Ax − b‖² + λ‖x‖²"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["tikhonov"] = "tikhonov"
    lam: float = Field(ge=0.0)

    def label(self) -> str:
        return f"tikhonov:{self.lam:g}"


class TruncatedSVD(BaseModel):
    """Pseudoinverse restricted to the leading singular triplets.

    Either a fixed rank, or every σᵢ with σᵢ/σ₁ ≥ threshold.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["tsvd"] = "tsvd"
    rank: Optional[int] = Field(default=None, ge=1)
    threshold: float = Field(default=DECONV_CONFIG["tsvd_threshold"], gt=0.0, lt=1.0)

    def label(self) -> str:
        if self.rank is not None:
            return f"tsvd:k={self.rank}"
        return f"tsvd:{self.threshold:g}"


RegStrategy = Annotated[Union[Tikhonov, TruncatedSVD], Field(discriminator="kind")]


def parse_strategy(text: str) -> Union[Tikhonov, TruncatedSVD]:
    """Parse the command-line form 'tsvd:THRESH' or 'tikhonov:LAMBDA'."""
    kind, _, value = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "tsvd":
            return TruncatedSVD() if not value else TruncatedSVD(threshold=float(value))
        if kind == "tikhonov":
            return Tikhonov(lam=float(value))
    except ValueError as exc:
        raise InputError(f"invalid regularization value in {text!r}: {exc}") from exc
    raise InputError(f"unknown regularization {text!r}; expected tsvd:THRESH or tikhonov:LAMBDA")


@dataclass(frozen=True)
class RegularizedInverse:
    """Linear map rhs -> regularized solution, plus what it discarded."""

    operator: NDArray[np.float64] = field(repr=False)
    coefficient_operator: NDArray[np.float64] = field(repr=False)
    singular_values: NDArray[np.float64] = field(repr=False)
    kept: Optional[int]
    lam: Optional[float]
    cut_level: float

    def apply(self, rhs: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.operator @ rhs

    def noise_floor(self, rhs: NDArray[np.float64]) -> float:
        """Size of the data component the filter throws away for this rhs."""
        return float(self.cut_level * np.linalg.norm(self.coefficient_operator @ rhs))


def _filter_factors(s: NDArray[np.float64], strategy: Union[Tikhonov, TruncatedSVD],
                    shape: tuple) -> tuple:
    tiny = s[0] * max(shape) * np.finfo(np.float64).eps
    rank = int(np.sum(s > tiny))
    if isinstance(strategy, TruncatedSVD):
        if strategy.rank is not None:
            if strategy.rank > rank:
                raise InputError(f"truncation rank {strategy.rank} exceeds numerical rank {rank}")
            k = strategy.rank
        else:
            k = int(np.sum(s / s[0] >= strategy.threshold))
        factors = np.zeros_like(s)
        factors[:k] = 1.0 / s[:k]
        cut = float(s[k]) if k < s.size else 0.0
        return factors, k, None, cut

    lam = float(strategy.lam)
    factors = np.zeros_like(s)
    if lam == 0.0:
        factors[:rank] = 1.0 / s[:rank]
    else:
        factors = s / (s * s + lam)
    return factors, None, lam, float(np.sqrt(lam))


def _filtered_pinv(matrix: NDArray[np.float64], strategy) -> tuple:
    u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise SolverError("kernel is identically zero")
    factors, kept, lam, cut = _filter_factors(s, strategy, matrix.shape)
    pinv = (vt.T * factors) @ u.T
    return pinv, s, kept, lam, cut


def build_inverse(kernel: NDArray[np.float64], strategy: Union[Tikhonov, TruncatedSVD],
                  smoothing: bool = False) -> RegularizedInverse:
    """
    Build the regularized solution operator for kernel.

    Args:
        kernel: (n, m) matrix.
        strategy: Tikhonov or TruncatedSVD.
        smoothing: If True the penalty acts on first differences of the solution
            and constants are left unpenalized, so a constant right-hand side
            reproduces a constant solution when kernel rows share one row sum.

    Returns:
        RegularizedInverse whose operator is (m, n).
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2:
        raise InputError("kernel must be a matrix")
    if not np.any(kernel):
        raise SolverError("kernel is identically zero")

    if not smoothing:
        pinv, s, kept, lam, cut = _filtered_pinv(kernel, strategy)
        return RegularizedInverse(pinv, pinv, s, kept, lam, cut)

    n, m = kernel.shape
    if m < 2:
        raise InputError("smoothing needs at least two solution nodes")
    mass = kernel @ np.ones(m)
    mass_sq = float(mass @ mass)
    projector = np.eye(n) - np.outer(mass, mass) / mass_sq
    cumulative = np.tril(np.ones((m, m - 1)), -1)
    reduced = projector @ kernel @ cumulative

    increments, s, kept, lam, cut = _filtered_pinv(reduced, strategy)
    level = mass @ (np.eye(n) - kernel @ cumulative @ increments) / mass_sq
    operator = np.outer(np.ones(m), level) + cumulative @ increments
    logger.debug("regularized inverse: %d singular values, kept=%s, lam=%s", s.size, kept, lam)
    return RegularizedInverse(operator, increments, s, kept, lam, cut)


def regularized_solve(kernel: NDArray[np.float64], rhs: NDArray[np.float64],
                      strategy: Union[Tikhonov, TruncatedSVD]) -> NDArray[np.float64]:
    """argmin ‖Ax − b‖² + λ‖x‖², or the truncated-SVD pseudoinverse solution."""
    kernel = np.asarray(kernel, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if kernel.ndim != 2 or rhs.ndim != 1 or kernel.shape[0] != rhs.shape[0]:
        raise InputError(f"dimension mismatch: kernel {kernel.shape} vs rhs {rhs.shape}")
    return build_inverse(kernel, strategy).apply(rhs)
