"""Standard normal density and distribution function."""
from __future__ import annotations

import math
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from common.errors import InputError

__all__ = ["gaussian_pdf", "gaussian_cdf"]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

RealOrArray = Union[float, NDArray[np.float64]]


def _checked(t: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InputError("gaussian functions require finite input")
    return arr


def _unwrap(arr: NDArray[np.float64]) -> RealOrArray:
    return float(arr) if arr.ndim == 0 else arr


def gaussian_pdf(t: ArrayLike) -> RealOrArray:
    """φ(t); scalar in, scalar out."""
    arr = _checked(t)
    return _unwrap(_INV_SQRT_2PI * np.exp(-0.5 * arr * arr))


def gaussian_cdf(t: ArrayLike) -> RealOrArray:
    """Φ(t) via scipy's ndtr."""
    arr = _checked(t)
    return _unwrap(special.ndtr(arr))
